#include "fggpp/pipeline.hpp"

#include "fggpp/ppl_parser.hpp"
#include "fggpp/ppl_passes.hpp"

#include <fstream>
#include <sstream>

namespace fgg {

Compiled compile_source(const std::string& source, const ppl::Params& params, const CompileOptions& options) {
    Compiled out;
    try {
        ppl::Program parsed = ppl::parse(source);
        out.program = ppl::resolve_names(ppl::desugar(parsed), params);
        auto diagnostics = ppl::scope_check(out.program);
        if (!diagnostics.empty()) {
            std::string message;
            for (const auto& d : diagnostics)
                message += (message.empty() ? "" : "\n") + d.to_string();
            throw FrontendError(message);
        }
        out.typed = ppl::assign_domains(out.program, params, options.domains);
    } catch (const ppl::SyntaxError& e) {
        throw FrontendError(e.what());
    } catch (const ppl::TypeError& e) {
        throw FrontendError(e.what());
    }
    out.raw = translate(out.typed);
    out.unit = simplify(out.raw, options.passes);
    for (const auto* cu : {&out.raw, &out.unit}) {
        auto problems = validate(cu->grammar);
        if (!problems.empty())
            throw std::logic_error("translation produced an invalid grammar: " + problems.front().invariant + " at " +
                                   problems.front().location + ": " + problems.front().message);
    }
    return out;
}

Compiled compile_file(const std::string& source_path, const std::string& params_path, const CompileOptions& options) {
    std::ifstream in(source_path);
    if (!in)
        throw FrontendError("cannot open source file '" + source_path + "'");
    std::stringstream text;
    text << in.rdbuf();
    ppl::Params params;
    if (!params_path.empty()) {
        try {
            params = ppl::read_params_file(params_path);
        } catch (const ppl::ParamsError& e) {
            throw FrontendError(e.what());
        }
    }
    try {
        return compile_source(text.str(), params, options);
    } catch (const FrontendError& e) {
        throw FrontendError(source_path + ":" + e.what());
    }
}

nlohmann::json provenance_to_json(const CompilationUnit& cu) {
    nlohmann::json rules = nlohmann::json::array();
    for (std::size_t i = 0; i < cu.grammar.rules.size(); ++i) {
        nlohmann::json origins = nlohmann::json::array();
        for (const auto& o : cu.provenance[i])
            origins.push_back({{"line", o.pos.line}, {"column", o.pos.column}, {"construct", o.construct}});
        rules.push_back({{"index", i}, {"lhs", cu.grammar.rules[i].lhs}, {"origins", origins}});
    }
    return {{"rules", rules}, {"passes", cu.pass_log}};
}

}  // namespace fgg
