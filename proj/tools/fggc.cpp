// fggc: compile probabilistic programs to factor graph grammars and query them.

#include "fggpp/grammar_json.hpp"
#include "fggpp/inference.hpp"
#include "fggpp/oracle.hpp"
#include "fggpp/pipeline.hpp"
#include "fggpp/render.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace fgg;

constexpr int kExitOk = 0;
constexpr int kExitFrontend = 2;
constexpr int kExitDivergent = 3;
constexpr int kExitMismatch = 4;

struct Config {
    std::string input;
    std::string params;
    std::string out;
    std::string provenance;
    std::string fgg;
    std::string passes = "all";
    std::string format = "dot";
    std::string nonterminal;
    std::string measure = "all";
    double tol = 1e-10;
    std::size_t max_iter = 10000;
    std::size_t depth = 4;
};

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string num(double x) {
    std::ostringstream s;
    s << std::setprecision(12) << x;
    return s.str();
}

PassSet parse_passes(const std::string& text) {
    if (text == "all")
        return all_passes();
    PassSet out;
    if (text == "none" || text.empty())
        return out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto p = parse_pass(item);
        if (!p)
            throw UsageError("unknown pass '" + item + "' (expected inline, compose, contract, prune, all or none)");
        out.insert(*p);
    }
    return out;
}

bool is_json_path(const std::string& path) {
    return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

Grammar read_grammar(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw FrontendError("cannot open grammar file '" + path + "'");
    try {
        Grammar g = grammar_from_json(nlohmann::json::parse(in));
        auto problems = validate(g);
        if (!problems.empty())
            throw FrontendError(path + ": " + problems.front().invariant + " at " + problems.front().location + ": " +
                                problems.front().message);
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw FrontendError(path + ": malformed JSON: " + e.what());
    } catch (const FormatError& e) {
        throw FrontendError(path + ": " + e.what());
    }
}

// A grammar from either a source program or an FGG JSON file.
struct Loaded {
    Grammar grammar;
    std::optional<Compiled> compiled;
};

Loaded load(const Config& cfg) {
    if (is_json_path(cfg.input))
        return {read_grammar(cfg.input), std::nullopt};
    CompileOptions options;
    options.passes = parse_passes(cfg.passes);
    Compiled c = compile_file(cfg.input, cfg.params, options);
    Grammar g = c.unit.grammar;
    return {std::move(g), std::move(c)};
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw FrontendError("cannot write '" + path + "'");
    out << text;
}

// Label of entry `flat` of a tensor over `domains`.
std::string entry_label(const Grammar& g, const WeightTensor& t, std::size_t flat) {
    std::vector<std::size_t> index(t.rank());
    for (std::size_t k = t.rank(); k-- > 0;) {
        index[k] = flat % t.shape()[k];
        flat /= t.shape()[k];
    }
    std::string s;
    for (std::size_t k = 0; k < t.rank(); ++k)
        s += (k ? ", " : "") + g.domain(t.domains()[k]).values[index[k]].to_string();
    return t.rank() == 1 ? s : "(" + s + ")";
}

int cmd_compile(const Config& cfg) {
    if (is_json_path(cfg.input))
        throw UsageError("compile expects a program, not a grammar file");
    Loaded l = load(cfg);
    write_output(cfg.out, dump_grammar(l.grammar));
    std::string sidecar = cfg.provenance;
    if (sidecar.empty() && !cfg.out.empty() && cfg.out != "-")
        sidecar = cfg.out + ".provenance.json";
    if (!sidecar.empty())
        write_output(sidecar, provenance_to_json(l.compiled->unit).dump(2) + "\n");
    return kExitOk;
}

int cmd_infer(const Config& cfg) {
    Loaded l = load(cfg);
    SolverOptions options;
    options.tol = cfg.tol;
    options.max_iter = cfg.max_iter;
    StartQuery q = query_start(l.grammar, options);
    std::cout << "start " << l.grammar.start << "\n";
    for (std::size_t i = 0; i < q.weights.size(); ++i)
        std::cout << entry_label(l.grammar, q.weights, i) << "\t" << num(q.weights.data()[i]) << "\n";
    std::cout << "iterations " << q.iterations << "\n";
    std::cout << "delta " << num(q.delta) << "\n";
    std::cout << "status " << to_string(q.status) << "\n";
    if (q.status == SolveStatus::Divergent) {
        std::cerr << "fggc: fixed-point iteration diverged; the weights above are partial\n";
        return kExitDivergent;
    }
    return kExitOk;
}

int cmd_compare(const Config& cfg) {
    if (is_json_path(cfg.input))
        throw UsageError("compare expects a program (use --fgg to substitute a grammar)");
    Loaded l = load(cfg);
    const Compiled& c = *l.compiled;
    Grammar g = cfg.fgg.empty() ? l.grammar : read_grammar(cfg.fgg);

    oracle::EnumerationOptions measure;
    measure.counted = std::set<std::string>(c.unit.function_labels.begin(), c.unit.function_labels.end());
    oracle::Interpretation interp = oracle::interpret(c.program, c.typed.params, cfg.depth + 1);
    WeightTensor truncated = oracle::truncated_wX(g, g.start, cfg.depth, measure);
    SolverOptions options;
    options.tol = cfg.tol;
    options.max_iter = cfg.max_iter;
    StartQuery fixed = query_start(g, options);

    const double exact_tol = 1e-12;
    Domain result;
    if (truncated.rank() == 1)
        result = g.domain(truncated.domains()[0]);
    std::set<Value> values(result.values.begin(), result.values.end());
    for (const auto& [v, w] : interp.weights)
        values.insert(v);

    bool ok = true;
    std::vector<std::string> offending;
    std::cout << "value\tinterpret\ttruncated\tfixed_point\tdelta\n";
    for (const auto& v : values) {
        auto iw = interp.weights.find(v);
        double a = iw == interp.weights.end() ? 0.0 : iw->second;
        auto idx = result.index_of(v);
        double b = idx ? truncated.data()[*idx] : 0.0;
        double f = idx && fixed.weights.rank() == 1 ? fixed.weights.data()[*idx] : 0.0;
        double delta = std::abs(a - b);
        bool good = delta <= exact_tol && f >= b - std::max(cfg.tol, exact_tol) * 10;
        if (!good) {
            ok = false;
            offending.push_back(v.to_string());
        }
        std::cout << v.to_string() << "\t" << num(a) << "\t" << num(b) << "\t" << num(f) << "\t" << num(delta)
                  << (good ? "" : "\tMISMATCH") << "\n";
    }
    std::cout << "depth " << cfg.depth << " (interpreter bound " << cfg.depth + 1 << ")\n";
    std::cout << "fixed_point_status " << to_string(fixed.status) << "\n";
    if (!ok) {
        std::string list;
        for (const auto& s : offending)
            list += (list.empty() ? "" : ", ") + s;
        std::cerr << "fggc: comparison failed for " << list << "\n";
        return kExitMismatch;
    }
    return kExitOk;
}

int cmd_enumerate(const Config& cfg) {
    Loaded l = load(cfg);
    const Grammar& g = l.grammar;
    std::string x = cfg.nonterminal.empty() ? g.start : cfg.nonterminal;
    oracle::EnumerationOptions measure;
    if (cfg.measure == "functions") {
        if (!l.compiled)
            throw UsageError("--measure functions needs a program, not a grammar file");
        measure.counted = l.compiled->unit.function_labels;
    } else if (cfg.measure != "all") {
        throw UsageError("--measure must be 'all' or 'functions'");
    }
    auto trees = oracle::enumerate_derivations(g, x, cfg.depth, measure);
    std::map<const Rule*, std::size_t> rule_index;
    for (std::size_t i = 0; i < g.rules.size(); ++i)
        rule_index[&g.rules[i]] = i;
    auto show = [&](auto&& self, const DerivationTree& t) -> std::string {
        std::string s = "r" + std::to_string(rule_index.at(t.rule));
        if (t.children.empty())
            return s;
        s += "(";
        bool first = true;
        for (const auto& e : t.rule->rhs.edges) {
            auto it = t.children.find(e.id);
            if (it == t.children.end())
                continue;
            s += (first ? "" : " ") + self(self, *it->second);
            first = false;
        }
        return s + ")";
    };
    std::cout << "nonterminal " << x << "\n";
    std::cout << "trees " << trees.size() << "\n";
    for (const auto& t : trees) {
        WeightTensor w = oracle::brute_force_marginal(yield_graph(*t, g), g);
        std::cout << "height " << oracle::measure_height(*t, measure) << "\t" << show(show, *t) << "\tweight "
                  << num(w.sum()) << "\n";
    }
    return kExitOk;
}

int cmd_render(const Config& cfg) {
    Loaded l = load(cfg);
    if (cfg.format == "dot")
        write_output(cfg.out, render_dot(l.grammar));
    else if (cfg.format == "latex")
        write_output(cfg.out, render_latex(l.grammar));
    else if (cfg.format == "json")
        write_output(cfg.out, dump_grammar(l.grammar));
    else
        throw UsageError("--format must be dot, latex or json");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compile probabilistic programs to factor graph grammars and compute their weights."};
    app.require_subcommand(1);
    Config cfg;

    auto common = [&](CLI::App* sub) {
        sub->add_option("input", cfg.input, "program source, or an FGG .json file")->required();
        sub->add_option("--params", cfg.params, "parameter file (JSON)");
        sub->add_option("--passes", cfg.passes, "comma-separated passes, 'all' or 'none'");
    };
    auto solver = [&](CLI::App* sub) {
        sub->add_option("--tol", cfg.tol, "convergence tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--max-iter", cfg.max_iter, "iteration limit")->check(CLI::PositiveNumber);
    };

    auto* compile = app.add_subcommand("compile", "write the FGG as JSON");
    common(compile);
    compile->add_option("--out", cfg.out, "output file (default stdout)");
    compile->add_option("--provenance", cfg.provenance, "rule provenance file (default <out>.provenance.json)");

    auto* infer = app.add_subcommand("infer", "compute the weight of the start symbol");
    common(infer);
    solver(infer);

    auto* compare = app.add_subcommand("compare", "check the grammar against the reference interpreter");
    common(compare);
    solver(compare);
    compare->add_option("--depth", cfg.depth, "derivation height bound (call nesting)");
    compare->add_option("--fgg", cfg.fgg, "compare this grammar instead of the compiled one");

    auto* enumerate = app.add_subcommand("enumerate", "list derivation trees up to a height");
    common(enumerate);
    enumerate->add_option("--depth", cfg.depth, "height bound");
    enumerate->add_option("--nonterminal", cfg.nonterminal, "root nonterminal (default start)");
    enumerate->add_option("--measure", cfg.measure, "'all' rules or only 'functions' add height");

    auto* render = app.add_subcommand("render", "draw each rule");
    common(render);
    render->add_option("--format", cfg.format, "dot, latex or json");
    render->add_option("--out", cfg.out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : 1;
    }

    try {
        if (*compile)
            return cmd_compile(cfg);
        if (*infer)
            return cmd_infer(cfg);
        if (*compare)
            return cmd_compare(cfg);
        if (*enumerate)
            return cmd_enumerate(cfg);
        if (*render)
            return cmd_render(cfg);
    } catch (const FrontendError& e) {
        std::cerr << "fggc: error: " << e.what() << "\n";
        return kExitFrontend;
    } catch (const UsageError& e) {
        std::cerr << "fggc: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "fggc: internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
