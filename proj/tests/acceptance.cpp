// Acceptance checks: one line per criterion, nonzero exit if any fails.

#include "support.hpp"

#include "fggpp/inference.hpp"
#include "fggpp/oracle.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

namespace fgg {
namespace {

using testing::SuiteProgram;
using testing::compile_suite;
using testing::program_path;
using testing::read_text;
using testing::suite;
using testing::value_of;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(double x) {
    std::ostringstream s;
    s << std::setprecision(3) << x;
    return s.str();
}

ppl::Params suite_params(const SuiteProgram& p) {
    return ppl::read_params_file(program_path(p.params));
}

oracle::EnumerationOptions function_measure(const CompilationUnit& cu) {
    oracle::EnumerationOptions options;
    options.counted = cu.function_labels;
    return options;
}

// Weight the tensor gives `v`, or 0 when v is outside its domain.
double weight_of(const WeightTensor& t, const Grammar& g, const Value& v) {
    auto i = g.domain(t.domains().at(0)).index_of(v);
    if (!i)
        return 0.0;
    std::vector<std::size_t> idx{*i};
    return t.at(idx);
}

Outcome semantics_preservation() {
    Outcome o;
    double worst_truncation = 0.0, worst_limit = 0.0;
    std::size_t checks = 0;
    for (const auto& p : suite()) {
        Compiled c = compile_suite(p);
        const Grammar& g = c.unit.grammar;
        ppl::Params params = suite_params(p);
        for (std::size_t d = 1; d <= 4; ++d) {
            oracle::WeightMap interp = oracle::interpret(c.program, params, d + 1).weights;
            WeightTensor trunc = oracle::truncated_wX(g, g.start, d, function_measure(c.unit));
            const Domain& result = g.domain(trunc.domains().at(0));
            for (const auto& v : result.values) {
                double a = interp.count(v) ? interp.at(v) : 0.0;
                worst_truncation = std::max(worst_truncation, std::abs(a - weight_of(trunc, g, v)));
            }
            for (const auto& [v, w] : interp)
                if (!result.index_of(v))
                    worst_truncation = std::max(worst_truncation, w);
            ++checks;
        }
        StartQuery q = query_start(g);
        if (q.status != SolveStatus::Converged) {
            o.pass = false;
            o.detail += p.name + " did not converge; ";
            continue;
        }
        for (const auto& [text, w] : p.limit)
            worst_limit = std::max(worst_limit, std::abs(weight_of(q.weights, g, value_of(text)) - w));
    }
    o.pass = o.pass && worst_truncation <= 1e-12 && worst_limit <= 1e-8;
    o.detail += std::to_string(suite().size()) + " programs, " + std::to_string(checks) +
                " depth checks, max |interp - truncated| = " + fmt(worst_truncation) +
                ", max |fixed point - limit| = " + fmt(worst_limit);
    return o;
}

Outcome least_fixed_point() {
    Outcome o;
    auto run = [&](const std::string& params_file, double expected, const std::string& name) {
        CompileOptions options;
        Compiled c = compile_file(program_path("pcfg.ppl"), program_path(params_file), options);
        SolverOptions solver;
        solver.max_iter = 40;
        solver.tol = 1e-9;
        TensorMap previous;
        bool monotone = true;
        std::size_t sweeps = 0;
        solver.on_iteration = [&](const SolverState& s) {
            ++sweeps;
            for (const auto& [x, t] : s.tau)
                if (auto it = previous.find(x); it != previous.end())
                    for (std::size_t i = 0; i < t.size(); ++i)
                        monotone = monotone && t.data()[i] >= it->second.data()[i];
            previous = s.tau;
        };
        StartQuery q = query_start(c.unit.grammar, solver);
        double z = q.weights.sum();
        bool ok = std::abs(z - expected) < 1e-6 && monotone && sweeps <= 40;
        o.pass = o.pass && ok;
        o.detail += name + " Z = " + fmt(z) + " after " + std::to_string(q.iterations) + " iterations" +
                    (monotone ? " (monotone)" : " (NOT monotone)") + "; ";
    };
    run("pcfg.json", 1.0, "0.7/0.3");
    run("pcfg_subcritical.json", 0.25, "0.2/0.8");
    return o;
}

std::string cnf_params(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    nlohmann::json p;
    for (const char* lhs : {"S", "T"}) {
        std::vector<std::string> rhs = {"inl a", "inl b"};
        for (const char* y : {"S", "T"})
            for (const char* z : {"S", "T"})
                rhs.push_back(std::string("inr (") + y + ", " + z + ")");
        std::vector<double> w;
        double total = 0;
        for (std::size_t i = 0; i < rhs.size(); ++i)
            total += w.emplace_back(u(rng));
        for (std::size_t i = 0; i < rhs.size(); ++i)
            p["params"]["p"][lhs][rhs[i]] = w[i] / total;
    }
    return p.dump();
}

Value word_value(const std::vector<std::string>& word) {
    Value w = Value::nil();
    for (auto it = word.rbegin(); it != word.rend(); ++it)
        w = Value::pair(Value::atom(*it), w);
    return w;
}

Outcome cky_equivalence() {
    Outcome o;
    std::mt19937 rng(2024);
    std::string source = read_text(program_path("pcfgw.ppl"));
    double worst = 0.0;
    std::size_t strings = 0;
    for (int grammar = 0; grammar < 3; ++grammar) {
        ppl::Params params = ppl::params_from_json(nlohmann::json::parse(cnf_params(rng)));
        oracle::CnfGrammar cnf = oracle::cnf_from_params(params, "p", "S");
        for (std::size_t n = 0; n <= 6; ++n)
            for (std::size_t bits = 0; bits < (1u << n); ++bits) {
                std::vector<std::string> word;
                for (std::size_t k = 0; k < n; ++k)
                    word.push_back((bits >> k) & 1 ? "b" : "a");
                params.inputs["w"] = word_value(word);
                Compiled c = compile_source(source, params);
                StartQuery q = query_start(c.unit.grammar);
                double diff = std::abs(q.weights.sum() - oracle::inside_reference(cnf, word));
                worst = std::max(worst, diff);
                o.pass = o.pass && q.status == SolveStatus::Converged;
                ++strings;
            }
    }
    o.pass = o.pass && worst <= 1e-9;
    o.detail = "3 grammars, " + std::to_string(strings) + " strings, max |fgg - cky| = " + fmt(worst);
    return o;
}

Outcome yield_fidelity() {
    Grammar g = testing::example_pcfg_grammar();
    Hypergraph y = yield_graph(testing::example_derivation(g), g);
    Outcome o;
    o.pass = isomorphic(y, testing::example_factor_graph());
    o.detail = "yield has " + std::to_string(y.nodes.size()) + " nodes and " + std::to_string(y.edges.size()) +
               " factors";
    return o;
}

Outcome code_path_bijection() {
    Outcome o;
    std::size_t checks = 0;
    for (const auto& p : suite()) {
        if (!p.branching)
            continue;
        Compiled c = compile_suite(p);
        const Grammar& g = c.unit.grammar;
        ppl::Params params = suite_params(p);
        for (std::size_t d = 1; d <= 4; ++d) {
            std::size_t trees = 0;
            for (const auto& t : oracle::enumerate_derivations(g, g.start, d, function_measure(c.unit)))
                trees += oracle::brute_force_marginal(yield_graph(*t, g), g).sum() > 0.0;
            std::size_t paths = oracle::interpret(c.program, params, d + 1).live_paths();
            if (trees != paths) {
                o.pass = false;
                o.detail += p.name + " d=" + std::to_string(d) + ": " + std::to_string(trees) + " trees vs " +
                            std::to_string(paths) + " paths; ";
            }
            ++checks;
        }
    }
    o.detail += std::to_string(checks) + " (program, depth) pairs compared";
    return o;
}

WeightTensor precise_start(const Grammar& g) {
    SolverOptions options;
    options.tol = 1e-16;
    options.max_iter = 2000;
    return query_start(g, options).weights;
}

Outcome pass_safety() {
    Outcome o;
    double worst = 0.0;
    std::size_t firings = 0;
    for (const auto& p : suite()) {
        Compiled raw = compile_suite(p, {});
        WeightTensor reference = precise_start(raw.raw.grammar);
        for (Pass pass : all_passes()) {
            CompilationUnit cu = raw.raw;
            std::size_t size = grammar_size(cu.grammar);
            while (apply_pass(cu, pass)) {
                ++firings;
                std::size_t now = grammar_size(cu.grammar);
                if (now >= size) {
                    o.pass = false;
                    o.detail += p.name + " " + to_string(pass) + " did not shrink; ";
                }
                size = now;
            }
            worst = std::max(worst, sup_distance(precise_start(cu.grammar), reference));
        }
        Compiled all = compile_suite(p);
        worst = std::max(worst, sup_distance(precise_start(all.unit.grammar), reference));
    }
    o.pass = o.pass && worst <= 1e-12;
    o.detail += std::to_string(firings) + " single-pass firings, max |w_S change| = " + fmt(worst);
    return o;
}

Outcome elimination_scaling() {
    Outcome o;
    std::string source = read_text(program_path("pcfgw.ppl"));
    ppl::Params params = ppl::read_params_file(program_path("pcfgw.json"));
    std::vector<std::size_t> lengths = {4, 6, 8, 12};
    std::vector<double> ops;
    for (std::size_t n : lengths) {
        std::vector<std::string> word;
        for (std::size_t k = 0; k < n; ++k)
            word.push_back(k % 2 ? "b" : "a");
        params.inputs["w"] = word_value(word);
        Compiled c = compile_source(source, params);
        const Grammar& g = c.unit.grammar;
        SolverState s = solve_fixed_point(g);
        const Rule* binary = nullptr;
        for (const Rule* r : g.rules_for("d")) {
            std::size_t calls = 0;
            for (const auto& e : r->rhs.edges)
                calls += e.label == "d";
            if (calls == 2)
                binary = r;
        }
        if (!binary) {
            o.pass = false;
            o.detail = "no binary rule for d";
            return o;
        }
        EliminationPlan plan = plan_elimination(binary->rhs, g);
        // The cubic term comes from one step spanning three string positions.
        std::size_t positions = 0;
        for (const auto& id : plan.widest_scope)
            positions += g.domain(binary->rhs.find_node(id)->domain).size() == n + 1;
        if (positions != 3) {
            o.pass = false;
            o.detail += "widest step at n=" + std::to_string(n) + " spans " + std::to_string(positions) +
                        " string positions; ";
        }
        EliminationStats stats;
        rule_contribution(*binary, g, s.tau, &plan, &stats);
        ops.push_back(static_cast<double>(stats.table_ops));
    }
    for (std::size_t i = 0; i + 1 < lengths.size(); ++i) {
        double measured = ops[i + 1] / ops[i];
        double cubic = std::pow(static_cast<double>(lengths[i + 1]) / lengths[i], 3);
        double ratio = measured / cubic;
        o.pass = o.pass && ratio >= 0.5 && ratio <= 2.0;
        o.detail += "n=" + std::to_string(lengths[i]) + "->" + std::to_string(lengths[i + 1]) + " ops ratio " +
                    fmt(measured) + " vs cubic " + fmt(cubic) + "; ";
    }
    std::string counts;
    for (std::size_t i = 0; i < ops.size(); ++i)
        counts += (i ? ", " : "") + std::to_string(static_cast<long long>(ops[i]));
    o.detail += "table ops " + counts + "; widest step spans 3 string positions";
    return o;
}

Outcome divergence() {
    Outcome o;
    Compiled c = compile_file(program_path("pcfg.ppl"), program_path("pcfg_divergent.json"));
    SolverOptions options;
    options.max_iter = 10000;
    StartQuery q = query_start(c.unit.grammar, options);
    o.pass = q.status == SolveStatus::Divergent && q.iterations <= options.max_iter;
    std::string cmd = std::string(FGGC_PATH) + " infer " + program_path("pcfg.ppl") + " --params " +
                      program_path("pcfg_divergent.json") + " > /dev/null 2>&1";
    int raw = std::system(cmd.c_str());
    int code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    o.pass = o.pass && code == 3;
    o.detail = "solver status " + to_string(q.status) + " after " + std::to_string(q.iterations) +
               " iterations, fggc exit " + std::to_string(code);
    return o;
}

}  // namespace
}  // namespace fgg

int main() {
    using namespace fgg;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"semantics preservation", semantics_preservation},
        {"least fixed point", least_fixed_point},
        {"CKY equivalence", cky_equivalence},
        {"yield fidelity", yield_fidelity},
        {"code-path bijection", code_path_bijection},
        {"pass safety", pass_safety},
        {"elimination cost scaling", elimination_scaling},
        {"divergence robustness", divergence},
    };
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        all = all && o.pass;
        std::cout << "criterion " << i + 1 << " [" << criteria[i].first << "]: " << (o.pass ? "PASS" : "FAIL")
                  << " - " << o.detail << " (" << fmt(secs) << "s)" << std::endl;
    }
    return all ? 0 : 1;
}
