#pragma once

// Shared fixtures: the program suite with hand-derived limits, and the
// small PCFG grammar used for the yield and solver tests.

#include "fggpp/grammar.hpp"
#include "fggpp/pipeline.hpp"
#include "fggpp/ppl_parser.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fgg::testing {

inline std::string program_path(const std::string& file) {
    return std::string(FGGPP_PROGRAMS_DIR) + "/" + file;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

struct SuiteProgram {
    std::string name;
    std::string source;
    std::string params;
    // Exact weights of the program, worked out by hand.
    std::vector<std::pair<std::string, double>> limit;
    bool branching = false;
};

inline const std::vector<SuiteProgram>& suite() {
    static const std::vector<SuiteProgram> programs = {
        {"constant", "true.ppl", "empty.json", {{"true", 1.0}}, false},
        {"let-chain", "lists.ppl", "coin.json", {{"true", 0.3 * 0.3 + 0.7 * 0.7}, {"false", 2 * 0.3 * 0.7}}, false},
        {"if-case", "branching.ppl", "branching.json", {{"a", 0.3 * 0.7 + 0.7 * 0.4}, {"b", 0.3 * 0.3 + 0.7 * 0.6}}, true},
        {"observe", "observe.ppl", "observe.json", {{"a", 0.6 * 0.9}, {"b", 0.4 * 0.2}}, false},
        {"fail", "reject.ppl", "coin.json", {{"true", 0.3}, {"false", 0.7 * 0.3}}, true},
        // even = 0.4 + 0.6 odd, odd = 0.6 even (for "true").
        {"mutual-recursion", "evenodd.ppl", "evenodd.json", {{"true", 0.4 / 0.64}, {"false", 0.24 / 0.64}}, true},
        // Stop with probability 1/2 at each step around a 3-cycle.
        {"geometric", "geometric.ppl", "geometric.json", {{"z", 4.0 / 7}, {"o", 2.0 / 7}, {"t", 1.0 / 7}}, true},
        // Least root of Z = 0.7 + 0.3 Z^2.
        {"pcfg", "pcfg.ppl", "pcfg.json", {{"unit", 1.0}}, true},
        // The single parse S -> A B of "ab".
        {"pcfg-string", "pcfgw.ppl", "pcfgw.json", {{"unit", 0.6}}, true},
    };
    return programs;
}

inline Compiled compile_suite(const SuiteProgram& p, const PassSet& passes = all_passes()) {
    CompileOptions options;
    options.passes = passes;
    return compile_file(program_path(p.source), program_path(p.params), options);
}

inline Value value_of(const std::string& text) {
    return *parse_value(text);
}

// The PCFG grammar whose derivations include the five-node factor graph
// below; a single domain {S, a} with p(S -> S S) = 0.3, p(S -> a) = 0.7.
inline Grammar example_pcfg_grammar(double binary = 0.3, double unary = 0.7) {
    Grammar g;
    g.start = "S'";
    g.domains["D"] = Domain{"D", {Value::atom("S"), Value::atom("a")}};
    g.labels["S'"] = EdgeLabel{"S'", 0, LabelKind::Nonterminal};
    g.labels["X"] = EdgeLabel{"X", 1, LabelKind::Nonterminal};
    g.labels["is_S"] = EdgeLabel{"is_S", 1, LabelKind::Terminal};
    g.labels["binary"] = EdgeLabel{"binary", 3, LabelKind::Terminal};
    g.labels["unary"] = EdgeLabel{"unary", 2, LabelKind::Terminal};
    g.factors["is_S"] = FactorTable{"is_S", {"D"}, {1.0, 0.0}};
    // Row-major over (N1, N2, N3): only S -> S S has weight.
    std::vector<double> b(8, 0.0);
    b[0] = binary;
    g.factors["binary"] = FactorTable{"binary", {"D", "D", "D"}, b};
    // (N1, W2): only S -> a.
    g.factors["unary"] = FactorTable{"unary", {"D", "D"}, {0.0, unary, 0.0, 0.0}};

    Hypergraph start;
    start.nodes = {{"N1", "D"}};
    start.edges = {{"e1", "is_S", {"N1"}}, {"e2", "X", {"N1"}}};
    g.rules.push_back({"S'", start});

    Hypergraph bin;
    bin.nodes = {{"N1", "D"}, {"N2", "D"}, {"N3", "D"}};
    bin.ext = {"N1"};
    bin.edges = {{"e1", "binary", {"N1", "N2", "N3"}}, {"e2", "X", {"N2"}}, {"e3", "X", {"N3"}}};
    g.rules.push_back({"X", bin});

    Hypergraph un;
    un.nodes = {{"N1", "D"}, {"W2", "D"}};
    un.ext = {"N1"};
    un.edges = {{"e1", "unary", {"N1", "W2"}}};
    g.rules.push_back({"X", un});
    return g;
}

// S' -> X(binary) -> X(unary), X(unary).
inline DerivationTree example_derivation(const Grammar& g) {
    auto leaf = [&] {
        auto t = std::make_shared<DerivationTree>();
        t->rule = &g.rules[2];
        return t;
    };
    auto mid = std::make_shared<DerivationTree>();
    mid->rule = &g.rules[1];
    mid->children["e2"] = leaf();
    mid->children["e3"] = leaf();
    DerivationTree root;
    root.rule = &g.rules[0];
    root.children["e2"] = mid;
    return root;
}

// The tree-shaped factor graph: N1 = S, p(N1 -> N2 N3), p(N2 -> W4),
// p(N3 -> W5).
inline Hypergraph example_factor_graph() {
    Hypergraph h;
    h.nodes = {{"N1", "D"}, {"N2", "D"}, {"N3", "D"}, {"W4", "D"}, {"W5", "D"}};
    h.edges = {{"f0", "is_S", {"N1"}},
               {"f1", "binary", {"N1", "N2", "N3"}},
               {"f2", "unary", {"N2", "W4"}},
               {"f3", "unary", {"N3", "W5"}}};
    return h;
}

}  // namespace fgg::testing
