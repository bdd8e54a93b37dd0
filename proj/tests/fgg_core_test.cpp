#include "support.hpp"

#include "fggpp/grammar_json.hpp"
#include "fggpp/inference.hpp"
#include "fggpp/oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

namespace fgg {
namespace {

using testing::example_derivation;
using testing::example_factor_graph;
using testing::example_pcfg_grammar;

TEST(Value, TextRoundTrip) {
    for (const char* text : {"a", "true", "false", "unit", "nil", "(a, b)", "inl a", "inr (S, S)", "<p[S]>",
                             "(a, (b, nil))", "inl (inr unit)"}) {
        auto v = parse_value(text);
        ASSERT_TRUE(v) << text;
        EXPECT_EQ(parse_value(v->to_string()), v) << text;
    }
    EXPECT_FALSE(parse_value("(a, "));
    EXPECT_FALSE(parse_value("inl"));
}

TEST(Value, TotalOrderAndEquality) {
    Value a = Value::atom("a"), b = Value::atom("b");
    EXPECT_LT(a, b);
    EXPECT_EQ(Value::pair(a, b), Value::pair(a, b));
    EXPECT_NE(Value::inl(a), Value::inr(a));
    EXPECT_TRUE(Value::nil().is_nil());
    EXPECT_EQ(Value(), Value::unit());
}

TEST(Value, JsonRoundTrip) {
    for (const char* text : {"a", "true", "unit", "(a, b)", "inl a", "inr (S, S)", "<p[S]>"}) {
        Value v = *parse_value(text);
        EXPECT_EQ(value_from_json(value_to_json(v)), v) << text;
    }
    EXPECT_EQ(value_to_json(Value::unit()), nlohmann::json("unit"));
    EXPECT_EQ(value_from_json(nlohmann::json::parse(R"({"list": [{"atom": "a"}]})")),
              Value::pair(Value::atom("a"), Value::nil()));
}

TEST(Yield, SingleRuleWithoutNonterminalsIsItsRhs) {
    Grammar g = example_pcfg_grammar();
    DerivationTree t;
    t.rule = &g.rules[2];
    EXPECT_TRUE(isomorphic(yield_graph(t, g), g.rules[2].rhs));
}

TEST(Yield, ExampleDerivationGivesTheTreeFactorGraph) {
    Grammar g = example_pcfg_grammar();
    Hypergraph y = yield_graph(example_derivation(g), g);
    EXPECT_EQ(y.nodes.size(), 5u);
    EXPECT_EQ(y.edges.size(), 4u);
    EXPECT_TRUE(y.ext.empty());
    EXPECT_TRUE(isomorphic(y, example_factor_graph()));
}

TEST(Yield, MissingChildIsAStructuralError) {
    Grammar g = example_pcfg_grammar();
    DerivationTree t;
    t.rule = &g.rules[1];
    EXPECT_THROW(yield_graph(t, g), StructuralError);
}

TEST(Yield, NodeCountAndArityOverAllShallowTrees) {
    Grammar g = example_pcfg_grammar();
    for (const std::string x : {"S'", "X"}) {
        auto trees = oracle::enumerate_derivations(g, x, 4);
        ASSERT_FALSE(trees.empty());
        for (const auto& t : trees) {
            // Every replaced edge merges its attachments into existing nodes.
            std::size_t expected = 0;
            auto count = [&](auto&& self, const DerivationTree& d, bool root) -> void {
                expected += d.rule->rhs.nodes.size() - (root ? 0 : d.rule->rhs.ext.size());
                for (const auto& [id, c] : d.children)
                    self(self, *c, false);
            };
            count(count, *t, true);
            Hypergraph y = yield_graph(*t, g);
            EXPECT_EQ(y.nodes.size(), expected);
            EXPECT_EQ(y.ext.size(), g.labels.at(x).arity);
        }
    }
}

TEST(Validate, ExampleGrammarIsClean) {
    EXPECT_TRUE(validate(example_pcfg_grammar()).empty());
}

TEST(Validate, WrongAttachmentCountIsReportedOnce) {
    Grammar g = example_pcfg_grammar();
    g.rules[1].rhs.edges[0].att.pop_back();
    auto d = validate(g);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].invariant, "edge-arity");
    EXPECT_NE(d[0].location.find("e1"), std::string::npos);
}

TEST(Validate, TerminalWithoutTableIsReportedOnce) {
    Grammar g = example_pcfg_grammar();
    g.factors.erase("unary");
    auto d = validate(g);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].invariant, "factor-present");
}

TEST(Validate, RepeatedExternalNodeIsRejected) {
    Grammar g = example_pcfg_grammar();
    g.labels["X"].arity = 2;
    for (auto& r : g.rules)
        if (r.lhs == "X")
            r.rhs.ext = {"N1", "N1"};
    bool found = false;
    for (const auto& d : validate(g))
        found = found || d.invariant == "ext-distinct";
    EXPECT_TRUE(found);
}

TEST(Isomorphic, IdentityRenamingAndExternalOrder) {
    Hypergraph h = example_factor_graph();
    EXPECT_TRUE(isomorphic(h, h));

    Hypergraph renamed = h;
    for (auto& n : renamed.nodes)
        n.id = "x" + n.id;
    for (auto& e : renamed.edges) {
        e.id = "y" + e.id;
        for (auto& a : e.att)
            a = "x" + a;
    }
    std::reverse(renamed.edges.begin(), renamed.edges.end());
    EXPECT_TRUE(isomorphic(h, renamed));

    Hypergraph a = h, b = h;
    a.ext = {"N2", "N3"};
    b.ext = {"N3", "N2"};
    EXPECT_FALSE(isomorphic(a, b));

    Hypergraph swapped = h;
    std::swap(swapped.edges[1].att[1], swapped.edges[1].att[0]);
    EXPECT_FALSE(isomorphic(h, swapped));
}

void expect_same_grammar(const Grammar& a, const Grammar& b) {
    ASSERT_EQ(a.rules.size(), b.rules.size());
    EXPECT_EQ(a.start, b.start);
    for (std::size_t i = 0; i < a.rules.size(); ++i) {
        EXPECT_EQ(a.rules[i].lhs, b.rules[i].lhs);
        EXPECT_TRUE(isomorphic(a.rules[i].rhs, b.rules[i].rhs));
    }
    ASSERT_EQ(a.factors.size(), b.factors.size());
    for (const auto& [name, f] : a.factors) {
        EXPECT_EQ(f.weights, b.factors.at(name).weights) << name;
        EXPECT_EQ(f.domains, b.factors.at(name).domains) << name;
    }
    for (const auto& [name, d] : a.domains)
        EXPECT_EQ(d.values, b.domains.at(name).values) << name;
}

TEST(Json, RoundTripExampleAndSuiteGrammars) {
    Grammar g = example_pcfg_grammar();
    expect_same_grammar(g, grammar_from_json(grammar_to_json(g)));
    for (const auto& p : testing::suite()) {
        for (const auto& passes : {PassSet{}, all_passes()}) {
            Grammar c = testing::compile_suite(p, passes).unit.grammar;
            Grammar back = grammar_from_json(nlohmann::json::parse(dump_grammar(c)));
            expect_same_grammar(c, back);
            EXPECT_TRUE(validate(back).empty()) << p.name;
        }
    }
}

TEST(Json, MalformedGrammarIsAFormatError) {
    EXPECT_THROW(grammar_from_json(nlohmann::json::parse(R"({"start": 3})")), FormatError);
    auto j = grammar_to_json(example_pcfg_grammar());
    j["domains"]["D"][0] = {{"mystery", 1}};
    EXPECT_THROW(grammar_from_json(j), FormatError);
}

// Random small grammars: whenever validate accepts one and the start symbol
// has a rule, the solver must run without structural errors.
TEST(Validate, AcceptedRandomGrammarsAreSolvable) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> weight(0.0, 0.6);
    int accepted = 0;
    for (int trial = 0; trial < 200; ++trial) {
        Grammar g;
        g.start = "S";
        g.domains["B"] = Domain{"B", {Value::boolean(false), Value::boolean(true)}};
        g.labels["S"] = EdgeLabel{"S", 1, LabelKind::Nonterminal};
        g.labels["Y"] = EdgeLabel{"Y", 2, LabelKind::Nonterminal};
        g.labels["f"] = EdgeLabel{"f", 2, LabelKind::Terminal};
        g.factors["f"] = FactorTable{"f", {"B", "B"}, {weight(rng), weight(rng), weight(rng), weight(rng)}};
        int nrules = 1 + static_cast<int>(rng() % 4);
        for (int r = 0; r < nrules; ++r) {
            Rule rule;
            rule.lhs = rng() % 2 ? "S" : "Y";
            std::size_t arity = g.labels[rule.lhs].arity;
            int nodes = 1 + static_cast<int>(rng() % 3);
            for (int n = 0; n < nodes; ++n)
                rule.rhs.nodes.push_back({"n" + std::to_string(n), "B"});
            for (std::size_t k = 0; k < arity && k < rule.rhs.nodes.size(); ++k)
                rule.rhs.ext.push_back(rule.rhs.nodes[k].id);
            int edges = static_cast<int>(rng() % 3);
            for (int e = 0; e < edges; ++e) {
                std::string label = std::vector<std::string>{"f", "Y", "S", "f"}[rng() % 4];
                Edge edge{"e" + std::to_string(e), label, {}};
                for (std::size_t k = 0; k < g.labels[label].arity; ++k)
                    edge.att.push_back(rule.rhs.nodes[rng() % rule.rhs.nodes.size()].id);
                rule.rhs.edges.push_back(edge);
            }
            g.rules.push_back(rule);
        }
        if (!validate(g).empty() || g.rules_for("S").empty())
            continue;
        ++accepted;
        SolverOptions options;
        options.max_iter = 200;
        EXPECT_NO_THROW(solve_fixed_point(g, options)) << dump_grammar(g);
    }
    EXPECT_GT(accepted, 20);
}

}  // namespace
}  // namespace fgg
