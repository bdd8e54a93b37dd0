#include "support.hpp"

#include "fggpp/grammar_json.hpp"
#include "fggpp/inference.hpp"
#include "fggpp/ppl_parser.hpp"
#include "fggpp/ppl_passes.hpp"

#include <gtest/gtest.h>

#include <functional>

namespace fgg {
namespace {

using testing::compile_suite;
using testing::suite;
using testing::value_of;

const char* kCoin = R"({"params": {"coin": {"true": 0.4, "false": 0.6}}})";
// Atoms must be mentioned by the parameter file to be in scope.
const char* kAtoms = R"({"params": {"coin": {"true": 0.4, "false": 0.6}, "ab": {"a": 0.5, "b": 0.5}}})";

Compiled compile_text(const std::string& source, const char* params = kCoin, PassSet passes = {}) {
    CompileOptions options;
    options.passes = passes;
    return compile_source(source, ppl::params_from_json(nlohmann::json::parse(params)), options);
}

std::vector<const Rule*> rules_of(const Grammar& g, const std::string& lhs) {
    return g.rules_for(lhs);
}

std::vector<std::string> kinds(const Grammar& g, const Rule& r) {
    std::vector<std::string> out;
    for (const auto& e : r.rhs.edges)
        if (g.labels.at(e.label).is_terminal())
            out.push_back(factor_kind(e.label));
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t branch_nodes(const ppl::Expr& e) {
    std::size_t n = std::holds_alternative<ppl::If>(e.node) || std::holds_alternative<ppl::Case>(e.node);
    for (const auto& c : ppl::children(e))
        n += branch_nodes(*c);
    return n;
}

TEST(Translate, RuleCountLaw) {
    for (const auto& p : suite()) {
        Compiled c = compile_suite(p, {});
        std::size_t branches = branch_nodes(*c.program.main);
        for (const auto& f : c.program.functions)
            branches += branch_nodes(*f.body);
        std::size_t expected = 1 + c.program.functions.size() + ppl::count_subexpressions(c.program) + branches;
        EXPECT_EQ(c.raw.grammar.rules.size(), expected) << p.name;
        EXPECT_TRUE(validate(c.raw.grammar).empty()) << p.name;
    }
}

TEST(Translate, ArityLaw) {
    for (const auto& p : suite()) {
        Compiled c = compile_suite(p, {});
        std::function<void(const ppl::Expr&)> visit = [&](const ppl::Expr& e) {
            std::string label = "e@" + e.pos.to_string();
            const auto& t = c.typed.type_of(e);
            bool found = false;
            for (const auto& [name, l] : c.raw.grammar.labels)
                if (name == label || name.rfind(label + "#", 0) == 0)
                    found = found || l.arity == t.env.size() + 1;
            EXPECT_TRUE(found) << p.name << " " << label;
            for (const auto& ch : ppl::children(e))
                visit(*ch);
        };
        visit(*c.program.main);
        for (const auto& f : c.program.functions) {
            visit(*f.body);
            EXPECT_EQ(c.raw.grammar.labels.at(f.name).arity, f.params.size() + 1);
            EXPECT_TRUE(c.raw.function_labels.count(f.name));
        }
        EXPECT_EQ(c.raw.grammar.labels.at(c.raw.grammar.start).arity, 1u);
    }
}

TEST(Translate, ConstantProgram) {
    Compiled c = compile_text("true", "{}");
    const Grammar& g = c.raw.grammar;
    ASSERT_EQ(g.rules.size(), 2u);
    EXPECT_EQ(g.start, "S");
    EXPECT_EQ(kinds(g, g.rules[1]), std::vector<std::string>{"true"});
    EXPECT_EQ(g.factors.begin()->second.weights, std::vector<double>{1.0});
}

TEST(Translate, SampleHasADensityFactor) {
    Compiled c = compile_text("sample coin");
    const Grammar& g = c.raw.grammar;
    auto rs = rules_of(g, "e@1:1");
    ASSERT_EQ(rs.size(), 1u);
    EXPECT_EQ(kinds(g, *rs[0]), std::vector<std::string>{"density"});
    EXPECT_EQ(rs[0]->rhs.nodes.size(), 2u);
    for (const auto& [name, f] : g.factors) {
        if (factor_kind(name) != "density")
            continue;
        const Domain& dist = g.domain(f.domains[0]);
        const Domain& out = g.domain(f.domains[1]);
        std::size_t i = *dist.index_of(Value::dist("coin"));
        std::size_t t = *out.index_of(Value::boolean(true));
        EXPECT_DOUBLE_EQ(f.weights[i * out.size() + t], 0.4);
    }
}

TEST(Translate, ObserveWeighsTheObservedValue) {
    Compiled c = compile_text("observe true <- coin");
    auto rs = rules_of(c.raw.grammar, "e@1:1");
    ASSERT_EQ(rs.size(), 1u);
    EXPECT_EQ(kinds(c.raw.grammar, *rs[0]), std::vector<std::string>{"density"});
    EXPECT_NEAR(query_start(c.raw.grammar).weights.sum(), 0.4, 1e-12);
}

TEST(Translate, ConditionalsHaveOneRulePerArm) {
    Compiled c = compile_text("if sample coin then a else b", kAtoms);
    const Grammar& g = c.raw.grammar;
    auto rs = rules_of(g, "e@1:1");
    ASSERT_EQ(rs.size(), 2u);
    EXPECT_EQ(kinds(g, *rs[0]), std::vector<std::string>{"guard true"});
    EXPECT_EQ(kinds(g, *rs[1]), std::vector<std::string>{"guard false"});
    EXPECT_TRUE(c.raw.branch_labels.count("e@1:1"));

    c = compile_text("case inl a of inl x => x | inr y => b", kAtoms);
    rs = rules_of(c.raw.grammar, "e@1:1");
    ASSERT_EQ(rs.size(), 2u);
    EXPECT_EQ(kinds(c.raw.grammar, *rs[0]), std::vector<std::string>{"guard inl"});
    EXPECT_EQ(kinds(c.raw.grammar, *rs[1]), std::vector<std::string>{"guard inr"});
    // The binder is an internal node of each arm.
    EXPECT_NE(rs[0]->rhs.find_node("$x"), nullptr);
    EXPECT_FALSE(rs[0]->rhs.is_external("$x"));
}

TEST(Translate, BuiltinTablesAreIndicators) {
    Compiled c = compile_text("let x = sample coin in x = true");
    for (const auto& [name, f] : c.raw.grammar.factors) {
        if (factor_kind(name) != "=")
            continue;
        const Domain& a = c.raw.grammar.domain(f.domains[0]);
        const Domain& b = c.raw.grammar.domain(f.domains[1]);
        const Domain& r = c.raw.grammar.domain(f.domains[2]);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j)
                for (std::size_t k = 0; k < r.size(); ++k) {
                    bool truth = r.values[k] == Value::boolean(a.values[i] == b.values[j]);
                    EXPECT_EQ(f.weights[(i * b.size() + j) * r.size() + k], truth ? 1.0 : 0.0);
                }
    }

    c = compile_text("fst((a, b))", kAtoms);
    bool seen = false;
    for (const auto& [name, f] : c.raw.grammar.factors) {
        if (factor_kind(name) != "fst")
            continue;
        seen = true;
        const Domain& in = c.raw.grammar.domain(f.domains[0]);
        const Domain& out = c.raw.grammar.domain(f.domains[1]);
        std::size_t i = *in.index_of(value_of("(a, b)"));
        std::size_t o = *out.index_of(value_of("a"));
        EXPECT_EQ(f.weights[i * out.size() + o], 1.0);
    }
    EXPECT_TRUE(seen);
}

TEST(Translate, PcfgProgramsCompileToSmallGrammars) {
    Compiled pcfg = compile_suite(suite()[7]);
    ASSERT_EQ(pcfg.unit.grammar.rules.size(), 3u);
    const Grammar& g = pcfg.unit.grammar;
    auto d = rules_of(g, "d");
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(kinds(g, *d[0]), (std::vector<std::string>{"density", "guard inl", "lookup p", "unit"}));
    EXPECT_EQ(kinds(g, *d[1]), (std::vector<std::string>{"density", "fst", "guard inr", "lookup p", "snd"}));
    std::size_t calls = 0;
    for (const auto& e : d[1]->rhs.edges)
        calls += e.label == "d";
    EXPECT_EQ(calls, 2u);

    Compiled pcfgw = compile_suite(suite()[8]);
    EXPECT_EQ(pcfgw.unit.grammar.rules.size(), 5u);
}

TEST(Simplify, EmptyPassSetIsTheIdentity) {
    for (const auto& p : suite()) {
        Compiled c = compile_suite(p, {});
        EXPECT_EQ(dump_grammar(c.unit.grammar), dump_grammar(c.raw.grammar)) << p.name;
        EXPECT_TRUE(c.unit.pass_log.empty());
    }
}

WeightTensor exact_start(const Grammar& g) {
    SolverOptions options;
    options.tol = 1e-15;
    options.max_iter = 100000;
    return query_start(g, options).weights;
}

TEST(Simplify, EachPassPreservesTheStartWeightAndShrinks) {
    for (const auto& p : suite()) {
        Compiled c = compile_suite(p, {});
        WeightTensor reference = exact_start(c.raw.grammar);
        for (Pass pass : all_passes()) {
            CompilationUnit cu = c.raw;
            std::size_t size = grammar_size(cu.grammar);
            int fired = 0;
            while (apply_pass(cu, pass)) {
                ++fired;
                std::size_t now = grammar_size(cu.grammar);
                EXPECT_LT(now, size) << p.name << " " << to_string(pass);
                size = now;
                ASSERT_TRUE(validate(cu.grammar).empty()) << p.name << " " << to_string(pass);
                EXPECT_LT(sup_distance(exact_start(cu.grammar), reference), 1e-9) << p.name << " " << to_string(pass);
                ASSERT_LT(fired, 1000);
            }
            EXPECT_EQ(cu.provenance.size(), cu.grammar.rules.size());
        }
        Compiled all = compile_suite(p);
        EXPECT_LT(sup_distance(exact_start(all.unit.grammar), reference), 1e-9) << p.name;
        EXPECT_LT(grammar_size(all.unit.grammar), grammar_size(c.raw.grammar)) << p.name;
        EXPECT_LE(all.unit.grammar.rules.size(), c.raw.grammar.rules.size()) << p.name;
    }
}

TEST(Simplify, PassNamesRoundTrip) {
    for (Pass p : all_passes())
        EXPECT_EQ(parse_pass(to_string(p)), p);
    EXPECT_FALSE(parse_pass("fold"));
}

TEST(Compile, Deterministic) {
    for (const auto& p : suite()) {
        EXPECT_EQ(dump_grammar(compile_suite(p).unit.grammar), dump_grammar(compile_suite(p).unit.grammar));
    }
}

TEST(Compile, ProvenanceCoversEveryRule) {
    for (const auto& p : suite()) {
        Compiled c = compile_suite(p);
        ASSERT_EQ(c.unit.provenance.size(), c.unit.grammar.rules.size()) << p.name;
        for (const auto& origins : c.unit.provenance) {
            ASSERT_FALSE(origins.empty());
            for (const auto& o : origins)
                EXPECT_GT(o.pos.line, 0);
        }
        auto j = provenance_to_json(c.unit);
        EXPECT_EQ(j.at("rules").size(), c.unit.grammar.rules.size());
    }
}

TEST(Compile, FrontendErrorsMentionPositions) {
    try {
        compile_text("let x = sample coin in\n  y");
        FAIL();
    } catch (const FrontendError& e) {
        EXPECT_NE(std::string(e.what()).find("2:3"), std::string::npos) << e.what();
    }
    EXPECT_THROW(compile_text("let x = in x"), FrontendError);
    EXPECT_THROW(compile_text("sample nowhere"), FrontendError);
}

}  // namespace
}  // namespace fgg
