#include "support.hpp"

#include "fggpp/inference.hpp"
#include "fggpp/oracle.hpp"

#include <gtest/gtest.h>

#include <set>

namespace fgg::oracle {
namespace {

using fgg::testing::compile_suite;
using fgg::testing::example_pcfg_grammar;
using fgg::testing::suite;

const fgg::testing::SuiteProgram& program(const std::string& name) {
    for (const auto& p : suite())
        if (p.name == name)
            return p;
    throw std::runtime_error("no suite program " + name);
}

TEST(Enumerate, BinaryTreesByHeight) {
    Compiled c = compile_suite(program("pcfg"));
    const Grammar& g = c.unit.grammar;
    EXPECT_EQ(enumerate_derivations(g, "d", 0).size(), 0u);
    EXPECT_EQ(enumerate_derivations(g, "d", 1).size(), 1u);
    EXPECT_EQ(enumerate_derivations(g, "d", 2).size(), 2u);
    EXPECT_EQ(enumerate_derivations(g, "d", 3).size(), 5u);
    EXPECT_EQ(enumerate_derivations(g, "d", 4).size(), 26u);
    for (const auto& t : enumerate_derivations(g, "d", 3))
        EXPECT_LE(measure_height(*t), 3u);
}

TEST(Enumerate, CountedLabelsDefineTheMeasure) {
    Grammar g = example_pcfg_grammar();
    EnumerationOptions only_x;
    only_x.counted = std::set<std::string>{"X"};
    // S' is free under this measure, so its trees match X's.
    EXPECT_EQ(enumerate_derivations(g, "S'", 2, only_x).size(), enumerate_derivations(g, "X", 2).size());
    EXPECT_EQ(enumerate_derivations(g, "S'", 2).size(), enumerate_derivations(g, "X", 1).size());

    EnumerationOptions tiny;
    tiny.tree_limit = 3;
    EXPECT_THROW(enumerate_derivations(g, "X", 4, tiny), OracleError);
}

TEST(BruteForce, MatchesTheHandComputedTree) {
    Grammar g = example_pcfg_grammar();
    EXPECT_NEAR(brute_force_marginal(fgg::testing::example_factor_graph(), g).sum(), 0.147, 1e-15);
}

TEST(Truncated, PcfgUnderTheFunctionMeasure) {
    Compiled c = compile_suite(program("pcfg"));
    EnumerationOptions functions;
    functions.counted = c.unit.function_labels;
    const Grammar& g = c.unit.grammar;
    EXPECT_DOUBLE_EQ(truncated_wX(g, g.start, 0, functions).sum(), 0.0);
    EXPECT_NEAR(truncated_wX(g, g.start, 1, functions).sum(), 0.7, 1e-15);
    EXPECT_NEAR(truncated_wX(g, g.start, 2, functions).sum(), 0.847, 1e-15);
}

TEST(Interpreter, PcfgByDepth) {
    Compiled c = compile_suite(program("pcfg"));
    ppl::Params params = ppl::read_params_file(fgg::testing::program_path("pcfg.json"));
    EXPECT_TRUE(interpret(c.program, params, 1).weights.empty());
    EXPECT_NEAR(interpret(c.program, params, 2).weights.at(Value::unit()), 0.7, 1e-15);
    EXPECT_NEAR(interpret(c.program, params, 3).weights.at(Value::unit()), 0.847, 1e-15);
    double previous = 0.0;
    for (std::size_t d = 2; d <= 6; ++d) {
        double now = interpret(c.program, params, d).weights.at(Value::unit());
        EXPECT_GE(now, previous);
        previous = now;
    }
}

TEST(Interpreter, NonRecursiveProgramsAreExact) {
    for (const char* name : {"constant", "let-chain", "if-case", "observe", "fail"}) {
        const auto& p = program(name);
        Compiled c = compile_suite(p);
        ppl::Params params = ppl::read_params_file(fgg::testing::program_path(p.params));
        Interpretation r = interpret(c.program, params, 1);
        for (const auto& [text, w] : p.limit)
            EXPECT_NEAR(r.weights[fgg::testing::value_of(text)], w, 1e-15) << name << " " << text;
    }
}

TEST(Interpreter, ControlPaths) {
    const auto& p = program("if-case");
    Compiled c = compile_suite(p);
    ppl::Params params = ppl::read_params_file(fgg::testing::program_path(p.params));
    Interpretation r = interpret(c.program, params, 1);
    std::set<std::string> live;
    for (const auto& [path, w] : r.paths)
        if (w > 0)
            live.insert(path);
    EXPECT_EQ(live, (std::set<std::string>{"TL", "TRT", "FL", "FRF"}));
    EXPECT_EQ(r.live_paths(), 4u);

    const auto& eo = program("mutual-recursion");
    Compiled ce = compile_suite(eo);
    ppl::Params pe = ppl::read_params_file(fgg::testing::program_path(eo.params));
    EXPECT_EQ(interpret(ce.program, pe, 3).live_paths(), 2u);
    EXPECT_EQ(interpret(ce.program, pe, 5).live_paths(), 4u);
}

// Without recursion, every derivation is shallow and the solver is exact.
TEST(Truncated, AcyclicProgramsMatchTheSolver) {
    for (const char* name : {"constant", "let-chain", "if-case", "observe", "fail"}) {
        Compiled c = compile_suite(program(name));
        const Grammar& g = c.unit.grammar;
        WeightTensor all = truncated_wX(g, g.start, 50);
        EXPECT_LT(sup_distance(all, query_start(g).weights), 1e-12) << name;
        Compiled raw = compile_suite(program(name), {});
        EXPECT_LT(sup_distance(truncated_wX(raw.unit.grammar, raw.unit.grammar.start, 50), all), 1e-12) << name;
    }
}

TEST(Inside, SmallGrammars) {
    ppl::Params params = ppl::read_params_file(fgg::testing::program_path("pcfgw.json"));
    CnfGrammar g = cnf_from_params(params, "p", "S");
    EXPECT_EQ(g.rules.size(), 4u);
    EXPECT_NEAR(inside_reference(g, {"a", "b"}), 0.6, 1e-15);
    EXPECT_NEAR(inside_reference(g, {"a"}), 0.4, 1e-15);
    EXPECT_DOUBLE_EQ(inside_reference(g, {"b", "a"}), 0.0);
    EXPECT_DOUBLE_EQ(inside_reference(g, {}), 0.0);

    CnfGrammar binary = cnf_from_params(ppl::read_params_file(fgg::testing::program_path("pcfg.json")), "p", "S");
    EXPECT_NEAR(inside_reference(binary, {"a", "a"}), 0.3 * 0.49, 1e-15);
    // Two bracketings of "a a a".
    EXPECT_NEAR(inside_reference(binary, {"a", "a", "a"}), 2 * 0.09 * 0.343, 1e-15);
    EXPECT_THROW(cnf_from_params(params, "q", "S"), OracleError);
}

}  // namespace
}  // namespace fgg::oracle
