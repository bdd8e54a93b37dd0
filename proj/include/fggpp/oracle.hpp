#pragma once

// Reference implementations used to check the compiler and the solver. They
// share data types with the rest of the library but none of its inference
// code: derivations are summed by brute force, programs are run by a direct
// interpreter, and strings are parsed by textbook CKY.

#include "fggpp/grammar.hpp"
#include "fggpp/ppl_ast.hpp"
#include "fggpp/ppl_params.hpp"
#include "fggpp/tensor.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgg::oracle {

class OracleError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using TreePtr = std::shared_ptr<const DerivationTree>;

struct EnumerationOptions {
    // Labels whose rules add to a tree's height. Unset means every rule
    // counts. Labels outside the set must not be recursive.
    std::optional<std::set<std::string>> counted;
    // Abort with OracleError beyond this many trees.
    std::size_t tree_limit = 200000;
};

// Height of `tree` under the measure in `options`.
std::size_t measure_height(const DerivationTree& tree, const EnumerationOptions& options = {});

// All X-derivation trees of height <= max_height, ordered by rule order and
// then by the children in edge order.
std::vector<TreePtr> enumerate_derivations(const Grammar& g, const std::string& x, std::size_t max_height,
                                           const EnumerationOptions& options = {});

// Sum over assignments of the yield's factor product, one entry per
// assignment to the external nodes.
WeightTensor brute_force_marginal(const Hypergraph& graph, const Grammar& g);

// Sum of brute_force_marginal over the trees of height <= max_height.
WeightTensor truncated_wX(const Grammar& g, const std::string& x, std::size_t max_height,
                          const EnumerationOptions& options = {});

using WeightMap = std::map<Value, double>;

struct Interpretation {
    WeightMap weights;
    // Total weight per control path. A path is the sequence of branch
    // decisions taken (T/F for if, L/R for case) in evaluation order.
    std::map<std::string, double> paths;

    std::size_t live_paths() const;
};

// Runs a desugared, name-resolved program, expanding every sample over its
// support. The main expression runs at depth 1 and each call adds one;
// branches that would exceed depth_bound are dropped.
Interpretation interpret(const ppl::Program& p, const ppl::Params& params, std::size_t depth_bound);

struct CnfRule {
    std::string lhs;
    // One terminal, or two nonterminals.
    std::vector<std::string> rhs;
    double weight = 0.0;
};

struct CnfGrammar {
    std::string start;
    std::vector<CnfRule> rules;
};

// Reads table `table` of a parameter file as a grammar in Chomsky normal
// form: row X holds inl a for X -> a and inr (Y, Z) for X -> Y Z.
CnfGrammar cnf_from_params(const ppl::Params& params, const std::string& table, const std::string& start);

// Inside probability of `word` by CKY.
double inside_reference(const CnfGrammar& g, const std::vector<std::string>& word);

}  // namespace fgg::oracle
