#pragma once

#include "fggpp/grammar.hpp"
#include "fggpp/tensor.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgg {

class InferenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using TensorMap = std::map<std::string, WeightTensor>;
using Assignment = std::map<std::string, Value>;

// Product of the factors of a terminal-only graph under a total assignment.
double assignment_weight(const Hypergraph& graph, const Grammar& g, const Assignment& xi);

// Order in which the internal nodes of a rhs are summed out.
struct EliminationPlan {
    std::vector<std::string> order;
    // Predicted table-entry visits, including the final product over the
    // external nodes.
    std::uint64_t cost = 0;
    // Nodes spanned by the largest intermediate table (eliminated node plus
    // its neighbours at that point).
    std::vector<std::string> widest_scope;
};

// Min-fill ordering over the moralized graph of `rhs`; ties go to the
// lexicographically smallest node id.
EliminationPlan plan_elimination(const Hypergraph& rhs, const Grammar& g);

struct EliminationStats {
    std::uint64_t table_ops = 0;
};

// Sums the weights of all assignments that agree on the external nodes.
// Nonterminal edges are read from `tau` (may be null for terminal-only
// graphs). Uses `plan` when given, otherwise plans with min-fill.
WeightTensor external_marginal(const Hypergraph& graph, const Grammar& g, const EliminationPlan* plan = nullptr,
                               EliminationStats* stats = nullptr, const TensorMap* tau = nullptr);

// One-level unrolling of the weight of `rule.lhs`: nonterminal edges act as
// factors with tables tau[label].
WeightTensor rule_contribution(const Rule& rule, const Grammar& g, const TensorMap& tau,
                               const EliminationPlan* plan = nullptr, EliminationStats* stats = nullptr);

// Domain names for the external nodes of nonterminal `nt`, taken from its
// rules or, when it has none, from any edge using it.
std::vector<std::string> nonterminal_domains(const Grammar& g, const std::string& nt);

enum class SolveStatus { Converged, NotConverged, Divergent };

std::string to_string(SolveStatus s);

enum class Schedule {
    // Strongly connected components of the nonterminal dependency graph are
    // solved callee-first; each component is iterated synchronously.
    ByComponent,
    // Every nonterminal is updated synchronously in every sweep.
    Global,
};

struct SolverState {
    TensorMap tau;
    std::size_t iteration = 0;
    double delta = 0.0;
    SolveStatus status = SolveStatus::NotConverged;
};

struct SolverOptions {
    double tol = 1e-10;
    std::size_t max_iter = 10000;
    double divergence_bound = 1e12;
    Schedule schedule = Schedule::ByComponent;
    // Called after every sweep with the updated state.
    std::function<void(const SolverState&)> on_iteration;
};

// Least fixed point of tau_X = sum over rules X -> R of rule_contribution,
// by Kleene iteration from all-zero tensors.
SolverState solve_fixed_point(const Grammar& g, const SolverOptions& options = {});

struct StartQuery {
    WeightTensor weights;
    SolveStatus status = SolveStatus::NotConverged;
    std::size_t iterations = 0;
    double delta = 0.0;
};

StartQuery query_start(const Grammar& g, const SolverOptions& options = {});

}  // namespace fgg
