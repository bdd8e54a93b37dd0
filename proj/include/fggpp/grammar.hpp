#pragma once

#include "fggpp/value.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgg {

class StructuralError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class LabelKind { Terminal, Nonterminal };

struct EdgeLabel {
    std::string name;
    std::size_t arity = 0;
    LabelKind kind = LabelKind::Nonterminal;

    bool is_terminal() const { return kind == LabelKind::Terminal; }
};

struct Node {
    std::string id;
    std::string domain;
};

struct Edge {
    std::string id;
    std::string label;
    // Attachment order is significant.
    std::vector<std::string> att;
};

struct Hypergraph {
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::vector<std::string> ext;

    const Node* find_node(const std::string& id) const;
    bool is_external(const std::string& id) const;
};

struct Rule {
    std::string lhs;
    Hypergraph rhs;
};

struct Domain {
    std::string name;
    std::vector<Value> values;

    std::size_t size() const { return values.size(); }
    // Position of v, or nullopt when v is outside the domain.
    std::optional<std::size_t> index_of(const Value& v) const;
};

// Dense factor table in row-major order over `domains`.
struct FactorTable {
    std::string label;
    std::vector<std::string> domains;
    std::vector<double> weights;
};

// A factor graph grammar: an HRG over `labels` with a finite domain per node
// and a weight table per terminal label.
struct Grammar {
    std::map<std::string, EdgeLabel> labels;
    std::vector<Rule> rules;
    std::string start;
    std::map<std::string, Domain> domains;
    std::map<std::string, FactorTable> factors;

    const EdgeLabel* find_label(const std::string& name) const;
    const Domain& domain(const std::string& name) const;
    std::vector<const Rule*> rules_for(const std::string& lhs) const;
    // Domains of the external nodes of any rule for `nt`, or nullopt if the
    // nonterminal has no rules.
    std::optional<std::vector<std::string>> ext_domains(const std::string& nt) const;
};

// Child derivations are keyed by the nonterminal edge id they replace.
struct DerivationTree {
    const Rule* rule = nullptr;
    std::map<std::string, std::shared_ptr<const DerivationTree>> children;

    // Height counting every rule on the longest root-to-leaf path.
    std::size_t height() const;
};

// Replaces every nonterminal edge by the yield of its child derivation.
// Throws StructuralError when a child is missing or has the wrong arity.
Hypergraph yield_graph(const DerivationTree& tree, const Grammar& g);

struct Diagnostic {
    std::string invariant;
    std::string location;
    std::string message;
};

std::vector<Diagnostic> validate(const Grammar& g);

// True iff a bijection of nodes and edges preserves edge labels, attachment
// order, node domains, and the external-node sequence.
bool isomorphic(const Hypergraph& a, const Hypergraph& b);

}  // namespace fgg
