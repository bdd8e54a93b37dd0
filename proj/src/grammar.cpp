#include "fggpp/grammar.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace fgg {

const Node* Hypergraph::find_node(const std::string& id) const {
    for (const auto& n : nodes)
        if (n.id == id)
            return &n;
    return nullptr;
}

bool Hypergraph::is_external(const std::string& id) const {
    return std::find(ext.begin(), ext.end(), id) != ext.end();
}

std::optional<std::size_t> Domain::index_of(const Value& v) const {
    auto it = std::lower_bound(values.begin(), values.end(), v);
    if (it != values.end() && *it == v)
        return static_cast<std::size_t>(it - values.begin());
    // Domains read from files need not be sorted.
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] == v)
            return i;
    return std::nullopt;
}

const EdgeLabel* Grammar::find_label(const std::string& name) const {
    auto it = labels.find(name);
    return it == labels.end() ? nullptr : &it->second;
}

const Domain& Grammar::domain(const std::string& name) const {
    auto it = domains.find(name);
    if (it == domains.end())
        throw StructuralError("unknown domain '" + name + "'");
    return it->second;
}

std::vector<const Rule*> Grammar::rules_for(const std::string& lhs) const {
    std::vector<const Rule*> out;
    for (const auto& r : rules)
        if (r.lhs == lhs)
            out.push_back(&r);
    return out;
}

std::optional<std::vector<std::string>> Grammar::ext_domains(const std::string& nt) const {
    for (const auto& r : rules) {
        if (r.lhs != nt)
            continue;
        std::vector<std::string> out;
        for (const auto& id : r.rhs.ext) {
            const Node* n = r.rhs.find_node(id);
            out.push_back(n ? n->domain : std::string());
        }
        return out;
    }
    return std::nullopt;
}

std::size_t DerivationTree::height() const {
    std::size_t h = 0;
    for (const auto& [edge, child] : children)
        h = std::max(h, child->height());
    return h + 1;
}

namespace {

// Yield of `tree` with internal node and edge ids prefixed by `prefix`.
Hypergraph yield_prefixed(const DerivationTree& tree, const Grammar& g, const std::string& prefix) {
    if (!tree.rule)
        throw StructuralError("derivation node without a rule");
    const Hypergraph& rhs = tree.rule->rhs;
    Hypergraph out;
    auto rename = [&](const std::string& id) { return prefix + id; };
    for (const auto& n : rhs.nodes)
        out.nodes.push_back({rename(n.id), n.domain});
    for (const auto& id : rhs.ext)
        out.ext.push_back(rename(id));

    for (const auto& e : rhs.edges) {
        const EdgeLabel* label = g.find_label(e.label);
        if (!label)
            throw StructuralError("edge '" + e.id + "' has undeclared label '" + e.label + "'");
        if (label->is_terminal()) {
            Edge copy{rename(e.id), e.label, {}};
            for (const auto& a : e.att)
                copy.att.push_back(rename(a));
            out.edges.push_back(std::move(copy));
            continue;
        }
        auto it = tree.children.find(e.id);
        if (it == tree.children.end() || !it->second)
            throw StructuralError("missing child derivation for nonterminal edge '" + e.id + "'");
        const DerivationTree& child = *it->second;
        if (!child.rule || child.rule->lhs != e.label)
            throw StructuralError("child derivation of edge '" + e.id + "' does not derive '" + e.label + "'");
        std::string child_prefix = prefix + e.id + "/";
        Hypergraph sub = yield_prefixed(child, g, child_prefix);
        if (sub.ext.size() != e.att.size())
            throw StructuralError("arity mismatch replacing edge '" + e.id + "'");

        // External nodes of the child fuse with the edge's attachment nodes.
        std::map<std::string, std::string> fuse;
        for (std::size_t i = 0; i < sub.ext.size(); ++i)
            fuse[sub.ext[i]] = rename(e.att[i]);
        auto map_node = [&](const std::string& id) {
            auto f = fuse.find(id);
            return f == fuse.end() ? id : f->second;
        };
        for (const auto& n : sub.nodes)
            if (!fuse.count(n.id))
                out.nodes.push_back(n);
        for (auto& se : sub.edges) {
            for (auto& a : se.att)
                a = map_node(a);
            out.edges.push_back(std::move(se));
        }
    }
    return out;
}

}  // namespace

Hypergraph yield_graph(const DerivationTree& tree, const Grammar& g) {
    return yield_prefixed(tree, g, "");
}

std::vector<Diagnostic> validate(const Grammar& g) {
    std::vector<Diagnostic> out;
    auto report = [&](std::string invariant, std::string location, std::string message) {
        out.push_back({std::move(invariant), std::move(location), std::move(message)});
    };

    for (const auto& [name, dom] : g.domains) {
        if (dom.values.empty())
            report("domain-nonempty", "domain " + name, "domain has no values");
        std::set<Value> seen(dom.values.begin(), dom.values.end());
        if (seen.size() != dom.values.size())
            report("domain-distinct", "domain " + name, "domain repeats a value");
    }
    for (const auto& [name, label] : g.labels)
        if (name != label.name)
            report("label-name", "label " + name, "label keyed under a different name");

    const EdgeLabel* start = g.find_label(g.start);
    if (!start)
        report("start-declared", "start", "start symbol '" + g.start + "' is not declared");
    else if (start->is_terminal())
        report("start-nonterminal", "start", "start symbol '" + g.start + "' is terminal");

    for (const auto& [name, table] : g.factors) {
        const EdgeLabel* label = g.find_label(name);
        std::string loc = "factor " + name;
        if (!label || !label->is_terminal()) {
            report("factor-label", loc, "factor table for a label that is not a declared terminal");
            continue;
        }
        if (table.domains.size() != label->arity) {
            report("factor-shape", loc, "factor has " + std::to_string(table.domains.size()) +
                                            " domains but label arity is " + std::to_string(label->arity));
            continue;
        }
        std::size_t expected = 1;
        bool known = true;
        for (const auto& d : table.domains) {
            auto it = g.domains.find(d);
            if (it == g.domains.end()) {
                report("factor-domain", loc, "unknown domain '" + d + "'");
                known = false;
                break;
            }
            expected *= it->second.size();
        }
        if (known && table.weights.size() != expected)
            report("factor-shape", loc, "table has " + std::to_string(table.weights.size()) +
                                            " entries, expected " + std::to_string(expected));
        for (double w : table.weights)
            if (!(w >= 0.0) || !std::isfinite(w)) {
                report("factor-nonnegative", loc, "weights must be finite and nonnegative");
                break;
            }
    }

    std::map<std::string, std::vector<std::string>> lhs_ext;
    for (std::size_t ri = 0; ri < g.rules.size(); ++ri) {
        const Rule& r = g.rules[ri];
        const Hypergraph& h = r.rhs;
        std::string where = "rule " + std::to_string(ri) + " (" + r.lhs + ")";
        const EdgeLabel* lhs = g.find_label(r.lhs);
        if (!lhs || lhs->is_terminal())
            report("rule-lhs", where, "left-hand side '" + r.lhs + "' is not a declared nonterminal");
        else if (h.ext.size() != lhs->arity)
            report("rule-arity", where, "rhs has " + std::to_string(h.ext.size()) +
                                            " external nodes but arity is " + std::to_string(lhs->arity));

        std::map<std::string, std::string> node_domain;
        for (const auto& n : h.nodes) {
            if (!node_domain.emplace(n.id, n.domain).second)
                report("node-unique", where + " node " + n.id, "duplicate node id");
            if (!g.domains.count(n.domain))
                report("node-domain", where + " node " + n.id, "unknown domain '" + n.domain + "'");
        }
        std::set<std::string> ext_seen;
        for (const auto& x : h.ext) {
            if (!node_domain.count(x))
                report("ext-node", where, "external node '" + x + "' is not a node of the rhs");
            if (!ext_seen.insert(x).second)
                report("ext-distinct", where, "external node '" + x + "' repeats");
        }
        std::vector<std::string> ext_doms;
        for (const auto& x : h.ext)
            ext_doms.push_back(node_domain.count(x) ? node_domain[x] : std::string());
        if (lhs && !lhs->is_terminal()) {
            auto [it, fresh] = lhs_ext.emplace(r.lhs, ext_doms);
            if (!fresh && it->second != ext_doms)
                report("ext-domains", where, "external node domains differ from another rule for '" + r.lhs + "'");
        }

        std::set<std::string> edge_ids;
        for (const auto& e : h.edges) {
            std::string eloc = where + " edge " + e.id;
            if (!edge_ids.insert(e.id).second)
                report("edge-unique", eloc, "duplicate edge id");
            for (const auto& a : e.att)
                if (!node_domain.count(a))
                    report("edge-attachment", eloc, "attachment node '" + a + "' is not a node of the rhs");
            const EdgeLabel* label = g.find_label(e.label);
            if (!label) {
                report("edge-label", eloc, "undeclared label '" + e.label + "'");
                continue;
            }
            if (e.att.size() != label->arity) {
                report("edge-arity", eloc, "edge '" + e.id + "' has " + std::to_string(e.att.size()) +
                                               " attachment nodes but label '" + e.label + "' has arity " +
                                               std::to_string(label->arity));
                continue;
            }
            if (label->is_terminal()) {
                auto f = g.factors.find(e.label);
                if (f == g.factors.end()) {
                    report("factor-present", eloc, "terminal label '" + e.label + "' has no factor table");
                    continue;
                }
                if (f->second.domains.size() == e.att.size())
                    for (std::size_t i = 0; i < e.att.size(); ++i)
                        if (node_domain.count(e.att[i]) && node_domain[e.att[i]] != f->second.domains[i])
                            report("edge-domains", eloc, "attachment " + std::to_string(i) +
                                                             " domain differs from factor table domain");
            }
        }
    }

    // Nonterminal edges must agree with the external domains of the rules they expand to.
    for (std::size_t ri = 0; ri < g.rules.size(); ++ri) {
        const Rule& r = g.rules[ri];
        for (const auto& e : r.rhs.edges) {
            const EdgeLabel* label = g.find_label(e.label);
            if (!label || label->is_terminal() || e.att.size() != label->arity)
                continue;
            auto it = lhs_ext.find(e.label);
            if (it == lhs_ext.end())
                continue;
            for (std::size_t i = 0; i < e.att.size(); ++i) {
                const Node* n = r.rhs.find_node(e.att[i]);
                if (n && i < it->second.size() && n->domain != it->second[i])
                    report("edge-domains",
                           "rule " + std::to_string(ri) + " (" + r.lhs + ") edge " + e.id,
                           "attachment " + std::to_string(i) + " domain differs from rules for '" + e.label + "'");
            }
        }
    }
    return out;
}

bool isomorphic(const Hypergraph& a, const Hypergraph& b) {
    if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size() || a.ext.size() != b.ext.size())
        return false;
    std::map<std::string, std::string> dom_a, dom_b;
    for (const auto& n : a.nodes)
        dom_a[n.id] = n.domain;
    for (const auto& n : b.nodes)
        dom_b[n.id] = n.domain;
    if (dom_a.size() != a.nodes.size() || dom_b.size() != b.nodes.size())
        return false;

    std::map<std::string, std::string> fwd, rev;
    auto bind = [&](const std::string& x, const std::string& y, std::vector<std::string>& undo) {
        auto f = fwd.find(x);
        if (f != fwd.end())
            return f->second == y;
        if (rev.count(y) || !dom_b.count(y) || dom_a[x] != dom_b[y])
            return false;
        fwd[x] = y;
        rev[y] = x;
        undo.push_back(x);
        return true;
    };
    auto unbind = [&](const std::vector<std::string>& undo) {
        for (const auto& x : undo) {
            rev.erase(fwd[x]);
            fwd.erase(x);
        }
    };

    std::vector<std::string> ext_undo;
    for (std::size_t i = 0; i < a.ext.size(); ++i)
        if (!bind(a.ext[i], b.ext[i], ext_undo))
            return false;

    std::vector<bool> used(b.edges.size(), false);
    std::vector<bool> done(a.edges.size(), false);

    std::function<bool(std::size_t)> match = [&](std::size_t remaining) -> bool {
        if (remaining == 0) {
            // Leftover nodes are isolated; they only need matching domains.
            std::multiset<std::string> left, right;
            for (const auto& n : a.nodes)
                if (!fwd.count(n.id))
                    left.insert(n.domain);
            for (const auto& n : b.nodes)
                if (!rev.count(n.id))
                    right.insert(n.domain);
            return left == right;
        }
        // Most-constrained edge first.
        std::size_t pick = a.edges.size();
        int best = -1;
        for (std::size_t i = 0; i < a.edges.size(); ++i) {
            if (done[i])
                continue;
            int bound = 0;
            for (const auto& x : a.edges[i].att)
                bound += fwd.count(x) ? 1 : 0;
            if (bound > best) {
                best = bound;
                pick = i;
            }
        }
        const Edge& ea = a.edges[pick];
        done[pick] = true;
        for (std::size_t j = 0; j < b.edges.size(); ++j) {
            const Edge& eb = b.edges[j];
            if (used[j] || eb.label != ea.label || eb.att.size() != ea.att.size())
                continue;
            std::vector<std::string> undo;
            bool ok = true;
            for (std::size_t k = 0; k < ea.att.size() && ok; ++k)
                ok = bind(ea.att[k], eb.att[k], undo);
            if (ok) {
                used[j] = true;
                if (match(remaining - 1))
                    return true;
                used[j] = false;
            }
            unbind(undo);
        }
        done[pick] = false;
        return false;
    };
    return match(a.edges.size());
}

}  // namespace fgg
