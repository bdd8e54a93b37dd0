#include "fggpp/simplify.hpp"

#include "fggpp/tensor.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace fgg {

namespace {

constexpr std::size_t kMaxComposedArity = 4;
constexpr std::size_t kMaxComposedEntries = 1 << 16;

void erase_rules(CompilationUnit& cu, const std::function<bool(const Rule&)>& doomed) {
    std::vector<Rule> rules;
    std::vector<std::vector<RuleOrigin>> provenance;
    for (std::size_t i = 0; i < cu.grammar.rules.size(); ++i) {
        if (doomed(cu.grammar.rules[i]))
            continue;
        rules.push_back(std::move(cu.grammar.rules[i]));
        provenance.push_back(std::move(cu.provenance[i]));
    }
    cu.grammar.rules = std::move(rules);
    cu.provenance = std::move(provenance);
}

// Drops labels, factors and domains nothing refers to any more.
void collect_garbage(CompilationUnit& cu) {
    Grammar& g = cu.grammar;
    std::set<std::string> labels{g.start};
    std::set<std::string> domains;
    for (const auto& r : g.rules) {
        labels.insert(r.lhs);
        for (const auto& e : r.rhs.edges)
            labels.insert(e.label);
        for (const auto& n : r.rhs.nodes)
            domains.insert(n.domain);
    }
    std::erase_if(g.labels, [&](const auto& kv) { return !labels.count(kv.first); });
    std::erase_if(g.factors, [&](const auto& kv) { return !labels.count(kv.first); });
    for (const auto& [name, f] : g.factors)
        domains.insert(f.domains.begin(), f.domains.end());
    std::erase_if(g.domains, [&](const auto& kv) { return !domains.count(kv.first); });
    std::erase_if(cu.branch_labels, [&](const std::string& l) { return !labels.count(l); });
}

void renumber_edges(Hypergraph& h) {
    for (std::size_t i = 0; i < h.edges.size(); ++i)
        h.edges[i].id = "h" + std::to_string(i + 1);
}

std::string fresh_node(const Hypergraph& h, const std::string& base) {
    std::string id = base;
    for (int n = 2; h.find_node(id); ++n)
        id = base + std::to_string(n);
    return id;
}

bool is_terminal(const Grammar& g, const std::string& label) {
    const EdgeLabel* l = g.find_label(label);
    return l && l->is_terminal();
}

// ---- prune ----------------------------------------------------------------

bool prune(CompilationUnit& cu) {
    Grammar& g = cu.grammar;
    bool changed = false;
    while (true) {
        std::set<std::string> defined;
        for (const auto& r : g.rules)
            defined.insert(r.lhs);
        std::size_t before = g.rules.size();
        erase_rules(cu, [&](const Rule& r) {
            for (const auto& e : r.rhs.edges) {
                if (is_terminal(g, e.label)) {
                    const auto& w = g.factors.at(e.label).weights;
                    if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; }))
                        return true;
                } else if (!defined.count(e.label)) {
                    return true;
                }
            }
            return false;
        });
        if (g.rules.size() == before)
            break;
        changed = true;
    }
    return changed;
}

// ---- inline ---------------------------------------------------------------

// Replaces edge `k` of `host` by a copy of `body`, fusing body's external
// nodes with the edge's attachments.
Hypergraph splice(const Hypergraph& host, std::size_t k, const Hypergraph& body) {
    Hypergraph out;
    out.nodes = host.nodes;
    out.ext = host.ext;
    const Edge& target = host.edges[k];
    std::map<std::string, std::string> rename;
    for (std::size_t i = 0; i < body.ext.size(); ++i)
        rename[body.ext[i]] = target.att[i];
    for (const auto& n : body.nodes) {
        if (rename.count(n.id))
            continue;
        std::string id = fresh_node(out, n.id);
        out.nodes.push_back({id, n.domain});
        rename[n.id] = id;
    }
    for (std::size_t i = 0; i < host.edges.size(); ++i) {
        if (i != k) {
            out.edges.push_back(host.edges[i]);
            continue;
        }
        for (const auto& e : body.edges) {
            Edge copy = e;
            for (auto& a : copy.att)
                a = rename.at(a);
            out.edges.push_back(std::move(copy));
        }
    }
    renumber_edges(out);
    return out;
}

void remove_unreachable(CompilationUnit& cu) {
    Grammar& g = cu.grammar;
    std::set<std::string> seen{g.start};
    std::vector<std::string> todo{g.start};
    while (!todo.empty()) {
        std::string x = todo.back();
        todo.pop_back();
        for (const auto& r : g.rules)
            if (r.lhs == x)
                for (const auto& e : r.rhs.edges)
                    if (!is_terminal(g, e.label) && seen.insert(e.label).second)
                        todo.push_back(e.label);
    }
    erase_rules(cu, [&](const Rule& r) { return !seen.count(r.lhs); });
}

// A rule X -> Y(ext) with nothing else in it: X takes over Y's rules.
bool collapse_alias(CompilationUnit& cu) {
    Grammar& g = cu.grammar;
    std::map<std::string, std::size_t> rule_count, references;
    for (const auto& r : g.rules) {
        ++rule_count[r.lhs];
        for (const auto& e : r.rhs.edges)
            ++references[e.label];
    }
    for (std::size_t i = 0; i < g.rules.size(); ++i) {
        const Rule& r = g.rules[i];
        if (rule_count[r.lhs] != 1 || r.rhs.edges.size() != 1 || r.rhs.nodes.size() != r.rhs.ext.size())
            continue;
        const Edge& e = r.rhs.edges[0];
        const std::string target = e.label;
        if (e.att != r.rhs.ext || target == r.lhs || target == g.start || is_terminal(g, target) ||
            cu.function_labels.count(target) || references[target] != 1 || rule_count[target] == 0)
            continue;
        std::string alias = r.lhs;
        std::vector<RuleOrigin> origin = cu.provenance[i];
        std::vector<Rule> rules;
        std::vector<std::vector<RuleOrigin>> provenance;
        for (std::size_t j = 0; j < g.rules.size(); ++j) {
            if (j == i)
                continue;
            if (g.rules[j].lhs == target) {
                // The alias and its target have the same external domains,
                // so node ids carry over unchanged.
                rules.push_back(Rule{alias, g.rules[j].rhs});
                provenance.push_back(origin);
                provenance.back().insert(provenance.back().end(), cu.provenance[j].begin(), cu.provenance[j].end());
            } else {
                rules.push_back(std::move(g.rules[j]));
                provenance.push_back(std::move(cu.provenance[j]));
            }
        }
        g.rules = std::move(rules);
        cu.provenance = std::move(provenance);
        if (cu.branch_labels.count(target))
            cu.branch_labels.insert(alias);
        return true;
    }
    return false;
}

bool inline_rules(CompilationUnit& cu) {
    Grammar& g = cu.grammar;
    bool changed = false;
    while (collapse_alias(cu))
        changed = true;

    std::map<std::string, std::size_t> rule_count;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < g.rules.size(); ++i) {
        ++rule_count[g.rules[i].lhs];
        index[g.rules[i].lhs] = i;
    }
    std::set<std::string> inlinable;
    for (const auto& [label, n] : rule_count) {
        if (n != 1 || label == g.start || cu.function_labels.count(label))
            continue;
        inlinable.insert(label);
    }
    // Drop labels that can reach themselves through inlinable labels;
    // splicing those would never terminate.
    auto successors = [&](const std::string& x) {
        std::set<std::string> out;
        for (const auto& e : g.rules[index.at(x)].rhs.edges)
            if (inlinable.count(e.label))
                out.insert(e.label);
        return out;
    };
    for (bool again = true; again;) {
        again = false;
        for (const auto& x : inlinable) {
            std::set<std::string> seen;
            std::vector<std::string> todo{x};
            bool cyclic = false;
            while (!todo.empty() && !cyclic) {
                std::string y = todo.back();
                todo.pop_back();
                for (const auto& z : successors(y)) {
                    if (z == x)
                        cyclic = true;
                    else if (seen.insert(z).second)
                        todo.push_back(z);
                }
            }
            if (cyclic) {
                inlinable.erase(x);
                again = true;
                break;
            }
        }
    }
    if (inlinable.empty()) {
        if (changed)
            remove_unreachable(cu);
        return changed;
    }

    // Bodies are taken from a snapshot; since the inlinable labels form a
    // DAG, repeating until no inlinable edge remains terminates.
    const std::vector<Rule> snapshot = g.rules;
    const auto origins = cu.provenance;
    for (std::size_t i = 0; i < g.rules.size(); ++i) {
        if (inlinable.count(g.rules[i].lhs))
            continue;
        while (true) {
            auto& edges = g.rules[i].rhs.edges;
            auto it = std::find_if(edges.begin(), edges.end(), [&](const Edge& e) { return inlinable.count(e.label); });
            if (it == edges.end())
                break;
            std::size_t j = index.at(it->label);
            g.rules[i].rhs = splice(g.rules[i].rhs, static_cast<std::size_t>(it - edges.begin()), snapshot[j].rhs);
            cu.provenance[i].insert(cu.provenance[i].end(), origins[j].begin(), origins[j].end());
            changed = true;
        }
    }
    remove_unreachable(cu);
    return changed;
}

// ---- compose --------------------------------------------------------------

bool composable(const std::string& label) {
    std::string kind = factor_kind(label);
    return kind != "copy" && kind != "density" && kind.rfind("guard", 0) != 0;
}

std::string fresh_compose_kind(const Grammar& g) {
    int best = 0;
    for (const auto& [name, l] : g.labels) {
        std::string kind = factor_kind(name);
        if (kind.rfind("compose", 0) == 0 && kind.size() > 7 &&
            std::all_of(kind.begin() + 7, kind.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            best = std::max(best, std::stoi(kind.substr(7)));
    }
    return "compose" + std::to_string(best + 1);
}

// Weight of terminal edge `e` under an assignment of node indices.
double factor_at(const Grammar& g, const Edge& e, const std::map<std::string, std::size_t>& xi) {
    const FactorTable& t = g.factors.at(e.label);
    std::size_t offset = 0;
    for (std::size_t k = 0; k < e.att.size(); ++k)
        offset = offset * g.domain(t.domains[k]).size() + xi.at(e.att[k]);
    return t.weights[offset];
}

bool compose_rule(CompilationUnit& cu, Rule& rule) {
    Grammar& g = cu.grammar;
    Hypergraph& h = rule.rhs;
    for (const auto& node : h.nodes) {
        if (h.is_external(node.id))
            continue;
        std::vector<std::size_t> incident;
        bool ok = true;
        for (std::size_t i = 0; i < h.edges.size() && ok; ++i) {
            const Edge& e = h.edges[i];
            if (std::find(e.att.begin(), e.att.end(), node.id) == e.att.end())
                continue;
            ok = is_terminal(g, e.label) && composable(e.label);
            incident.push_back(i);
        }
        if (!ok || incident.empty())
            continue;
        std::vector<std::string> att;
        for (std::size_t i : incident)
            for (const auto& a : h.edges[i].att)
                if (a != node.id && std::find(att.begin(), att.end(), a) == att.end())
                    att.push_back(a);
        std::vector<std::string> doms;
        std::vector<std::size_t> shape;
        std::size_t entries = 1;
        for (const auto& a : att) {
            doms.push_back(h.find_node(a)->domain);
            shape.push_back(g.domain(doms.back()).size());
            entries *= shape.back();
        }
        if (att.size() > kMaxComposedArity || entries > kMaxComposedEntries)
            continue;

        std::string kind = fresh_compose_kind(g);
        std::string label = kind + "@";
        for (std::size_t k = 0; k < doms.size(); ++k)
            label += (k ? "," : "") + doms[k];
        FactorTable table{label, doms, {}};
        std::size_t summed = g.domain(node.domain).size();
        std::vector<std::size_t> index(att.size(), 0);
        std::map<std::string, std::size_t> xi;
        do {
            for (std::size_t k = 0; k < att.size(); ++k)
                xi[att[k]] = index[k];
            double total = 0.0;
            for (std::size_t s = 0; s < summed; ++s) {
                xi[node.id] = s;
                double w = 1.0;
                for (std::size_t i : incident)
                    w *= factor_at(g, h.edges[i], xi);
                total += w;
            }
            table.weights.push_back(total);
        } while (next_index(index, shape));

        g.labels[label] = EdgeLabel{label, att.size(), LabelKind::Terminal};
        g.factors[label] = std::move(table);
        std::vector<Edge> edges;
        for (std::size_t i = 0; i < h.edges.size(); ++i) {
            if (i == incident.front())
                edges.push_back(Edge{"", label, att});
            else if (std::find(incident.begin(), incident.end(), i) == incident.end())
                edges.push_back(h.edges[i]);
        }
        h.edges = std::move(edges);
        std::string gone = node.id;
        std::erase_if(h.nodes, [&](const Node& n) { return n.id == gone; });
        renumber_edges(h);
        return true;
    }
    return false;
}

bool compose(CompilationUnit& cu) {
    bool changed = false;
    for (auto& r : cu.grammar.rules)
        while (compose_rule(cu, r))
            changed = true;
    return changed;
}

// ---- contract -------------------------------------------------------------

bool is_identity(const Grammar& g, const Edge& e) {
    if (e.att.size() != 2 || !is_terminal(g, e.label))
        return false;
    const FactorTable& t = g.factors.at(e.label);
    if (t.domains.size() != 2 || t.domains[0] != t.domains[1])
        return false;
    std::size_t n = g.domain(t.domains[0]).size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (t.weights[i * n + j] != (i == j ? 1.0 : 0.0))
                return false;
    return true;
}

bool contract(CompilationUnit& cu) {
    bool changed = false;
    for (auto& r : cu.grammar.rules) {
        Hypergraph& h = r.rhs;
        for (std::size_t i = 0; i < h.edges.size();) {
            const Edge& e = h.edges[i];
            if (!is_identity(cu.grammar, e)) {
                ++i;
                continue;
            }
            std::string a = e.att[0], b = e.att[1];
            if (a != b && h.is_external(a) && h.is_external(b)) {
                ++i;
                continue;
            }
            h.edges.erase(h.edges.begin() + static_cast<std::ptrdiff_t>(i));
            if (a != b) {
                std::string keep = h.is_external(b) ? b : a;
                std::string drop = keep == a ? b : a;
                for (auto& edge : h.edges)
                    std::replace(edge.att.begin(), edge.att.end(), drop, keep);
                std::erase_if(h.nodes, [&](const Node& n) { return n.id == drop; });
            }
            changed = true;
        }
        renumber_edges(h);
    }
    return changed;
}

}  // namespace

std::string to_string(Pass p) {
    switch (p) {
    case Pass::Prune:
        return "prune";
    case Pass::Inline:
        return "inline";
    case Pass::Compose:
        return "compose";
    case Pass::Contract:
        return "contract";
    }
    return "?";
}

std::optional<Pass> parse_pass(const std::string& name) {
    for (Pass p : all_passes())
        if (to_string(p) == name)
            return p;
    return std::nullopt;
}

PassSet all_passes() {
    return {Pass::Prune, Pass::Inline, Pass::Compose, Pass::Contract};
}

std::size_t grammar_size(const Grammar& g) {
    std::size_t n = g.rules.size();
    for (const auto& r : g.rules)
        n += r.rhs.edges.size() + r.rhs.nodes.size();
    return n;
}

bool apply_pass(CompilationUnit& cu, Pass pass) {
    std::size_t before = grammar_size(cu.grammar);
    std::size_t rules_before = cu.grammar.rules.size();
    bool fired = false;
    switch (pass) {
    case Pass::Prune:
        fired = prune(cu);
        break;
    case Pass::Inline:
        fired = inline_rules(cu);
        break;
    case Pass::Compose:
        fired = compose(cu);
        break;
    case Pass::Contract:
        fired = contract(cu);
        break;
    }
    collect_garbage(cu);
    if (fired)
        cu.pass_log.push_back(to_string(pass) + ": rules " + std::to_string(rules_before) + " -> " +
                              std::to_string(cu.grammar.rules.size()) + ", size " + std::to_string(before) +
                              " -> " + std::to_string(grammar_size(cu.grammar)));
    return fired;
}

CompilationUnit simplify(const CompilationUnit& cu, const PassSet& passes) {
    CompilationUnit out = cu;
    const Pass order[] = {Pass::Prune, Pass::Inline, Pass::Compose, Pass::Contract};
    for (bool again = true; again;) {
        again = false;
        for (Pass p : order)
            if (passes.count(p) && apply_pass(out, p))
                again = true;
    }
    return out;
}

}  // namespace fgg
