#include "fggpp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace fgg {

double assignment_weight(const Hypergraph& graph, const Grammar& g, const Assignment& xi) {
    std::map<std::string, std::size_t> index;
    for (const auto& n : graph.nodes) {
        auto it = xi.find(n.id);
        if (it == xi.end())
            throw InferenceError("assignment does not cover node '" + n.id + "'");
        auto pos = g.domain(n.domain).index_of(it->second);
        if (!pos)
            throw InferenceError("value " + it->second.to_string() + " is outside the domain of node '" + n.id + "'");
        index[n.id] = *pos;
    }
    double w = 1.0;
    for (const auto& e : graph.edges) {
        auto f = g.factors.find(e.label);
        if (f == g.factors.end())
            throw InferenceError("edge '" + e.id + "' has no factor table (nonterminal?)");
        std::size_t off = 0;
        for (std::size_t i = 0; i < e.att.size(); ++i)
            off = off * g.domain(f->second.domains[i]).size() + index.at(e.att[i]);
        w *= f->second.weights.at(off);
    }
    return w;
}

namespace {

// Node ids of a rhs mapped to dense indices.
struct NodeTable {
    std::vector<std::string> ids;
    std::vector<std::size_t> sizes;
    std::vector<std::string> domains;
    std::map<std::string, int> index;

    NodeTable(const Hypergraph& h, const Grammar& g) {
        for (const auto& n : h.nodes) {
            index[n.id] = static_cast<int>(ids.size());
            ids.push_back(n.id);
            domains.push_back(n.domain);
            sizes.push_back(g.domain(n.domain).size());
        }
    }

    int at(const std::string& id) const {
        auto it = index.find(id);
        if (it == index.end())
            throw StructuralError("unknown node '" + id + "'");
        return it->second;
    }
};

struct LocalFactor {
    std::vector<int> vars;  // distinct
    std::vector<double> data;
};

std::uint64_t scope_volume(const std::vector<int>& vars, const std::vector<std::size_t>& sizes) {
    std::uint64_t v = 1;
    for (int x : vars)
        v *= sizes[x];
    return v;
}

// Builds a factor over the distinct nodes of `att` from a table indexed by
// `att` positionally; repeated nodes select the diagonal.
LocalFactor gather(const std::vector<int>& att, std::span<const double> table, const std::vector<std::size_t>& sizes) {
    LocalFactor f;
    for (int x : att)
        if (std::find(f.vars.begin(), f.vars.end(), x) == f.vars.end())
            f.vars.push_back(x);
    std::vector<std::size_t> shape;
    for (int x : f.vars)
        shape.push_back(sizes[x]);
    std::uint64_t vol = scope_volume(f.vars, sizes);
    f.data.assign(vol, 0.0);
    if (vol == 0)
        return f;
    std::vector<std::size_t> pos(att.size());
    for (std::size_t k = 0; k < att.size(); ++k)
        pos[k] = static_cast<std::size_t>(std::find(f.vars.begin(), f.vars.end(), att[k]) - f.vars.begin());
    std::vector<std::size_t> idx(f.vars.size(), 0);
    std::size_t out = 0;
    do {
        std::size_t off = 0;
        for (std::size_t k = 0; k < att.size(); ++k)
            off = off * sizes[att[k]] + idx[pos[k]];
        f.data[out++] = table[off];
    } while (next_index(idx, shape));
    return f;
}

// Multiplies `factors` over `scope` and sums out `eliminated` (or nothing
// when eliminated < 0). The result is over `scope` minus the eliminated node.
LocalFactor combine(const std::vector<const LocalFactor*>& factors, const std::vector<int>& scope, int eliminated,
                    const std::vector<std::size_t>& sizes, std::uint64_t& ops) {
    LocalFactor out;
    for (int x : scope)
        if (x != eliminated)
            out.vars.push_back(x);
    out.data.assign(scope_volume(out.vars, sizes), 0.0);

    std::vector<std::size_t> shape;
    for (int x : scope)
        shape.push_back(sizes[x]);
    std::uint64_t vol = scope_volume(scope, sizes);
    ops += vol;
    if (vol == 0)
        return out;

    // Strides of each factor and of the output with respect to `scope`.
    auto strides_for = [&](const std::vector<int>& vars) {
        std::vector<std::size_t> strides(scope.size(), 0);
        std::size_t s = 1;
        for (std::size_t k = vars.size(); k-- > 0;) {
            auto p = std::find(scope.begin(), scope.end(), vars[k]) - scope.begin();
            strides[p] = s;
            s *= sizes[vars[k]];
        }
        return strides;
    };
    std::vector<std::vector<std::size_t>> fstrides;
    for (const auto* f : factors)
        fstrides.push_back(strides_for(f->vars));
    auto ostrides = strides_for(out.vars);

    std::vector<std::size_t> idx(scope.size(), 0);
    do {
        double w = 1.0;
        for (std::size_t k = 0; k < factors.size() && w != 0.0; ++k) {
            std::size_t off = 0;
            for (std::size_t p = 0; p < scope.size(); ++p)
                off += idx[p] * fstrides[k][p];
            w *= factors[k]->data[off];
        }
        std::size_t o = 0;
        for (std::size_t p = 0; p < scope.size(); ++p)
            o += idx[p] * ostrides[p];
        out.data[o] += w;
    } while (next_index(idx, shape));
    return out;
}

std::vector<int> internal_nodes(const Hypergraph& h, const NodeTable& nodes) {
    std::vector<int> out;
    for (const auto& n : h.nodes)
        if (!h.is_external(n.id))
            out.push_back(nodes.at(n.id));
    return out;
}

}  // namespace

EliminationPlan plan_elimination(const Hypergraph& rhs, const Grammar& g) {
    NodeTable nodes(rhs, g);
    std::size_t n = nodes.ids.size();
    std::vector<std::set<int>> adj(n);
    for (const auto& e : rhs.edges)
        for (const auto& a : e.att)
            for (const auto& b : e.att)
                if (a != b)
                    adj[nodes.at(a)].insert(nodes.at(b));

    std::set<int> remaining;
    for (int x : internal_nodes(rhs, nodes))
        remaining.insert(x);

    EliminationPlan plan;
    std::uint64_t widest = 0;
    while (!remaining.empty()) {
        int best = -1;
        std::size_t best_fill = 0;
        for (int x : remaining) {
            std::size_t fill = 0;
            for (auto i = adj[x].begin(); i != adj[x].end(); ++i)
                for (auto j = std::next(i); j != adj[x].end(); ++j)
                    if (!adj[*i].count(*j))
                        ++fill;
            if (best < 0 || fill < best_fill || (fill == best_fill && nodes.ids[x] < nodes.ids[best])) {
                best = x;
                best_fill = fill;
            }
        }
        std::vector<int> scope(adj[best].begin(), adj[best].end());
        scope.push_back(best);
        std::uint64_t vol = scope_volume(scope, nodes.sizes);
        plan.cost += vol;
        if (plan.widest_scope.empty() || vol > widest) {
            widest = vol;
            plan.widest_scope.clear();
            for (int x : scope)
                plan.widest_scope.push_back(nodes.ids[x]);
            std::sort(plan.widest_scope.begin(), plan.widest_scope.end());
        }
        for (int a : adj[best])
            for (int b : adj[best])
                if (a != b)
                    adj[a].insert(b);
        for (int a : adj[best])
            adj[a].erase(best);
        adj[best].clear();
        remaining.erase(best);
        plan.order.push_back(nodes.ids[best]);
    }
    std::vector<int> ext;
    for (const auto& x : rhs.ext)
        ext.push_back(nodes.at(x));
    plan.cost += scope_volume(ext, nodes.sizes);
    return plan;
}

WeightTensor external_marginal(const Hypergraph& graph, const Grammar& g, const EliminationPlan* plan,
                               EliminationStats* stats, const TensorMap* tau) {
    NodeTable nodes(graph, g);
    std::vector<LocalFactor> factors;
    factors.reserve(graph.edges.size());
    for (const auto& e : graph.edges) {
        std::vector<int> att;
        for (const auto& a : e.att)
            att.push_back(nodes.at(a));
        std::span<const double> table;
        if (auto f = g.factors.find(e.label); f != g.factors.end()) {
            if (f->second.domains.size() != att.size())
                throw InferenceError("edge '" + e.id + "' arity differs from its factor table");
            for (std::size_t i = 0; i < att.size(); ++i)
                if (g.domain(f->second.domains[i]).size() != nodes.sizes[att[i]])
                    throw InferenceError("edge '" + e.id + "' attachment sizes differ from its factor table");
            table = f->second.weights;
        } else {
            const WeightTensor* t = nullptr;
            if (tau) {
                auto it = tau->find(e.label);
                if (it != tau->end())
                    t = &it->second;
            }
            if (!t)
                throw InferenceError("no weights for nonterminal edge '" + e.id + "' labelled '" + e.label + "'");
            if (t->rank() != att.size())
                throw InferenceError("shape mismatch: tensor for '" + e.label + "' has rank " +
                                     std::to_string(t->rank()) + " but edge has " + std::to_string(att.size()) +
                                     " attachments");
            for (std::size_t i = 0; i < att.size(); ++i)
                if (t->shape()[i] != nodes.sizes[att[i]])
                    throw InferenceError("shape mismatch on axis " + std::to_string(i) + " of '" + e.label + "'");
            table = t->data();
        }
        factors.push_back(gather(att, table, nodes.sizes));
    }

    EliminationPlan own;
    if (!plan) {
        own = plan_elimination(graph, g);
        plan = &own;
    }
    {
        std::vector<int> expected = internal_nodes(graph, nodes);
        std::vector<int> given;
        for (const auto& id : plan->order)
            given.push_back(nodes.at(id));
        std::sort(expected.begin(), expected.end());
        std::sort(given.begin(), given.end());
        if (expected != given)
            throw InferenceError("elimination order must cover exactly the internal nodes");
    }

    std::uint64_t ops = 0;
    std::vector<LocalFactor> live = std::move(factors);
    for (const auto& id : plan->order) {
        int x = nodes.at(id);
        std::vector<const LocalFactor*> involved;
        std::vector<LocalFactor> rest;
        std::set<int> scope_set{x};
        for (auto& f : live) {
            if (std::find(f.vars.begin(), f.vars.end(), x) != f.vars.end()) {
                scope_set.insert(f.vars.begin(), f.vars.end());
            }
        }
        std::vector<int> scope(scope_set.begin(), scope_set.end());
        std::vector<LocalFactor> taken;
        for (auto& f : live) {
            if (std::find(f.vars.begin(), f.vars.end(), x) != f.vars.end())
                taken.push_back(std::move(f));
            else
                rest.push_back(std::move(f));
        }
        for (const auto& f : taken)
            involved.push_back(&f);
        rest.push_back(combine(involved, scope, x, nodes.sizes, ops));
        live = std::move(rest);
    }

    std::vector<int> ext;
    std::vector<std::size_t> shape;
    std::vector<std::string> domains;
    for (const auto& id : graph.ext) {
        int x = nodes.at(id);
        ext.push_back(x);
        shape.push_back(nodes.sizes[x]);
        domains.push_back(nodes.domains[x]);
    }
    std::vector<const LocalFactor*> all;
    for (const auto& f : live)
        all.push_back(&f);
    LocalFactor joint = combine(all, ext, -1, nodes.sizes, ops);
    if (stats)
        stats->table_ops += ops;
    for (double w : joint.data)
        if (!std::isfinite(w))
            throw InferenceError("non-finite weight (overflow) in external marginal");
    return WeightTensor(std::move(domains), std::move(shape), std::move(joint.data));
}

WeightTensor rule_contribution(const Rule& rule, const Grammar& g, const TensorMap& tau, const EliminationPlan* plan,
                               EliminationStats* stats) {
    return external_marginal(rule.rhs, g, plan, stats, &tau);
}

std::vector<std::string> nonterminal_domains(const Grammar& g, const std::string& nt) {
    if (auto d = g.ext_domains(nt))
        return *d;
    for (const auto& r : g.rules)
        for (const auto& e : r.rhs.edges)
            if (e.label == nt) {
                std::vector<std::string> out;
                for (const auto& a : e.att) {
                    const Node* n = r.rhs.find_node(a);
                    if (!n)
                        throw StructuralError("edge '" + e.id + "' attaches to unknown node '" + a + "'");
                    out.push_back(n->domain);
                }
                return out;
            }
    const EdgeLabel* label = g.find_label(nt);
    if (label && label->arity == 0)
        return {};
    throw StructuralError("cannot determine domains of nonterminal '" + nt + "'");
}

std::string to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Converged:
        return "converged";
    case SolveStatus::NotConverged:
        return "not-converged";
    case SolveStatus::Divergent:
        return "divergent";
    }
    return "?";
}

namespace {

WeightTensor zero_tensor(const Grammar& g, const std::string& nt) {
    auto domains = nonterminal_domains(g, nt);
    std::vector<std::size_t> shape;
    for (const auto& d : domains)
        shape.push_back(g.domain(d).size());
    return WeightTensor(domains, shape);
}

// Tarjan's algorithm; components come out callee-first.
std::vector<std::vector<std::string>> components(const std::vector<std::string>& nts,
                                                 const std::map<std::string, std::set<std::string>>& deps) {
    std::map<std::string, int> index, low;
    std::set<std::string> on_stack;
    std::vector<std::string> stack;
    std::vector<std::vector<std::string>> out;
    int counter = 0;
    std::function<void(const std::string&)> visit = [&](const std::string& v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack.insert(v);
        for (const auto& w : deps.at(v)) {
            if (!index.count(w)) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack.count(w)) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::string> comp;
            std::string w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack.erase(w);
                comp.push_back(w);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            out.push_back(std::move(comp));
        }
    };
    for (const auto& v : nts)
        if (!index.count(v))
            visit(v);
    return out;
}

}  // namespace

SolverState solve_fixed_point(const Grammar& g, const SolverOptions& options) {
    if (!(options.tol > 0.0))
        throw InferenceError("tolerance must be positive");

    std::vector<std::string> nts;
    std::map<std::string, std::set<std::string>> deps;
    for (const auto& [name, label] : g.labels) {
        if (label.is_terminal())
            continue;
        bool used = name == g.start || !g.rules_for(name).empty();
        for (const auto& r : g.rules)
            for (const auto& e : r.rhs.edges)
                used = used || e.label == name;
        if (!used)
            continue;
        nts.push_back(name);
        deps[name];
    }
    for (const auto& r : g.rules)
        for (const auto& e : r.rhs.edges) {
            const EdgeLabel* l = g.find_label(e.label);
            if (l && !l->is_terminal())
                deps[r.lhs].insert(e.label);
        }

    SolverState state;
    for (const auto& nt : nts)
        state.tau[nt] = zero_tensor(g, nt);

    std::vector<EliminationPlan> plans;
    plans.reserve(g.rules.size());
    for (const auto& r : g.rules)
        plans.push_back(plan_elimination(r.rhs, g));

    std::vector<std::vector<std::string>> groups;
    if (options.schedule == Schedule::Global)
        groups.push_back(nts);
    else
        groups = components(nts, deps);

    state.status = SolveStatus::Converged;
    double final_delta = 0.0;
    for (const auto& group : groups) {
        std::set<std::string> members(group.begin(), group.end());
        bool recursive = group.size() > 1 || options.schedule == Schedule::Global;
        for (const auto& x : group)
            recursive = recursive || deps[x].count(x);
        std::size_t limit = recursive ? options.max_iter : 1;

        bool converged = false;
        std::size_t sweeps = 0;
        double delta = 0.0;
        while (sweeps < limit) {
            ++sweeps;
            TensorMap next;
            for (const auto& x : group)
                next[x] = zero_tensor(g, x);
            for (std::size_t ri = 0; ri < g.rules.size(); ++ri) {
                const Rule& r = g.rules[ri];
                if (!members.count(r.lhs))
                    continue;
                WeightTensor c = rule_contribution(r, g, state.tau, &plans[ri]);
                auto dst = next[r.lhs].data();
                auto src = c.data();
                for (std::size_t i = 0; i < dst.size(); ++i)
                    dst[i] += src[i];
            }
            delta = 0.0;
            bool divergent = false;
            for (const auto& x : group) {
                delta = std::max(delta, sup_distance(next[x], state.tau[x]));
                for (double w : next[x].data())
                    if (!std::isfinite(w) || w > options.divergence_bound)
                        divergent = true;
                state.tau[x] = std::move(next[x]);
            }
            state.iteration = std::max(state.iteration, sweeps);
            state.delta = recursive ? std::max(final_delta, delta) : final_delta;
            if (divergent) {
                state.status = SolveStatus::Divergent;
                if (options.on_iteration)
                    options.on_iteration(state);
                return state;
            }
            if (options.on_iteration)
                options.on_iteration(state);
            if (!recursive) {
                converged = true;
                break;
            }
            if (delta < options.tol) {
                converged = true;
                break;
            }
        }
        if (!converged)
            state.status = SolveStatus::NotConverged;
        // The reported delta is the last update of the slowest component.
        if (recursive)
            final_delta = std::max(final_delta, delta);
        state.delta = final_delta;
    }
    return state;
}

StartQuery query_start(const Grammar& g, const SolverOptions& options) {
    SolverState s = solve_fixed_point(g, options);
    StartQuery q;
    auto it = s.tau.find(g.start);
    q.weights = it != s.tau.end() ? it->second : zero_tensor(g, g.start);
    q.status = s.status;
    q.iterations = s.iteration;
    q.delta = s.delta;
    return q;
}

}  // namespace fgg
