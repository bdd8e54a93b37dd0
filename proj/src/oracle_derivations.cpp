#include "fggpp/oracle.hpp"

#include <algorithm>

namespace fgg::oracle {

namespace {

class Enumerator {
  public:
    Enumerator(const Grammar& g, const EnumerationOptions& options) : g_(g), options_(options) {}

    const std::vector<TreePtr>& trees(const std::string& x, std::size_t budget) {
        auto key = std::make_pair(x, budget);
        if (auto it = memo_.find(key); it != memo_.end())
            return it->second;
        if (!active_.insert(key).second)
            throw OracleError("nonterminal '" + x + "' is recursive through labels that do not add height");
        std::vector<TreePtr> out;
        bool counted = !options_.counted || options_.counted->count(x);
        if (!counted || budget > 0) {
            std::size_t child_budget = counted ? budget - 1 : budget;
            for (const auto& rule : g_.rules) {
                if (rule.lhs != x)
                    continue;
                std::vector<const Edge*> slots;
                for (const auto& e : rule.rhs.edges) {
                    const EdgeLabel* l = g_.find_label(e.label);
                    if (!l)
                        throw OracleError("edge label '" + e.label + "' is not declared");
                    if (!l->is_terminal())
                        slots.push_back(&e);
                }
                std::vector<const std::vector<TreePtr>*> options;
                bool empty = false;
                for (const Edge* e : slots) {
                    options.push_back(&trees(e->label, child_budget));
                    empty = empty || options.back()->empty();
                }
                if (empty)
                    continue;
                std::vector<std::size_t> pick(slots.size(), 0);
                while (true) {
                    auto t = std::make_shared<DerivationTree>();
                    t->rule = &rule;
                    for (std::size_t k = 0; k < slots.size(); ++k)
                        t->children[slots[k]->id] = (*options[k])[pick[k]];
                    out.push_back(std::move(t));
                    if (out.size() > options_.tree_limit)
                        throw OracleError("more than " + std::to_string(options_.tree_limit) +
                                          " derivation trees; lower the height bound");
                    std::size_t k = slots.size();
                    while (k > 0 && ++pick[k - 1] == options[k - 1]->size())
                        pick[--k] = 0;
                    if (k == 0)
                        break;
                }
            }
        }
        active_.erase(key);
        return memo_[key] = std::move(out);
    }

  private:
    const Grammar& g_;
    const EnumerationOptions& options_;
    std::map<std::pair<std::string, std::size_t>, std::vector<TreePtr>> memo_;
    std::set<std::pair<std::string, std::size_t>> active_;
};

}  // namespace

std::size_t measure_height(const DerivationTree& tree, const EnumerationOptions& options) {
    std::size_t h = 0;
    for (const auto& [edge, child] : tree.children)
        h = std::max(h, measure_height(*child, options));
    bool counted = !options.counted || options.counted->count(tree.rule->lhs);
    return h + (counted ? 1 : 0);
}

std::vector<TreePtr> enumerate_derivations(const Grammar& g, const std::string& x, std::size_t max_height,
                                           const EnumerationOptions& options) {
    Enumerator e(g, options);
    return e.trees(x, max_height);
}

WeightTensor brute_force_marginal(const Hypergraph& graph, const Grammar& g) {
    std::map<std::string, std::size_t> index;
    std::vector<std::size_t> size;
    for (const auto& n : graph.nodes) {
        index[n.id] = size.size();
        size.push_back(g.domain(n.domain).size());
    }
    struct Factor {
        std::vector<std::size_t> att;
        std::vector<std::size_t> stride;
        const std::vector<double>* weights;
    };
    std::vector<Factor> factors;
    for (const auto& e : graph.edges) {
        const EdgeLabel* l = g.find_label(e.label);
        if (!l || !l->is_terminal())
            throw OracleError("graph still contains nonterminal edge '" + e.label + "'");
        auto it = g.factors.find(e.label);
        if (it == g.factors.end())
            throw OracleError("no table for terminal '" + e.label + "'");
        Factor f{{}, std::vector<std::size_t>(e.att.size()), &it->second.weights};
        for (const auto& a : e.att)
            f.att.push_back(index.at(a));
        std::size_t s = 1;
        for (std::size_t k = e.att.size(); k-- > 0;) {
            f.stride[k] = s;
            s *= size[f.att[k]];
        }
        factors.push_back(std::move(f));
    }

    // Visit nodes so that factors close as early as possible.
    std::size_t n = size.size();
    std::vector<std::size_t> order;
    std::vector<bool> placed(n, false);
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t best = n;
        int best_score = -1;
        for (std::size_t v = 0; v < n; ++v) {
            if (placed[v])
                continue;
            int score = 0;
            for (const auto& f : factors)
                if (std::find(f.att.begin(), f.att.end(), v) != f.att.end())
                    for (std::size_t a : f.att)
                        score += placed[a] ? 1 : 0;
            if (score > best_score) {
                best_score = score;
                best = v;
            }
        }
        placed[best] = true;
        order.push_back(best);
    }
    std::vector<std::size_t> position(n);
    for (std::size_t k = 0; k < n; ++k)
        position[order[k]] = k;
    // closes[k]: factors whose last node is order[k]; closes[n]: nullary.
    std::vector<std::vector<const Factor*>> closes(n + 1);
    for (const auto& f : factors) {
        if (f.att.empty()) {
            closes[n].push_back(&f);
            continue;
        }
        std::size_t last = 0;
        for (std::size_t a : f.att)
            last = std::max(last, position[a]);
        closes[last].push_back(&f);
    }

    std::vector<std::string> ext_domains;
    std::vector<std::size_t> ext_shape, ext_index;
    for (const auto& id : graph.ext) {
        ext_domains.push_back(graph.find_node(id)->domain);
        ext_index.push_back(index.at(id));
        ext_shape.push_back(size[index.at(id)]);
    }
    WeightTensor out(ext_domains, ext_shape, 0.0);

    double base = 1.0;
    for (const Factor* f : closes[n])
        base *= (*f->weights)[0];
    if (base == 0.0)
        return out;

    std::vector<std::size_t> xi(n, 0);
    std::vector<std::size_t> at(ext_index.size());
    auto dfs = [&](auto&& self, std::size_t k, double w) -> void {
        if (k == n) {
            for (std::size_t i = 0; i < ext_index.size(); ++i)
                at[i] = xi[ext_index[i]];
            out.at(at) += w;
            return;
        }
        std::size_t v = order[k];
        for (std::size_t val = 0; val < size[v]; ++val) {
            xi[v] = val;
            double next = w;
            for (const Factor* f : closes[k]) {
                std::size_t off = 0;
                for (std::size_t i = 0; i < f->att.size(); ++i)
                    off += xi[f->att[i]] * f->stride[i];
                next *= (*f->weights)[off];
                if (next == 0.0)
                    break;
            }
            if (next != 0.0)
                self(self, k + 1, next);
        }
    };
    dfs(dfs, 0, base);
    return out;
}

WeightTensor truncated_wX(const Grammar& g, const std::string& x, std::size_t max_height,
                          const EnumerationOptions& options) {
    std::vector<std::string> domains;
    std::vector<std::size_t> shape;
    for (const auto& r : g.rules)
        if (r.lhs == x) {
            for (const auto& id : r.rhs.ext) {
                domains.push_back(r.rhs.find_node(id)->domain);
                shape.push_back(g.domain(domains.back()).size());
            }
            break;
        }
    WeightTensor total(domains, shape, 0.0);
    for (const auto& tree : enumerate_derivations(g, x, max_height, options)) {
        WeightTensor t = brute_force_marginal(yield_graph(*tree, g), g);
        for (std::size_t i = 0; i < total.size(); ++i)
            total.data()[i] += t.data()[i];
    }
    return total;
}

}  // namespace fgg::oracle
