#include "fggpp/translate.hpp"

#include "fggpp/tensor.hpp"

#include <algorithm>
#include <functional>

namespace fgg {

using namespace ppl;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const std::string kResult = "$v";

class Translator {
  public:
    explicit Translator(const TypedProgram& tp) : tp_(tp) {}

    CompilationUnit run() {
        const Program& p = tp_.program;
        for (const auto& f : p.functions) {
            cu_.function_labels.insert(f.name);
            reserved_.insert(f.name);
        }
        start_ = "S";
        while (reserved_.count(start_))
            start_ += "'";
        reserved_.insert(start_);
        for (const auto& f : p.functions)
            name_all(f.body);
        name_all(p.main);

        g().start = start_;
        g().labels[start_] = EdgeLabel{start_, 1, LabelKind::Nonterminal};
        for (const auto& f : p.functions)
            g().labels[f.name] = EdgeLabel{f.name, f.params.size() + 1, LabelKind::Nonterminal};

        {
            const auto& t = tp_.type_of(*p.main);
            Hypergraph h;
            h.nodes.push_back({kResult, t.result});
            h.ext = {kResult};
            attach_nonterminal(h, *p.main, {}, kResult);
            emit(start_, std::move(h), p.main->pos, "program");
        }
        for (const auto& f : p.functions) {
            const auto& sig = tp_.signatures.at(f.name);
            Hypergraph h;
            for (std::size_t i = 0; i < f.params.size(); ++i) {
                h.nodes.push_back({f.params[i], sig.params[i]});
                h.ext.push_back(f.params[i]);
            }
            h.nodes.push_back({kResult, sig.result});
            h.ext.push_back(kResult);
            attach_nonterminal(h, *f.body, {}, kResult);
            emit(f.name, std::move(h), f.pos, "fun " + f.name);
        }
        for (const auto& f : p.functions)
            translate_all(f.body);
        translate_all(p.main);

        for (const auto& [name, dom] : tp_.domains)
            if (used_domains_.count(name))
                g().domains[name] = dom;
        return std::move(cu_);
    }

  private:
    Grammar& g() { return cu_.grammar; }

    void name_all(const ExprPtr& e) {
        std::string base = "e@" + e->pos.to_string();
        std::string label = base;
        for (int n = 2; reserved_.count(label); ++n)
            label = base + "#" + std::to_string(n);
        reserved_.insert(label);
        labels_[e.get()] = label;
        for (const auto& c : children(*e))
            name_all(c);
    }

    void translate_all(const ExprPtr& e) {
        translate(*e);
        for (const auto& c : children(*e))
            translate_all(c);
    }

    // Skeleton rhs for `e`: its environment and result as external nodes.
    Hypergraph skeleton(const Expr& e) {
        const auto& t = tp_.type_of(e);
        Hypergraph h;
        for (const auto& [name, dom] : t.env) {
            h.nodes.push_back({name, dom});
            h.ext.push_back(name);
        }
        h.nodes.push_back({kResult, t.result});
        h.ext.push_back(kResult);
        return h;
    }

    std::string add_node(Hypergraph& h, const std::string& base, const std::string& domain) {
        std::string id = base;
        for (int n = 2; h.find_node(id); ++n)
            id = base + std::to_string(n);
        h.nodes.push_back({id, domain});
        return id;
    }

    std::string next_edge_id(const Hypergraph& h) { return "h" + std::to_string(h.edges.size() + 1); }

    // Edge for subexpression `c`: its environment nodes come from the
    // enclosing rule, except names in `rename`, which map to internal nodes.
    void attach_nonterminal(Hypergraph& h, const Expr& c, const std::map<std::string, std::string>& rename,
                            const std::string& result) {
        const auto& t = tp_.type_of(c);
        const std::string& label = labels_.at(&c);
        Edge edge{next_edge_id(h), label, {}};
        for (const auto& [name, dom] : t.env) {
            auto it = rename.find(name);
            edge.att.push_back(it == rename.end() ? name : it->second);
        }
        edge.att.push_back(result);
        h.edges.push_back(std::move(edge));
        g().labels[label] = EdgeLabel{label, t.env.size() + 1, LabelKind::Nonterminal};
    }

    // Terminal edge whose table is `weight` over the domains of `att`.
    void attach_factor(Hypergraph& h, const std::string& kind, const std::vector<std::string>& att,
                       const std::function<double(const std::vector<Value>&)>& weight) {
        std::vector<std::string> doms;
        for (const auto& id : att)
            doms.push_back(h.find_node(id)->domain);
        std::string label = kind + "@";
        for (std::size_t i = 0; i < doms.size(); ++i)
            label += (i ? "," : "") + doms[i];
        h.edges.push_back(Edge{next_edge_id(h), label, att});
        if (g().factors.count(label))
            return;
        g().labels[label] = EdgeLabel{label, att.size(), LabelKind::Terminal};
        std::vector<std::size_t> shape;
        for (const auto& d : doms) {
            shape.push_back(tp_.domain(d).size());
            used_domains_.insert(d);
        }
        FactorTable table{label, doms, {}};
        std::vector<std::size_t> index(shape.size(), 0);
        std::vector<Value> args(shape.size());
        do {
            for (std::size_t k = 0; k < shape.size(); ++k)
                args[k] = tp_.domain(doms[k]).values[index[k]];
            table.weights.push_back(weight(args));
        } while (next_index(index, shape));
        g().factors[label] = std::move(table);
    }

    void emit(const std::string& lhs, Hypergraph h, SourcePos pos, const std::string& construct) {
        for (const auto& n : h.nodes)
            used_domains_.insert(n.domain);
        g().rules.push_back(Rule{lhs, std::move(h)});
        cu_.provenance.push_back({RuleOrigin{pos, construct}});
    }

    static double indicator(bool b) { return b ? 1.0 : 0.0; }

    void translate(const Expr& e) {
        const std::string& lhs = labels_.at(&e);
        const Params& params = tp_.params;
        auto density = [&](const std::vector<Value>& a) {
            if (!a[0].is(Value::Kind::Dist))
                return 0.0;
            const Pmf* pmf = params.pmf(a[0].name());
            if (!pmf)
                return 0.0;
            auto it = pmf->find(a[1]);
            return it == pmf->end() ? 0.0 : it->second;
        };
        auto result_of = [&](const ExprPtr& c) { return tp_.type_of(*c).result; };

        std::visit(
            overloaded{
                [&](const Var& x) {
                    Hypergraph h = skeleton(e);
                    attach_factor(h, "copy", {x.name, kResult},
                                  [](const std::vector<Value>& a) { return indicator(a[0] == a[1]); });
                    emit(lhs, std::move(h), e.pos, "var");
                },
                [&](const Let& x) {
                    Hypergraph h = skeleton(e);
                    std::string bound = add_node(h, "$" + x.name, result_of(x.bound));
                    attach_nonterminal(h, *x.bound, {}, bound);
                    attach_nonterminal(h, *x.body, {{x.name, bound}}, kResult);
                    emit(lhs, std::move(h), e.pos, "let");
                },
                [&](const Call& x) {
                    Hypergraph h = skeleton(e);
                    std::vector<std::string> args;
                    for (const auto& a : x.args) {
                        args.push_back(add_node(h, "$a", result_of(a)));
                        attach_nonterminal(h, *a, {}, args.back());
                    }
                    args.push_back(kResult);
                    h.edges.push_back(Edge{next_edge_id(h), x.callee, args});
                    emit(lhs, std::move(h), e.pos, "call " + x.callee);
                },
                [&](const Sample& x) {
                    Hypergraph h = skeleton(e);
                    std::string d = add_node(h, "$d", result_of(x.dist));
                    attach_nonterminal(h, *x.dist, {}, d);
                    attach_factor(h, "density", {d, kResult}, density);
                    emit(lhs, std::move(h), e.pos, "sample");
                },
                [&](const Observe& x) {
                    Hypergraph h = skeleton(e);
                    attach_nonterminal(h, *x.value, {}, kResult);
                    std::string d = add_node(h, "$d", result_of(x.dist));
                    attach_nonterminal(h, *x.dist, {}, d);
                    attach_factor(h, "density", {d, kResult}, density);
                    emit(lhs, std::move(h), e.pos, "observe");
                },
                [&](const If& x) {
                    cu_.branch_labels.insert(lhs);
                    for (bool arm : {true, false}) {
                        Hypergraph h = skeleton(e);
                        std::string c = add_node(h, "$c", result_of(x.cond));
                        attach_nonterminal(h, *x.cond, {}, c);
                        attach_factor(h, arm ? "guard true" : "guard false", {c}, [arm](const std::vector<Value>& a) {
                            return indicator(a[0].is(Value::Kind::Bool) && a[0].as_bool() == arm);
                        });
                        attach_nonterminal(h, arm ? *x.then_branch : *x.else_branch, {}, kResult);
                        emit(lhs, std::move(h), e.pos, arm ? "if:true" : "if:false");
                    }
                },
                [&](const Case& x) {
                    cu_.branch_labels.insert(lhs);
                    for (bool left : {true, false}) {
                        const Expr& arm = left ? *x.left : *x.right;
                        const std::string& binder = left ? x.left_name : x.right_name;
                        Hypergraph h = skeleton(e);
                        std::string s = add_node(h, "$s", result_of(x.scrutinee));
                        attach_nonterminal(h, *x.scrutinee, {}, s);
                        std::string y = add_node(h, "$" + binder, tp_.type_of(arm).env.back().second);
                        auto kind = left ? Value::Kind::Inl : Value::Kind::Inr;
                        attach_factor(h, left ? "guard inl" : "guard inr", {s, y},
                                      [kind](const std::vector<Value>& a) {
                                          return indicator(a[0].is(kind) && a[0].payload() == a[1]);
                                      });
                        attach_nonterminal(h, arm, {{binder, y}}, kResult);
                        emit(lhs, std::move(h), e.pos, left ? "case:inl" : "case:inr");
                    }
                },
                [&](const Builtin& x) {
                    Hypergraph h = skeleton(e);
                    std::vector<std::string> att;
                    for (const auto& a : x.args) {
                        att.push_back(add_node(h, "$a", result_of(a)));
                        attach_nonterminal(h, *a, {}, att.back());
                    }
                    att.push_back(kResult);
                    std::string kind = x.op == BuiltinOp::Constant ? "const " + x.constant.to_string()
                                       : x.op == BuiltinOp::Lookup ? "lookup " + x.symbol
                                                                   : builtin_name(x.op);
                    attach_factor(h, kind, att, [&x, &params](const std::vector<Value>& a) {
                        auto r = apply_builtin(x, std::span<const Value>(a.data(), a.size() - 1), params);
                        return indicator(r && *r == a.back());
                    });
                    emit(lhs, std::move(h), e.pos, "builtin " + builtin_name(x.op));
                },
                [&](const auto&) { throw TypeError(e.pos, "surface form remains; run desugar first"); },
            },
            e.node);
    }

    const TypedProgram& tp_;
    CompilationUnit cu_;
    std::string start_;
    std::set<std::string> reserved_;
    std::map<const Expr*, std::string> labels_;
    std::set<std::string> used_domains_;
};

}  // namespace

std::string factor_kind(const std::string& terminal_label) {
    auto at = terminal_label.rfind('@');
    return at == std::string::npos ? terminal_label : terminal_label.substr(0, at);
}

CompilationUnit translate(const TypedProgram& tp) {
    return Translator(tp).run();
}

}  // namespace fgg
