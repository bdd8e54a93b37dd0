#include "fggpp/ppl_passes.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace fgg::ppl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Rebuilds `e` bottom-up, letting `rewrite` replace any node after its
// children have been rebuilt.
template <class F>
ExprPtr transform(const ExprPtr& e, F&& rewrite) {
    auto t = [&](const ExprPtr& c) { return transform(c, rewrite); };
    auto each = [&](const std::vector<ExprPtr>& xs) {
        std::vector<ExprPtr> out;
        for (const auto& x : xs)
            out.push_back(t(x));
        return out;
    };
    ExprPtr rebuilt = std::visit(
        overloaded{
            [&](const Var& x) { return make_expr(x, e->pos); },
            [&](const Let& x) { return make_expr(Let{x.name, t(x.bound), t(x.body)}, e->pos); },
            [&](const Call& x) { return make_expr(Call{x.callee, each(x.args)}, e->pos); },
            [&](const Sample& x) { return make_expr(Sample{t(x.dist)}, e->pos); },
            [&](const Observe& x) { return make_expr(Observe{t(x.value), t(x.dist)}, e->pos); },
            [&](const If& x) {
                return make_expr(If{t(x.cond), t(x.then_branch), t(x.else_branch)}, e->pos);
            },
            [&](const Case& x) {
                return make_expr(Case{t(x.scrutinee), x.left_name, t(x.left), x.right_name, t(x.right)}, e->pos);
            },
            [&](const Builtin& x) { return make_expr(Builtin{x.op, each(x.args), x.symbol, x.constant}, e->pos); },
            [&](const And& x) { return make_expr(And{t(x.lhs), t(x.rhs)}, e->pos); },
            [&](const Or& x) { return make_expr(Or{t(x.lhs), t(x.rhs)}, e->pos); },
            [&](const Fail& x) { return make_expr(x, e->pos); },
        },
        e->node);
    return rewrite(rebuilt);
}

ExprPtr constant(BuiltinOp op, SourcePos pos) {
    return make_expr(Builtin{op, {}, {}, {}}, pos);
}

}  // namespace

Program desugar(const Program& p) {
    auto rewrite = [](const ExprPtr& e) -> ExprPtr {
        if (auto* a = std::get_if<And>(&e->node))
            return make_expr(If{a->lhs, a->rhs, constant(BuiltinOp::False, e->pos)}, e->pos);
        if (auto* o = std::get_if<Or>(&e->node))
            return make_expr(If{o->lhs, constant(BuiltinOp::True, e->pos), o->rhs}, e->pos);
        if (std::holds_alternative<Fail>(e->node)) {
            auto zero = make_expr(
                Builtin{BuiltinOp::Constant, {}, kZeroDistribution, Value::dist(kZeroDistribution)}, e->pos);
            return make_expr(Observe{constant(BuiltinOp::True, e->pos), zero}, e->pos);
        }
        return e;
    };
    Program out;
    for (const auto& f : p.functions)
        out.functions.push_back({f.name, f.params, transform(f.body, rewrite), f.pos});
    out.main = transform(p.main, rewrite);
    return out;
}

bool is_desugared(const Program& p) {
    bool clean = true;
    auto check = [&](auto&& self, const ExprPtr& e) -> void {
        if (std::holds_alternative<And>(e->node) || std::holds_alternative<Or>(e->node) ||
            std::holds_alternative<Fail>(e->node))
            clean = false;
        for (const auto& c : children(*e))
            self(self, c);
    };
    for (const auto& f : p.functions)
        check(check, f.body);
    check(check, p.main);
    return clean;
}

namespace {

ExprPtr resolve(const ExprPtr& e, std::vector<std::string>& bound, const Params& params,
                const std::set<std::string>& atoms) {
    auto r = [&](const ExprPtr& c) { return resolve(c, bound, params, atoms); };
    auto scoped = [&](const std::string& name, const ExprPtr& c) {
        bound.push_back(name);
        ExprPtr out = r(c);
        bound.pop_back();
        return out;
    };
    auto each = [&](const std::vector<ExprPtr>& xs) {
        std::vector<ExprPtr> out;
        for (const auto& x : xs)
            out.push_back(r(x));
        return out;
    };
    return std::visit(
        overloaded{
            [&](const Var& x) -> ExprPtr {
                if (std::find(bound.begin(), bound.end(), x.name) != bound.end())
                    return make_expr(x, e->pos);
                if (auto it = params.inputs.find(x.name); it != params.inputs.end())
                    return make_expr(Builtin{BuiltinOp::Constant, {}, x.name, it->second}, e->pos);
                if (params.distributions.count(x.name))
                    return make_expr(Builtin{BuiltinOp::Constant, {}, x.name, Value::dist(x.name)}, e->pos);
                if (atoms.count(x.name))
                    return make_expr(Builtin{BuiltinOp::Constant, {}, x.name, Value::atom(x.name)}, e->pos);
                return make_expr(x, e->pos);
            },
            [&](const Let& x) { return make_expr(Let{x.name, r(x.bound), scoped(x.name, x.body)}, e->pos); },
            [&](const Call& x) { return make_expr(Call{x.callee, each(x.args)}, e->pos); },
            [&](const Sample& x) { return make_expr(Sample{r(x.dist)}, e->pos); },
            [&](const Observe& x) { return make_expr(Observe{r(x.value), r(x.dist)}, e->pos); },
            [&](const If& x) { return make_expr(If{r(x.cond), r(x.then_branch), r(x.else_branch)}, e->pos); },
            [&](const Case& x) {
                return make_expr(Case{r(x.scrutinee), x.left_name, scoped(x.left_name, x.left), x.right_name,
                                      scoped(x.right_name, x.right)},
                                 e->pos);
            },
            [&](const Builtin& x) { return make_expr(Builtin{x.op, each(x.args), x.symbol, x.constant}, e->pos); },
            [&](const And& x) { return make_expr(And{r(x.lhs), r(x.rhs)}, e->pos); },
            [&](const Or& x) { return make_expr(Or{r(x.lhs), r(x.rhs)}, e->pos); },
            [&](const Fail& x) { return make_expr(x, e->pos); },
        },
        e->node);
}

}  // namespace

Program resolve_names(const Program& p, const Params& params) {
    std::set<std::string> atoms = params.atom_names();
    Program out;
    for (const auto& f : p.functions) {
        std::vector<std::string> bound = f.params;
        out.functions.push_back({f.name, f.params, resolve(f.body, bound, params, atoms), f.pos});
    }
    std::vector<std::string> bound;
    out.main = resolve(p.main, bound, params, atoms);
    return out;
}

std::vector<FrontendDiagnostic> scope_check(const Program& p) {
    std::vector<FrontendDiagnostic> out;
    std::map<std::string, const FunDef*> funs;
    for (const auto& f : p.functions) {
        if (!funs.emplace(f.name, &f).second)
            out.push_back({f.pos, "function '" + f.name + "' is defined more than once"});
        std::set<std::string> seen;
        for (const auto& x : f.params) {
            if (!seen.insert(x).second)
                out.push_back({f.pos, "parameter '" + x + "' of '" + f.name + "' is repeated"});
        }
    }
    auto binder = [&](const std::string& name, SourcePos pos) {
        if (funs.count(name))
            out.push_back({pos, "variable '" + name + "' has the same name as a function"});
    };
    for (const auto& f : p.functions)
        for (const auto& x : f.params)
            binder(x, f.pos);

    auto walk = [&](auto&& self, const ExprPtr& e, std::vector<std::string>& bound) -> void {
        auto scoped = [&](const std::string& name, const ExprPtr& c) {
            binder(name, e->pos);
            bound.push_back(name);
            self(self, c, bound);
            bound.pop_back();
        };
        std::visit(overloaded{
                       [&](const Var& x) {
                           if (std::find(bound.begin(), bound.end(), x.name) == bound.end())
                               out.push_back({e->pos, "unbound variable '" + x.name + "'"});
                       },
                       [&](const Let& x) {
                           self(self, x.bound, bound);
                           scoped(x.name, x.body);
                       },
                       [&](const Call& x) {
                           auto it = funs.find(x.callee);
                           if (it == funs.end())
                               out.push_back({e->pos, "call to undefined function '" + x.callee + "'"});
                           else if (it->second->params.size() != x.args.size())
                               out.push_back({e->pos, "function '" + x.callee + "' expects " +
                                                          std::to_string(it->second->params.size()) +
                                                          " argument(s) but is given " +
                                                          std::to_string(x.args.size())});
                           for (const auto& a : x.args)
                               self(self, a, bound);
                       },
                       [&](const Case& x) {
                           self(self, x.scrutinee, bound);
                           scoped(x.left_name, x.left);
                           scoped(x.right_name, x.right);
                       },
                       [&](const auto& x) {
                           using T = std::decay_t<decltype(x)>;
                           if constexpr (std::is_same_v<T, And> || std::is_same_v<T, Or> ||
                                         std::is_same_v<T, Fail>)
                               out.push_back({e->pos, "surface form remains; run desugar first"});
                           for (const auto& c : children(*e))
                               self(self, c, bound);
                       },
                   },
                   e->node);
    };
    for (const auto& f : p.functions) {
        std::vector<std::string> bound = f.params;
        walk(walk, f.body, bound);
    }
    std::vector<std::string> bound;
    if (p.main)
        walk(walk, p.main, bound);
    return out;
}

}  // namespace fgg::ppl
