#include "fggpp/ppl_types.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace fgg::ppl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using ValueSet = std::set<Value>;

class UnionFind {
  public:
    int make() {
        parent_.push_back(static_cast<int>(parent_.size()));
        return parent_.back();
    }
    int find(int x) {
        while (parent_[x] != x)
            x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b)
            parent_[std::max(a, b)] = std::min(a, b);
    }
    std::size_t size() const { return parent_.size(); }

  private:
    std::vector<int> parent_;
};

// A source of values flowing into a class.
struct Contribution {
    enum class Kind { Builtin, Sample, Inl, Inr } kind;
    int target = 0;
    const Expr* expr = nullptr;
    std::vector<int> sources;
    // When set, only values with positive density under some distribution
    // in this class survive (the value side of an observe).
    std::optional<int> density_filter;
};

struct Check {
    enum class Kind { Bool, Sum, Dist } kind;
    int cls;
    SourcePos pos;
    std::string what;
};

class DomainInference {
  public:
    DomainInference(const Program& p, const Params& params, const DomainOptions& options)
        : program_(p), params_(params), options_(options) {}

    TypedProgram run() {
        for (const auto& f : program_.functions) {
            auto& sig = fun_classes_[f.name];
            for (std::size_t i = 0; i < f.params.size(); ++i) {
                int c = uf_.make();
                sig.params.push_back(c);
                declare(f.name + "." + f.params[i], c);
            }
            sig.result = uf_.make();
        }
        for (const auto& f : program_.functions) {
            Env env;
            const auto& sig = fun_classes_.at(f.name);
            for (std::size_t i = 0; i < f.params.size(); ++i)
                env.emplace_back(f.params[i], sig.params[i]);
            int body = walk(f.body, env, std::nullopt);
            uf_.unite(body, sig.result);
        }
        {
            Env env;
            walk(program_.main, env, std::nullopt);
        }
        propagate();
        for (const auto& c : checks_)
            enforce(c);
        return build();
    }

  private:
    using Env = std::vector<std::pair<std::string, int>>;

    struct FunClasses {
        std::vector<int> params;
        int result = 0;
    };

    void declare(const std::string& name, int cls) {
        auto it = params_.domains.find(name);
        if (it != params_.domains.end())
            declared_.emplace_back(cls, ValueSet(it->second.begin(), it->second.end()));
    }

    static Env bind(Env env, const std::string& name, int cls) {
        std::erase_if(env, [&](const auto& entry) { return entry.first == name; });
        env.emplace_back(name, cls);
        return env;
    }

    // Registers classes and constraints for `e`; returns its result class.
    int walk(const ExprPtr& e, const Env& env, std::optional<int> filter) {
        int self = uf_.make();
        expr_class_[e.get()] = self;
        expr_env_[e.get()] = env;
        order_.push_back(e.get());
        std::visit(
            overloaded{
                [&](const Var& x) {
                    auto it = std::find_if(env.rbegin(), env.rend(), [&](const auto& p) { return p.first == x.name; });
                    if (it == env.rend())
                        throw TypeError(e->pos, "unbound variable '" + x.name + "'");
                    uf_.unite(self, it->second);
                },
                [&](const Let& x) {
                    int bound = walk(x.bound, env, std::nullopt);
                    declare(x.name, bound);
                    int body = walk(x.body, bind(env, x.name, bound), std::nullopt);
                    uf_.unite(self, body);
                },
                [&](const Call& x) {
                    auto it = fun_classes_.find(x.callee);
                    if (it == fun_classes_.end())
                        throw TypeError(e->pos, "call to undefined function '" + x.callee + "'");
                    if (it->second.params.size() != x.args.size())
                        throw TypeError(e->pos, "wrong number of arguments to '" + x.callee + "'");
                    for (std::size_t i = 0; i < x.args.size(); ++i)
                        uf_.unite(walk(x.args[i], env, std::nullopt), it->second.params[i]);
                    uf_.unite(self, it->second.result);
                },
                [&](const Sample& x) {
                    int d = walk(x.dist, env, std::nullopt);
                    checks_.push_back({Check::Kind::Dist, d, x.dist->pos, "argument of sample"});
                    contributions_.push_back({Contribution::Kind::Sample, self, e.get(), {d}, filter});
                },
                [&](const Observe& x) {
                    int d = walk(x.dist, env, std::nullopt);
                    checks_.push_back({Check::Kind::Dist, d, x.dist->pos, "distribution of observe"});
                    int v = walk(x.value, env, d);
                    uf_.unite(self, v);
                },
                [&](const If& x) {
                    int c = walk(x.cond, env, std::nullopt);
                    checks_.push_back({Check::Kind::Bool, c, x.cond->pos, "condition of if"});
                    uf_.unite(self, walk(x.then_branch, env, std::nullopt));
                    uf_.unite(self, walk(x.else_branch, env, std::nullopt));
                },
                [&](const Case& x) {
                    int s = walk(x.scrutinee, env, std::nullopt);
                    checks_.push_back({Check::Kind::Sum, s, x.scrutinee->pos, "scrutinee of case"});
                    int l = uf_.make();
                    int r = uf_.make();
                    declare(x.left_name, l);
                    declare(x.right_name, r);
                    contributions_.push_back({Contribution::Kind::Inl, l, e.get(), {s}, std::nullopt});
                    contributions_.push_back({Contribution::Kind::Inr, r, e.get(), {s}, std::nullopt});
                    binder_class_[{e.get(), 0}] = l;
                    binder_class_[{e.get(), 1}] = r;
                    uf_.unite(self, walk(x.left, bind(env, x.left_name, l), std::nullopt));
                    uf_.unite(self, walk(x.right, bind(env, x.right_name, r), std::nullopt));
                },
                [&](const Builtin& x) {
                    std::vector<int> args;
                    for (const auto& a : x.args)
                        args.push_back(walk(a, env, std::nullopt));
                    if (x.op == BuiltinOp::Lookup && !params_.tables.count(x.symbol))
                        throw TypeError(e->pos, "unknown distribution table '" + x.symbol + "'");
                    if (x.op == BuiltinOp::Constant && x.constant.is(Value::Kind::Dist) &&
                        !params_.pmf(x.constant.name()))
                        throw TypeError(e->pos, "unknown distribution '" + x.constant.name() + "'");
                    contributions_.push_back({Contribution::Kind::Builtin, self, e.get(), args, filter});
                },
                [&](const auto&) { throw TypeError(e->pos, "surface form remains; run desugar first"); },
            },
            e->node);
        return self;
    }

    ValueSet& set_of(int cls) { return sets_[uf_.find(cls)]; }

    bool admit(int cls, const Value& v) {
        int root = uf_.find(cls);
        for (const auto& [dcls, allowed] : declared_)
            if (uf_.find(dcls) == root && !allowed.count(v))
                return false;
        return set_of(root).insert(v).second;
    }

    bool positive_density(const Value& v, int dist_cls) {
        for (const auto& d : set_of(dist_cls)) {
            if (!d.is(Value::Kind::Dist))
                continue;
            const Pmf* pmf = params_.pmf(d.name());
            if (!pmf)
                continue;
            auto it = pmf->find(v);
            if (it != pmf->end() && it->second > 0.0)
                return true;
        }
        return false;
    }

    void propagate() {
        for (const auto& [cls, allowed] : declared_)
            for (const auto& v : allowed)
                admit(cls, v);
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& c : contributions_) {
                std::vector<Value> produced;
                switch (c.kind) {
                case Contribution::Kind::Sample:
                    for (const auto& d : std::vector<Value>(set_of(c.sources[0]).begin(), set_of(c.sources[0]).end())) {
                        if (!d.is(Value::Kind::Dist))
                            continue;
                        if (const Pmf* pmf = params_.pmf(d.name()))
                            for (const auto& [v, w] : *pmf)
                                if (w > 0.0)
                                    produced.push_back(v);
                    }
                    break;
                case Contribution::Kind::Inl:
                case Contribution::Kind::Inr: {
                    auto want = c.kind == Contribution::Kind::Inl ? Value::Kind::Inl : Value::Kind::Inr;
                    for (const auto& v : set_of(c.sources[0]))
                        if (v.is(want))
                            produced.push_back(v.payload());
                    break;
                }
                case Contribution::Kind::Builtin: {
                    const auto& b = std::get<Builtin>(c.expr->node);
                    std::vector<std::vector<Value>> pools;
                    std::vector<std::size_t> shape;
                    bool empty = false;
                    for (int s : c.sources) {
                        pools.emplace_back(set_of(s).begin(), set_of(s).end());
                        shape.push_back(pools.back().size());
                        empty = empty || pools.back().empty();
                    }
                    if (empty)
                        break;
                    std::vector<std::size_t> idx(pools.size(), 0);
                    std::vector<Value> args(pools.size());
                    while (true) {
                        for (std::size_t k = 0; k < pools.size(); ++k)
                            args[k] = pools[k][idx[k]];
                        if (auto v = apply_builtin(b, args, params_))
                            produced.push_back(*v);
                        std::size_t k = idx.size();
                        while (k > 0 && ++idx[k - 1] == shape[k - 1])
                            idx[--k] = 0;
                        if (k == 0)
                            break;
                    }
                    break;
                }
                }
                for (const auto& v : produced) {
                    if (c.density_filter && !positive_density(v, *c.density_filter))
                        continue;
                    if (admit(c.target, v)) {
                        changed = true;
                        if (set_of(c.target).size() > options_.max_domain_size)
                            throw TypeError(c.expr->pos,
                                            "value set exceeds " + std::to_string(options_.max_domain_size) +
                                                " values; the data type is not finitely enumerable here. Declare a "
                                                "finite enumeration in the parameter file's \"domains\"");
                    }
                }
            }
        }
    }

    void enforce(const Check& c) {
        for (const auto& v : set_of(c.cls)) {
            bool ok = c.kind == Check::Kind::Bool  ? v.is(Value::Kind::Bool)
                      : c.kind == Check::Kind::Sum ? v.is(Value::Kind::Inl) || v.is(Value::Kind::Inr)
                                                   : v.is(Value::Kind::Dist);
            if (!ok) {
                std::string expected = c.kind == Check::Kind::Bool  ? "a boolean"
                                       : c.kind == Check::Kind::Sum ? "inl/inr values"
                                                                    : "a distribution";
                throw TypeError(c.pos, c.what + " must be " + expected + ", but can be " + v.to_string());
            }
        }
    }

    std::string domain_name(int cls) {
        int root = uf_.find(cls);
        if (auto it = class_domain_.find(root); it != class_domain_.end())
            return it->second;
        std::vector<Value> values(set_of(root).begin(), set_of(root).end());
        // Uninhabited: any single value serves, since every factor touching it is zero.
        if (values.empty())
            values.push_back(Value::unit());
        auto it = by_content_.find(values);
        std::string name;
        if (it != by_content_.end()) {
            name = it->second;
        } else {
            name = "D" + std::to_string(by_content_.size());
            by_content_.emplace(values, name);
            out_.domains[name] = Domain{name, values};
        }
        class_domain_[root] = name;
        return name;
    }

    TypedProgram build() {
        out_.program = program_;
        out_.params = params_;
        for (const auto& f : program_.functions) {
            FunctionSignature sig;
            for (int c : fun_classes_.at(f.name).params)
                sig.params.push_back(domain_name(c));
            sig.result = domain_name(fun_classes_.at(f.name).result);
            out_.signatures[f.name] = sig;
        }
        for (const Expr* e : order_) {
            TypedExpr t;
            for (const auto& [name, cls] : expr_env_.at(e))
                t.env.emplace_back(name, domain_name(cls));
            t.result = domain_name(expr_class_.at(e));
            out_.types[e] = std::move(t);
        }
        return std::move(out_);
    }

    const Program& program_;
    const Params& params_;
    DomainOptions options_;
    UnionFind uf_;
    std::map<std::string, FunClasses> fun_classes_;
    std::map<const Expr*, int> expr_class_;
    std::map<const Expr*, Env> expr_env_;
    std::map<std::pair<const Expr*, int>, int> binder_class_;
    std::vector<const Expr*> order_;
    std::vector<Contribution> contributions_;
    std::vector<Check> checks_;
    std::vector<std::pair<int, ValueSet>> declared_;
    std::map<int, ValueSet> sets_;
    std::map<int, std::string> class_domain_;
    std::map<std::vector<Value>, std::string> by_content_;
    TypedProgram out_;
};

}  // namespace

const TypedExpr& TypedProgram::type_of(const Expr& e) const {
    auto it = types.find(&e);
    if (it == types.end())
        throw TypeError(e.pos, "expression has no type annotation");
    return it->second;
}

std::optional<Value> apply_builtin(const Builtin& b, std::span<const Value> args, const Params& params) {
    switch (b.op) {
    case BuiltinOp::Eq:
        return Value::boolean(args[0] == args[1]);
    case BuiltinOp::Neq:
        return Value::boolean(args[0] != args[1]);
    case BuiltinOp::True:
        return Value::boolean(true);
    case BuiltinOp::False:
        return Value::boolean(false);
    case BuiltinOp::Unit:
        return Value::unit();
    case BuiltinOp::Nil:
        return Value::nil();
    case BuiltinOp::Pair:
    case BuiltinOp::Cons:
        return Value::pair(args[0], args[1]);
    case BuiltinOp::Fst:
    case BuiltinOp::Car:
        if (args[0].is(Value::Kind::Pair))
            return args[0].first();
        return std::nullopt;
    case BuiltinOp::Snd:
    case BuiltinOp::Cdr:
        if (args[0].is(Value::Kind::Pair))
            return args[0].second();
        return std::nullopt;
    case BuiltinOp::Inl:
        return Value::inl(args[0]);
    case BuiltinOp::Inr:
        return Value::inr(args[0]);
    case BuiltinOp::Lookup: {
        auto t = params.tables.find(b.symbol);
        if (t == params.tables.end() || !t->second.count(args[0]))
            return std::nullopt;
        return Value::dist(row_name(b.symbol, args[0]));
    }
    case BuiltinOp::Constant:
        return b.constant;
    }
    return std::nullopt;
}

TypedProgram assign_domains(const Program& p, const Params& params, const DomainOptions& options) {
    return DomainInference(p, params, options).run();
}

}  // namespace fgg::ppl
