#include "fggpp/oracle.hpp"

namespace fgg::oracle {

using namespace ppl;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct Outcome {
    Value value;
    std::string path;
    double weight;
};

using Outcomes = std::vector<Outcome>;
using Env = std::vector<std::pair<std::string, Value>>;

// Outcomes with the same value and path are one branch.
Outcomes merge(const Outcomes& xs) {
    std::map<std::pair<std::string, Value>, double> acc;
    for (const auto& o : xs)
        if (o.weight > 0.0)
            acc[{o.path, o.value}] += o.weight;
    Outcomes out;
    for (const auto& [key, w] : acc)
        out.push_back({key.second, key.first, w});
    return out;
}

class Interpreter {
  public:
    Interpreter(const Program& p, const Params& params, std::size_t bound) : p_(p), params_(params), bound_(bound) {}

    Outcomes eval(const Expr& e, const Env& env, std::size_t depth) {
        return std::visit(
            overloaded{
                [&](const Var& x) -> Outcomes {
                    for (auto it = env.rbegin(); it != env.rend(); ++it)
                        if (it->first == x.name)
                            return {{it->second, "", 1.0}};
                    throw OracleError(e.pos.to_string() + ": unbound variable '" + x.name + "'");
                },
                [&](const Let& x) {
                    Outcomes out;
                    for (const auto& b : eval(*x.bound, env, depth)) {
                        Env inner = env;
                        inner.emplace_back(x.name, b.value);
                        for (const auto& r : eval(*x.body, inner, depth))
                            out.push_back({r.value, b.path + r.path, b.weight * r.weight});
                    }
                    return merge(out);
                },
                [&](const Call& x) {
                    Outcomes out;
                    const FunDef* f = p_.find_function(x.callee);
                    if (!f)
                        throw OracleError(e.pos.to_string() + ": unknown function '" + x.callee + "'");
                    if (depth + 1 > bound_)
                        return out;
                    for (const auto& [args, path, w] : sequence(x.args, env, depth)) {
                        Env inner;
                        for (std::size_t i = 0; i < args.size(); ++i)
                            inner.emplace_back(f->params[i], args[i]);
                        for (const auto& r : eval(*f->body, inner, depth + 1))
                            out.push_back({r.value, path + r.path, w * r.weight});
                    }
                    return merge(out);
                },
                [&](const Sample& x) {
                    Outcomes out;
                    for (const auto& d : eval(*x.dist, env, depth))
                        for (const auto& [v, p] : pmf_of(d.value))
                            out.push_back({v, d.path, d.weight * p});
                    return merge(out);
                },
                [&](const Observe& x) {
                    Outcomes out;
                    for (const auto& v : eval(*x.value, env, depth))
                        for (const auto& d : eval(*x.dist, env, depth)) {
                            auto pmf = pmf_of(d.value);
                            auto it = pmf.find(v.value);
                            if (it != pmf.end())
                                out.push_back({v.value, v.path + d.path, v.weight * d.weight * it->second});
                        }
                    return merge(out);
                },
                [&](const If& x) {
                    Outcomes out;
                    for (const auto& c : eval(*x.cond, env, depth)) {
                        if (!c.value.is(Value::Kind::Bool))
                            continue;
                        bool taken = c.value.as_bool();
                        std::string tag = taken ? "T" : "F";
                        for (const auto& r : eval(taken ? *x.then_branch : *x.else_branch, env, depth))
                            out.push_back({r.value, c.path + tag + r.path, c.weight * r.weight});
                    }
                    return merge(out);
                },
                [&](const Case& x) {
                    Outcomes out;
                    for (const auto& s : eval(*x.scrutinee, env, depth)) {
                        bool left = s.value.is(Value::Kind::Inl);
                        if (!left && !s.value.is(Value::Kind::Inr))
                            continue;
                        Env inner = env;
                        inner.emplace_back(left ? x.left_name : x.right_name, s.value.payload());
                        for (const auto& r : eval(left ? *x.left : *x.right, inner, depth))
                            out.push_back({r.value, s.path + (left ? "L" : "R") + r.path, s.weight * r.weight});
                    }
                    return merge(out);
                },
                [&](const Builtin& x) {
                    Outcomes out;
                    for (const auto& [args, path, w] : sequence(x.args, env, depth))
                        if (auto v = builtin(x, args))
                            out.push_back({*v, path, w});
                    return merge(out);
                },
                [&](const auto&) -> Outcomes {
                    throw OracleError(e.pos.to_string() + ": interpreter expects a desugared program");
                },
            },
            e.node);
    }

  private:
    struct Joint {
        std::vector<Value> values;
        std::string path;
        double weight;
    };

    // Left-to-right evaluation of an argument list.
    std::vector<Joint> sequence(const std::vector<ExprPtr>& args, const Env& env, std::size_t depth) {
        std::vector<Joint> acc{{{}, "", 1.0}};
        for (const auto& a : args) {
            std::vector<Joint> next;
            Outcomes rs = eval(*a, env, depth);
            for (const auto& j : acc)
                for (const auto& r : rs) {
                    Joint k = j;
                    k.values.push_back(r.value);
                    k.path += r.path;
                    k.weight *= r.weight;
                    next.push_back(std::move(k));
                }
            acc = std::move(next);
        }
        return acc;
    }

    std::map<Value, double> pmf_of(const Value& d) {
        if (!d.is(Value::Kind::Dist))
            return {};
        const Pmf* pmf = params_.pmf(d.name());
        if (!pmf)
            return {};
        std::map<Value, double> out;
        for (const auto& [v, w] : *pmf)
            if (w > 0.0)
                out[v] = w;
        return out;
    }

    std::optional<Value> builtin(const Builtin& b, const std::vector<Value>& a) {
        auto pair_part = [&](bool first) -> std::optional<Value> {
            if (a[0].kind() != Value::Kind::Pair)
                return std::nullopt;
            return first ? a[0].first() : a[0].second();
        };
        switch (b.op) {
        case BuiltinOp::Eq:
            return Value::boolean(a[0] == a[1]);
        case BuiltinOp::Neq:
            return Value::boolean(!(a[0] == a[1]));
        case BuiltinOp::True:
            return Value::boolean(true);
        case BuiltinOp::False:
            return Value::boolean(false);
        case BuiltinOp::Unit:
            return Value::unit();
        case BuiltinOp::Nil:
            return Value::atom("nil");
        case BuiltinOp::Pair:
        case BuiltinOp::Cons:
            return Value::pair(a[0], a[1]);
        case BuiltinOp::Fst:
        case BuiltinOp::Car:
            return pair_part(true);
        case BuiltinOp::Snd:
        case BuiltinOp::Cdr:
            return pair_part(false);
        case BuiltinOp::Inl:
            return Value::inl(a[0]);
        case BuiltinOp::Inr:
            return Value::inr(a[0]);
        case BuiltinOp::Lookup: {
            auto table = params_.tables.find(b.symbol);
            if (table == params_.tables.end() || !table->second.count(a[0]))
                return std::nullopt;
            return Value::dist(b.symbol + "[" + a[0].to_string() + "]");
        }
        case BuiltinOp::Constant:
            return b.constant;
        }
        return std::nullopt;
    }

    const Program& p_;
    const Params& params_;
    std::size_t bound_;
};

}  // namespace

std::size_t Interpretation::live_paths() const {
    std::size_t n = 0;
    for (const auto& [path, w] : paths)
        n += w > 0.0 ? 1 : 0;
    return n;
}

Interpretation interpret(const Program& p, const Params& params, std::size_t depth_bound) {
    Interpretation out;
    if (depth_bound == 0 || !p.main)
        return out;
    Interpreter in(p, params, depth_bound);
    for (const auto& o : in.eval(*p.main, {}, 1)) {
        out.weights[o.value] += o.weight;
        out.paths[o.path] += o.weight;
    }
    return out;
}

}  // namespace fgg::oracle
