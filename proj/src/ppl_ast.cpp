#include "fggpp/ppl_ast.hpp"

#include <type_traits>

namespace fgg::ppl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool needs_parens(const Expr& e) {
    return std::visit(overloaded{
                          [](const Var&) { return false; },
                          [](const Call&) { return false; },
                          [](const Fail&) { return false; },
                          [](const Builtin& b) { return b.op == BuiltinOp::Eq || b.op == BuiltinOp::Neq; },
                          [](const auto&) { return true; },
                      },
                      e.node);
}

std::string operand(const ExprPtr& e) {
    std::string s = print(*e);
    return needs_parens(*e) ? "(" + s + ")" : s;
}

std::string join_args(const std::vector<ExprPtr>& args) {
    std::string out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i)
            out += ", ";
        out += print(*args[i]);
    }
    return out;
}

}  // namespace

std::string builtin_name(BuiltinOp op) {
    switch (op) {
    case BuiltinOp::Eq:
        return "=";
    case BuiltinOp::Neq:
        return "!=";
    case BuiltinOp::True:
        return "true";
    case BuiltinOp::False:
        return "false";
    case BuiltinOp::Unit:
        return "unit";
    case BuiltinOp::Nil:
        return "nil";
    case BuiltinOp::Pair:
        return "(,)";
    case BuiltinOp::Fst:
        return "fst";
    case BuiltinOp::Snd:
        return "snd";
    case BuiltinOp::Inl:
        return "inl";
    case BuiltinOp::Inr:
        return "inr";
    case BuiltinOp::Cons:
        return "cons";
    case BuiltinOp::Car:
        return "car";
    case BuiltinOp::Cdr:
        return "cdr";
    case BuiltinOp::Lookup:
        return "[]";
    case BuiltinOp::Constant:
        return "const";
    }
    return "?";
}

const FunDef* Program::find_function(const std::string& name) const {
    for (const auto& f : functions)
        if (f.name == name)
            return &f;
    return nullptr;
}

std::vector<ExprPtr> children(const Expr& e) {
    return std::visit(overloaded{
                          [](const Var&) { return std::vector<ExprPtr>{}; },
                          [](const Let& x) { return std::vector<ExprPtr>{x.bound, x.body}; },
                          [](const Call& x) { return x.args; },
                          [](const Sample& x) { return std::vector<ExprPtr>{x.dist}; },
                          [](const Observe& x) { return std::vector<ExprPtr>{x.value, x.dist}; },
                          [](const If& x) { return std::vector<ExprPtr>{x.cond, x.then_branch, x.else_branch}; },
                          [](const Case& x) { return std::vector<ExprPtr>{x.scrutinee, x.left, x.right}; },
                          [](const Builtin& x) { return x.args; },
                          [](const And& x) { return std::vector<ExprPtr>{x.lhs, x.rhs}; },
                          [](const Or& x) { return std::vector<ExprPtr>{x.lhs, x.rhs}; },
                          [](const Fail&) { return std::vector<ExprPtr>{}; },
                      },
                      e.node);
}

std::string print(const Expr& e) {
    return std::visit(
        overloaded{
            [](const Var& x) { return x.name; },
            [](const Let& x) { return "let " + x.name + " = " + print(*x.bound) + " in " + print(*x.body); },
            [](const Call& x) { return x.callee + "(" + join_args(x.args) + ")"; },
            [](const Sample& x) { return "sample " + operand(x.dist); },
            [](const Observe& x) { return "observe " + operand(x.value) + " <- " + operand(x.dist); },
            [](const If& x) {
                return "if " + print(*x.cond) + " then " + operand(x.then_branch) + " else " + operand(x.else_branch);
            },
            [](const Case& x) {
                return "case " + print(*x.scrutinee) + " of inl " + x.left_name + " => " + operand(x.left) +
                       " | inr " + x.right_name + " => " + operand(x.right);
            },
            [](const Builtin& x) -> std::string {
                switch (x.op) {
                case BuiltinOp::Eq:
                    return operand(x.args[0]) + " = " + operand(x.args[1]);
                case BuiltinOp::Neq:
                    return operand(x.args[0]) + " != " + operand(x.args[1]);
                case BuiltinOp::True:
                case BuiltinOp::False:
                case BuiltinOp::Unit:
                case BuiltinOp::Nil:
                    return builtin_name(x.op);
                case BuiltinOp::Pair:
                    return "(" + join_args(x.args) + ")";
                case BuiltinOp::Inl:
                case BuiltinOp::Inr:
                    return builtin_name(x.op) + "(" + print(*x.args[0]) + ")";
                case BuiltinOp::Lookup:
                    return x.symbol + "[" + print(*x.args[0]) + "]";
                case BuiltinOp::Constant:
                    return x.symbol.empty() ? x.constant.to_string() : x.symbol;
                default:
                    return builtin_name(x.op) + "(" + join_args(x.args) + ")";
                }
            },
            [](const And& x) { return operand(x.lhs) + " and " + operand(x.rhs); },
            [](const Or& x) { return operand(x.lhs) + " or " + operand(x.rhs); },
            [](const Fail&) { return std::string("fail"); },
        },
        e.node);
}

std::string print(const Program& p) {
    std::string out;
    for (const auto& f : p.functions) {
        out += "fun " + f.name + "(";
        for (std::size_t i = 0; i < f.params.size(); ++i)
            out += (i ? ", " : "") + f.params[i];
        out += ") = " + print(*f.body) + ";\n";
    }
    if (p.main)
        out += print(*p.main) + "\n";
    return out;
}

std::size_t count_subexpressions(const Program& p) {
    std::size_t n = 0;
    auto walk = [&](auto&& self, const ExprPtr& e) -> void {
        ++n;
        for (const auto& c : children(*e))
            self(self, c);
    };
    for (const auto& f : p.functions)
        walk(walk, f.body);
    if (p.main)
        walk(walk, p.main);
    return n;
}

}  // namespace fgg::ppl
