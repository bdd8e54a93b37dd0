#pragma once

#include "fggpp/value.hpp"

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace fgg::ppl {

struct SourcePos {
    int line = 0;
    int column = 0;

    std::string to_string() const { return std::to_string(line) + ":" + std::to_string(column); }
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BuiltinOp {
    Eq,
    Neq,
    True,
    False,
    Unit,
    Nil,
    Pair,
    Fst,
    Snd,
    Inl,
    Inr,
    Cons,
    Car,
    Cdr,
    Lookup,    // param[e]; `symbol` names the parameter table
    Constant,  // atoms, inputs and named distributions; `constant` holds the value
};

std::string builtin_name(BuiltinOp op);

struct Var {
    std::string name;
};
struct Let {
    std::string name;
    ExprPtr bound;
    ExprPtr body;
};
struct Call {
    std::string callee;
    std::vector<ExprPtr> args;
};
struct Sample {
    ExprPtr dist;
};
struct Observe {
    ExprPtr value;
    ExprPtr dist;
};
struct If {
    ExprPtr cond;
    ExprPtr then_branch;
    ExprPtr else_branch;
};
struct Case {
    ExprPtr scrutinee;
    std::string left_name;
    ExprPtr left;
    std::string right_name;
    ExprPtr right;
};
struct Builtin {
    BuiltinOp op;
    std::vector<ExprPtr> args;
    std::string symbol;
    Value constant;
};
// Surface-only forms; removed by desugar().
struct And {
    ExprPtr lhs;
    ExprPtr rhs;
};
struct Or {
    ExprPtr lhs;
    ExprPtr rhs;
};
struct Fail {};

struct Expr {
    std::variant<Var, Let, Call, Sample, Observe, If, Case, Builtin, And, Or, Fail> node;
    SourcePos pos;
};

template <class T>
ExprPtr make_expr(T node, SourcePos pos) {
    return std::make_shared<const Expr>(Expr{std::move(node), pos});
}

struct FunDef {
    std::string name;
    std::vector<std::string> params;
    ExprPtr body;
    SourcePos pos;
};

struct Program {
    std::vector<FunDef> functions;
    ExprPtr main;

    const FunDef* find_function(const std::string& name) const;
};

// Children of an expression in evaluation order.
std::vector<ExprPtr> children(const Expr& e);

// Renders concrete syntax accepted by parse().
std::string print(const Program& p);
std::string print(const Expr& e);

// Number of expression nodes in the program (function bodies and main).
std::size_t count_subexpressions(const Program& p);

}  // namespace fgg::ppl
