#pragma once

#include "fggpp/grammar.hpp"
#include "fggpp/ppl_ast.hpp"
#include "fggpp/ppl_params.hpp"

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fgg::ppl {

class TypeError : public std::runtime_error {
  public:
    TypeError(SourcePos pos, const std::string& message)
        : std::runtime_error(pos.to_string() + ": " + message), pos_(pos) {}

    SourcePos pos() const { return pos_; }

  private:
    SourcePos pos_;
};

// Environment and result domain of one subexpression. `env` lists the bound
// variables in binding order (a rebinding moves the name to the end).
struct TypedExpr {
    std::vector<std::pair<std::string, std::string>> env;
    std::string result;
};

struct FunctionSignature {
    std::vector<std::string> params;
    std::string result;
};

struct TypedProgram {
    Program program;
    Params params;
    std::map<std::string, Domain> domains;
    std::map<const Expr*, TypedExpr> types;
    std::map<std::string, FunctionSignature> signatures;

    const TypedExpr& type_of(const Expr& e) const;
    const Domain& domain(const std::string& name) const { return domains.at(name); }
};

struct DomainOptions {
    // Largest value set any variable may reach before inference gives up.
    std::size_t max_domain_size = 4096;
};

// Computes a finite domain for every variable and subexpression by a least
// fixed point over value sets. Nodes that must share a value (a call's
// argument and the callee's parameter, the arms of a conditional, ...) share
// a domain. Values that can only occur with weight zero may be left out.
//
// A parameter-file domain named "f.x" (parameter x of f) or "x" (let/case
// binder x) fixes that variable's domain; inferred values outside it are
// dropped.
TypedProgram assign_domains(const Program& p, const Params& params, const DomainOptions& options = {});

// Result of a built-in applied to concrete arguments; nullopt where the
// built-in is undefined (e.g. fst of a non-pair), which carries weight zero.
std::optional<Value> apply_builtin(const Builtin& b, std::span<const Value> args, const Params& params);

}  // namespace fgg::ppl
