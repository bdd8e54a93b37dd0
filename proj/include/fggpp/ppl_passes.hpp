#pragma once

#include "fggpp/ppl_ast.hpp"
#include "fggpp/ppl_params.hpp"

#include <string>
#include <vector>

namespace fgg::ppl {

struct FrontendDiagnostic {
    SourcePos pos;
    std::string message;

    std::string to_string() const { return pos.to_string() + ": " + message; }
};

// Rewrites `and`, `or` and `fail`:
//   a and b  ->  if a then b else false
//   a or b   ->  if a then true else b
//   fail     ->  observe true <- <zero>
Program desugar(const Program& p);

// True iff no and/or/fail nodes remain.
bool is_desugared(const Program& p);

// Identifiers that are not bound variables are resolved, in order, as
// inputs, named distributions, or atoms mentioned in the parameter file.
// Anything else is left as a variable for scope_check to report.
Program resolve_names(const Program& p, const Params& params);

// Unbound variables, unknown functions, argument-count mismatches, duplicate
// definitions and variables shadowing function names.
std::vector<FrontendDiagnostic> scope_check(const Program& p);

}  // namespace fgg::ppl
