#pragma once

#include "fggpp/grammar.hpp"
#include "fggpp/ppl_types.hpp"

#include <set>
#include <string>
#include <vector>

namespace fgg {

// Where a rule came from: the source position of the construct and its kind
// ("let", "if:true", "fun d", ...). Merged rules list every contributor.
struct RuleOrigin {
    ppl::SourcePos pos;
    std::string construct;
};

struct CompilationUnit {
    Grammar grammar;
    // One entry per rule, parallel to grammar.rules.
    std::vector<std::vector<RuleOrigin>> provenance;
    std::vector<std::string> pass_log;
    std::set<std::string> function_labels;
    // Labels of if/case nonterminals (one rule per arm).
    std::set<std::string> branch_labels;
};

// Terminal labels are "<kind>@<dom>,<dom>,..."; this returns <kind>.
std::string factor_kind(const std::string& terminal_label);

// One nonterminal per subexpression, with arity |env| + 1 (environment
// variables in binding order, then the result), one per function, and the
// start symbol of arity 1. The result grammar is not simplified.
CompilationUnit translate(const ppl::TypedProgram& tp);

}  // namespace fgg
