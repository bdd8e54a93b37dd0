#pragma once

#include "fggpp/translate.hpp"

#include <optional>
#include <set>
#include <string>

namespace fgg {

enum class Pass { Prune, Inline, Compose, Contract };

using PassSet = std::set<Pass>;

std::string to_string(Pass p);
std::optional<Pass> parse_pass(const std::string& name);
PassSet all_passes();

// Rules + edges + nodes; every pass that fires makes this strictly smaller.
std::size_t grammar_size(const Grammar& g);

// Runs one pass once. Returns true iff it changed the grammar.
//   prune:    drop rules with an all-zero factor or an edge whose label has
//             no rules
//   inline:   splice in nonterminals that have one rule, except the start,
//             functions and if/case nonterminals that still have both arms
//   compose:  sum out internal nodes touched only by built-in factors
//   contract: merge the two ends of a copy factor unless both are external
bool apply_pass(CompilationUnit& cu, Pass pass);

// Applies the passes in the order prune, inline, compose, contract until
// none fires. Each pass preserves the start weight.
CompilationUnit simplify(const CompilationUnit& cu, const PassSet& passes);

}  // namespace fgg
