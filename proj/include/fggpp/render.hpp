#pragma once

#include "fggpp/grammar.hpp"

#include <string>

namespace fgg {

// One Graphviz digraph per rule: variables are circles (external ones drawn
// doubled and shaded), factors are small filled squares captioned with their
// kind, nonterminal edges are boxes holding their label.
std::string render_dot(const Grammar& g);

// A standalone LaTeX document with one TikZ picture per rule, following the
// same conventions.
std::string render_latex(const Grammar& g);

}  // namespace fgg
