#pragma once

#include "fggpp/ppl_ast.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace fgg::ppl {

class SyntaxError : public std::runtime_error {
  public:
    SyntaxError(SourcePos pos, const std::string& message)
        : std::runtime_error(pos.to_string() + ": " + message), pos_(pos) {}

    SourcePos pos() const { return pos_; }

  private:
    SourcePos pos_;
};

// Parses a whole program. Comments run from '#' to end of line.
Program parse(std::string_view source);

}  // namespace fgg::ppl
