#pragma once

#include "fggpp/grammar.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace fgg {

class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Tagged encoding: {"atom":s} {"bool":b} "unit" {"pair":[v,w]} {"inl":v}
// {"inr":v} {"dist":s}. Decoding also accepts {"list":[...]} as shorthand for
// a cons chain ending in nil.
nlohmann::json value_to_json(const Value& v);
Value value_from_json(const nlohmann::json& j);

// Nested arrays in row-major order; a rank-0 table is a bare number.
nlohmann::json table_to_json(const std::vector<double>& data, const std::vector<std::size_t>& shape);
std::vector<double> table_from_json(const nlohmann::json& j, const std::vector<std::size_t>& shape);

nlohmann::json grammar_to_json(const Grammar& g);
Grammar grammar_from_json(const nlohmann::json& j);

// Canonical text form: two-space indentation, trailing newline.
std::string dump_grammar(const Grammar& g);

}  // namespace fgg
