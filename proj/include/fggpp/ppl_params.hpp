#pragma once

#include "fggpp/value.hpp"

#include <json.hpp>

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgg::ppl {

class ParamsError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using Pmf = std::map<Value, double>;

// Name of the reserved distribution that has density zero everywhere.
inline const std::string kZeroDistribution = "zero";

// Contents of a parameter file:
//   {"domains": {name: [values]},
//    "params":  {name: {key: {value: weight}}  |  name: {value: weight}},
//    "inputs":  {name: value}}
// Values are tagged JSON objects or strings in the textual value syntax.
struct Params {
    std::map<std::string, std::vector<Value>> domains;
    // Keyed tables such as p[X]; each row is a distribution.
    std::map<std::string, std::map<Value, Pmf>> tables;
    // Distributions referenced by name alone.
    std::map<std::string, Pmf> distributions;
    std::map<std::string, Value> inputs;

    // Distribution denoted by dist(name); nullptr when unknown.
    const Pmf* pmf(const std::string& dist_name) const;

    // Every atom name mentioned anywhere in the file.
    std::set<std::string> atom_names() const;

  private:
    friend Params params_from_json(const nlohmann::json& j);
    std::map<std::string, Pmf> by_name_;
};

// Name of the distribution stored in row `key` of table `table`.
std::string row_name(const std::string& table, const Value& key);

Params params_from_json(const nlohmann::json& j);
Params read_params_file(const std::string& path);

}  // namespace fgg::ppl
