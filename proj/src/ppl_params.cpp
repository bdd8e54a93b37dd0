#include "fggpp/ppl_params.hpp"

#include "fggpp/grammar_json.hpp"

#include <cmath>
#include <fstream>

namespace fgg::ppl {

using nlohmann::json;

namespace {

Value read_value(const json& j) {
    if (j.is_string() && j.get<std::string>() != "unit") {
        auto v = parse_value(j.get<std::string>());
        if (!v)
            throw ParamsError("cannot parse value '" + j.get<std::string>() + "'");
        return *v;
    }
    if (j.is_object() && j.size() == 1 && j.contains("list") && j.at("list").is_array()) {
        Value out = Value::nil();
        for (auto it = j.at("list").rbegin(); it != j.at("list").rend(); ++it)
            out = Value::pair(read_value(*it), out);
        return out;
    }
    try {
        return value_from_json(j);
    } catch (const FormatError& e) {
        throw ParamsError(e.what());
    }
}

Value read_key(const std::string& text) {
    auto v = parse_value(text);
    if (!v)
        throw ParamsError("cannot parse key '" + text + "'");
    return *v;
}

Pmf read_pmf(const std::string& where, const json& j) {
    Pmf out;
    for (const auto& [k, w] : j.items()) {
        if (!w.is_number())
            throw ParamsError(where + ": weight for '" + k + "' is not a number");
        double x = w.get<double>();
        if (!(x >= 0.0) || !std::isfinite(x))
            throw ParamsError(where + ": weight for '" + k + "' must be finite and nonnegative");
        out[read_key(k)] += x;
    }
    return out;
}

void collect_atoms(const Value& v, std::set<std::string>& out) {
    switch (v.kind()) {
    case Value::Kind::Atom:
        out.insert(v.name());
        break;
    case Value::Kind::Pair:
        collect_atoms(v.first(), out);
        collect_atoms(v.second(), out);
        break;
    case Value::Kind::Inl:
    case Value::Kind::Inr:
        collect_atoms(v.payload(), out);
        break;
    default:
        break;
    }
}

}  // namespace

std::string row_name(const std::string& table, const Value& key) {
    return table + "[" + key.to_string() + "]";
}

const Pmf* Params::pmf(const std::string& dist_name) const {
    static const Pmf zero;
    if (dist_name == kZeroDistribution)
        return &zero;
    auto it = by_name_.find(dist_name);
    return it == by_name_.end() ? nullptr : &it->second;
}

std::set<std::string> Params::atom_names() const {
    std::set<std::string> out;
    for (const auto& [name, values] : domains)
        for (const auto& v : values)
            collect_atoms(v, out);
    for (const auto& [name, rows] : tables)
        for (const auto& [key, pmf] : rows) {
            collect_atoms(key, out);
            for (const auto& [v, w] : pmf)
                collect_atoms(v, out);
        }
    for (const auto& [name, pmf] : distributions)
        for (const auto& [v, w] : pmf)
            collect_atoms(v, out);
    for (const auto& [name, v] : inputs)
        collect_atoms(v, out);
    return out;
}

Params params_from_json(const json& j) {
    if (!j.is_object())
        throw ParamsError("parameter file must be a JSON object");
    Params p;
    if (j.contains("domains"))
        for (const auto& [name, values] : j.at("domains").items()) {
            if (!values.is_array())
                throw ParamsError("domain '" + name + "' must be an array");
            for (const auto& v : values)
                p.domains[name].push_back(read_value(v));
        }
    if (j.contains("params"))
        for (const auto& [name, body] : j.at("params").items()) {
            if (name == kZeroDistribution)
                throw ParamsError("'" + kZeroDistribution + "' is a reserved distribution name");
            if (!body.is_object())
                throw ParamsError("parameter '" + name + "' must be an object");
            bool keyed = !body.empty() && body.begin()->is_object();
            if (keyed) {
                for (const auto& [key, row] : body.items()) {
                    if (!row.is_object())
                        throw ParamsError("parameter '" + name + "' mixes rows and weights");
                    Value k = read_key(key);
                    Pmf pmf = read_pmf(name + "[" + key + "]", row);
                    p.by_name_[row_name(name, k)] = pmf;
                    p.tables[name][k] = std::move(pmf);
                }
            } else {
                Pmf pmf = read_pmf(name, body);
                p.by_name_[name] = pmf;
                p.distributions[name] = std::move(pmf);
            }
        }
    if (j.contains("inputs"))
        for (const auto& [name, v] : j.at("inputs").items())
            p.inputs[name] = read_value(v);
    return p;
}

Params read_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParamsError("cannot open parameter file '" + path + "'");
    try {
        return params_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ParamsError("malformed parameter file '" + path + "': " + e.what());
    }
}

}  // namespace fgg::ppl
