#include "fggpp/grammar_json.hpp"

namespace fgg {

using nlohmann::json;

json value_to_json(const Value& v) {
    switch (v.kind()) {
    case Value::Kind::Atom:
        return {{"atom", v.name()}};
    case Value::Kind::Bool:
        return {{"bool", v.as_bool()}};
    case Value::Kind::Unit:
        return "unit";
    case Value::Kind::Pair:
        return {{"pair", json::array({value_to_json(v.first()), value_to_json(v.second())})}};
    case Value::Kind::Inl:
        return {{"inl", value_to_json(v.payload())}};
    case Value::Kind::Inr:
        return {{"inr", value_to_json(v.payload())}};
    case Value::Kind::Dist:
        return {{"dist", v.name()}};
    }
    return nullptr;
}

Value value_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "unit")
            return Value::unit();
        throw FormatError("bare string value '" + j.get<std::string>() + "' (did you mean {\"atom\": ...}?)");
    }
    if (!j.is_object() || j.size() != 1)
        throw FormatError("value must be a tagged object: " + j.dump());
    const auto& [tag, body] = *j.items().begin();
    if (tag == "atom")
        return Value::atom(body.get<std::string>());
    if (tag == "bool")
        return Value::boolean(body.get<bool>());
    if (tag == "dist")
        return Value::dist(body.get<std::string>());
    if (tag == "inl")
        return Value::inl(value_from_json(body));
    if (tag == "inr")
        return Value::inr(value_from_json(body));
    if (tag == "pair") {
        if (!body.is_array() || body.size() != 2)
            throw FormatError("pair needs two components: " + j.dump());
        return Value::pair(value_from_json(body[0]), value_from_json(body[1]));
    }
    if (tag == "list") {
        if (!body.is_array())
            throw FormatError("list needs an array: " + j.dump());
        Value out = Value::nil();
        for (auto it = body.rbegin(); it != body.rend(); ++it)
            out = Value::pair(value_from_json(*it), out);
        return out;
    }
    throw FormatError("unknown value tag '" + tag + "'");
}

namespace {

json table_slice(const std::vector<double>& data, const std::vector<std::size_t>& shape, std::size_t axis,
                 std::size_t offset, std::size_t stride) {
    if (axis == shape.size())
        return data[offset];
    json arr = json::array();
    std::size_t inner = stride / (shape[axis] ? shape[axis] : 1);
    for (std::size_t i = 0; i < shape[axis]; ++i)
        arr.push_back(table_slice(data, shape, axis + 1, offset + i * inner, inner));
    return arr;
}

void read_slice(const json& j, const std::vector<std::size_t>& shape, std::size_t axis, std::vector<double>& out) {
    if (axis == shape.size()) {
        if (!j.is_number())
            throw FormatError("table entry is not a number: " + j.dump());
        out.push_back(j.get<double>());
        return;
    }
    if (!j.is_array() || j.size() != shape[axis])
        throw FormatError("table axis " + std::to_string(axis) + " should have " + std::to_string(shape[axis]) +
                          " entries");
    for (const auto& sub : j)
        read_slice(sub, shape, axis + 1, out);
}

}  // namespace

json table_to_json(const std::vector<double>& data, const std::vector<std::size_t>& shape) {
    std::size_t total = 1;
    for (auto s : shape)
        total *= s;
    return table_slice(data, shape, 0, 0, total);
}

std::vector<double> table_from_json(const json& j, const std::vector<std::size_t>& shape) {
    std::vector<double> out;
    read_slice(j, shape, 0, out);
    return out;
}

json grammar_to_json(const Grammar& g) {
    json out;
    json labels = json::array();
    for (const auto& [name, label] : g.labels)
        labels.push_back({{"name", name},
                          {"arity", label.arity},
                          {"kind", label.is_terminal() ? "terminal" : "nonterminal"}});
    out["labels"] = labels;
    out["start"] = g.start;

    json rules = json::array();
    for (const auto& r : g.rules) {
        json nodes = json::array();
        for (const auto& n : r.rhs.nodes)
            nodes.push_back({{"id", n.id}, {"domain", n.domain}});
        json edges = json::array();
        for (const auto& e : r.rhs.edges)
            edges.push_back({{"id", e.id}, {"label", e.label}, {"att", e.att}});
        rules.push_back({{"lhs", r.lhs}, {"rhs", {{"nodes", nodes}, {"edges", edges}, {"ext", r.rhs.ext}}}});
    }
    out["rules"] = rules;

    json domains = json::object();
    for (const auto& [name, dom] : g.domains) {
        json values = json::array();
        for (const auto& v : dom.values)
            values.push_back(value_to_json(v));
        domains[name] = values;
    }
    out["domains"] = domains;

    json factors = json::object();
    for (const auto& [name, table] : g.factors) {
        std::vector<std::size_t> shape;
        for (const auto& d : table.domains) {
            auto it = g.domains.find(d);
            shape.push_back(it == g.domains.end() ? 0 : it->second.size());
        }
        factors[name] = {{"domains", table.domains}, {"table", table_to_json(table.weights, shape)}};
    }
    out["factors"] = factors;
    return out;
}

Grammar grammar_from_json(const json& j) {
    try {
        Grammar g;
        for (const auto& l : j.at("labels")) {
            EdgeLabel label;
            label.name = l.at("name").get<std::string>();
            label.arity = l.at("arity").get<std::size_t>();
            std::string kind = l.at("kind").get<std::string>();
            if (kind == "terminal")
                label.kind = LabelKind::Terminal;
            else if (kind == "nonterminal")
                label.kind = LabelKind::Nonterminal;
            else
                throw FormatError("label kind must be terminal or nonterminal, got '" + kind + "'");
            if (!g.labels.emplace(label.name, label).second)
                throw FormatError("label '" + label.name + "' declared twice");
        }
        g.start = j.at("start").get<std::string>();
        for (const auto& [name, values] : j.at("domains").items()) {
            Domain d{name, {}};
            for (const auto& v : values)
                d.values.push_back(value_from_json(v));
            g.domains[name] = std::move(d);
        }
        for (const auto& r : j.at("rules")) {
            Rule rule;
            rule.lhs = r.at("lhs").get<std::string>();
            const auto& rhs = r.at("rhs");
            for (const auto& n : rhs.at("nodes"))
                rule.rhs.nodes.push_back({n.at("id").get<std::string>(), n.at("domain").get<std::string>()});
            for (const auto& e : rhs.at("edges"))
                rule.rhs.edges.push_back({e.at("id").get<std::string>(), e.at("label").get<std::string>(),
                                          e.at("att").get<std::vector<std::string>>()});
            rule.rhs.ext = rhs.at("ext").get<std::vector<std::string>>();
            g.rules.push_back(std::move(rule));
        }
        if (j.contains("factors")) {
            for (const auto& [name, f] : j.at("factors").items()) {
                FactorTable table;
                table.label = name;
                if (f.contains("domains")) {
                    table.domains = f.at("domains").get<std::vector<std::string>>();
                } else {
                    // Without explicit domains, take them from the first edge using the label.
                    for (const auto& r : g.rules)
                        for (const auto& e : r.rhs.edges)
                            if (e.label == name && table.domains.empty())
                                for (const auto& a : e.att)
                                    if (const Node* n = r.rhs.find_node(a))
                                        table.domains.push_back(n->domain);
                }
                std::vector<std::size_t> shape;
                for (const auto& d : table.domains) {
                    auto it = g.domains.find(d);
                    if (it == g.domains.end())
                        throw FormatError("factor '" + name + "' uses unknown domain '" + d + "'");
                    shape.push_back(it->second.size());
                }
                table.weights = table_from_json(f.at("table"), shape);
                g.factors[name] = std::move(table);
            }
        }
        return g;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed grammar JSON: ") + e.what());
    }
}

std::string dump_grammar(const Grammar& g) {
    return grammar_to_json(g).dump(2) + "\n";
}

}  // namespace fgg
