#include "fggpp/oracle.hpp"

namespace fgg::oracle {

CnfGrammar cnf_from_params(const ppl::Params& params, const std::string& table, const std::string& start) {
    auto t = params.tables.find(table);
    if (t == params.tables.end())
        throw OracleError("no table '" + table + "' in the parameters");
    CnfGrammar g{start, {}};
    for (const auto& [key, pmf] : t->second) {
        if (!key.is(Value::Kind::Atom))
            throw OracleError("table '" + table + "' has a non-atom key " + key.to_string());
        for (const auto& [rhs, w] : pmf) {
            if (rhs.is(Value::Kind::Inl) && rhs.payload().is(Value::Kind::Atom)) {
                g.rules.push_back({key.name(), {rhs.payload().name()}, w});
            } else if (rhs.is(Value::Kind::Inr) && rhs.payload().is(Value::Kind::Pair) &&
                       rhs.payload().first().is(Value::Kind::Atom) && rhs.payload().second().is(Value::Kind::Atom)) {
                g.rules.push_back({key.name(), {rhs.payload().first().name(), rhs.payload().second().name()}, w});
            } else {
                throw OracleError("right-hand side " + rhs.to_string() + " is not in Chomsky normal form");
            }
        }
    }
    return g;
}

double inside_reference(const CnfGrammar& g, const std::vector<std::string>& word) {
    std::size_t n = word.size();
    if (n == 0)
        return 0.0;
    // chart[i][j][X]: inside weight of X over word[i..j).
    std::vector<std::vector<std::map<std::string, double>>> chart(n + 1, std::vector<std::map<std::string, double>>(n + 1));
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& r : g.rules)
            if (r.rhs.size() == 1 && r.rhs[0] == word[i])
                chart[i][i + 1][r.lhs] += r.weight;
    for (std::size_t span = 2; span <= n; ++span)
        for (std::size_t i = 0; i + span <= n; ++i) {
            std::size_t j = i + span;
            for (std::size_t k = i + 1; k < j; ++k)
                for (const auto& r : g.rules) {
                    if (r.rhs.size() != 2)
                        continue;
                    auto left = chart[i][k].find(r.rhs[0]);
                    auto right = chart[k][j].find(r.rhs[1]);
                    if (left != chart[i][k].end() && right != chart[k][j].end())
                        chart[i][j][r.lhs] += r.weight * left->second * right->second;
                }
        }
    auto it = chart[0][n].find(g.start);
    return it == chart[0][n].end() ? 0.0 : it->second;
}

}  // namespace fgg::oracle
