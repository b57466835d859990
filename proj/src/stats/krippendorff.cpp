#include "agile/stats/krippendorff.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "agile/errors.hpp"

namespace agile::stats {

StatTestResult krippendorff_alpha(const std::vector<std::vector<std::optional<double>>>& units) {
    // Map observed values to indices in ascending (ordinal) order.
    std::map<double, std::size_t> value_index;
    for (const auto& unit : units)
        for (const auto& cell : unit)
            if (cell) value_index.emplace(*cell, 0);
    std::size_t next = 0;
    for (auto& [value, idx] : value_index) idx = next++;
    const std::size_t v = value_index.size();

    std::vector<std::vector<double>> coincidence(v, std::vector<double>(v, 0.0));
    long units_used = 0;
    for (const auto& unit : units) {
        std::vector<std::size_t> present;
        for (const auto& cell : unit)
            if (cell) present.push_back(value_index.at(*cell));
        const double m = static_cast<double>(present.size());
        if (m < 2) continue;
        ++units_used;
        const double weight = 1.0 / (m - 1.0);
        for (std::size_t i = 0; i < present.size(); ++i)
            for (std::size_t j = 0; j < present.size(); ++j)
                if (i != j) coincidence[present[i]][present[j]] += weight;
    }

    std::vector<double> marginal(v, 0.0);
    double n_pairable = 0.0;
    for (std::size_t c = 0; c < v; ++c) {
        for (std::size_t k = 0; k < v; ++k) marginal[c] += coincidence[c][k];
        n_pairable += marginal[c];
    }
    if (n_pairable < 2.0)
        throw DataError("krippendorff_alpha: fewer than 2 pairable values");

    // Ordinal squared difference over the value marginals:
    // (sum of marginals from c..k, minus half the endpoints)^2.
    std::vector<std::vector<double>> delta_sq(v, std::vector<double>(v, 0.0));
    for (std::size_t c = 0; c < v; ++c) {
        double span = marginal[c];
        for (std::size_t k = c + 1; k < v; ++k) {
            span += marginal[k];
            const double diff = span - (marginal[c] + marginal[k]) / 2.0;
            delta_sq[c][k] = delta_sq[k][c] = diff * diff;
        }
    }

    double observed = 0.0, expected = 0.0;
    for (std::size_t c = 0; c < v; ++c) {
        for (std::size_t k = 0; k < v; ++k) {
            if (c == k) continue;
            observed += coincidence[c][k] * delta_sq[c][k];
            expected += marginal[c] * marginal[k] * delta_sq[c][k];
        }
    }
    const double d_o = observed / n_pairable;
    const double d_e = expected / (n_pairable * (n_pairable - 1.0));

    StatTestResult result;
    result.method = Method::KrippendorffAlpha;
    const double alpha = d_e > 0.0 ? 1.0 - d_o / d_e : 1.0;
    result.statistic = alpha;
    result.extras["alpha"] = alpha;
    result.extras["n_pairable"] = n_pairable;
    result.extras["units_used"] = static_cast<double>(units_used);
    return result;
}

}  // namespace agile::stats
