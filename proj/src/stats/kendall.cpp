#include "agile/stats/kendall.hpp"

#include <cmath>

#include "agile/errors.hpp"
#include "agile/stats/prob.hpp"
#include "agile/stats/ranks.hpp"

namespace agile::stats {

StatTestResult kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("kendall_tau: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw DataError("kendall_tau: need at least 2 observations");

    double concordant = 0.0, discordant = 0.0;
    double tied_x_pairs = 0.0, tied_y_pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0.0) tied_x_pairs += 1.0;
            if (dy == 0.0) tied_y_pairs += 1.0;
            if (dx == 0.0 || dy == 0.0) continue;
            if ((dx > 0) == (dy > 0)) concordant += 1.0;
            else discordant += 1.0;
        }
    }

    const double nd = static_cast<double>(n);
    const double n0 = nd * (nd - 1.0) / 2.0;
    if (n0 - tied_x_pairs <= 0.0 || n0 - tied_y_pairs <= 0.0)
        throw DataError("kendall_tau: a variable is fully tied, association undefined");

    const double s = concordant - discordant;
    const double tau_b = s / std::sqrt((n0 - tied_x_pairs) * (n0 - tied_y_pairs));

    // Tie-corrected variance of S (the standard normal approximation for
    // tau-b with ties).
    auto tie_sums = [](std::span<const double> values) {
        double v = 0.0, pair2 = 0.0, pair3 = 0.0;
        for (long t : tie_group_sizes(values)) {
            const double td = static_cast<double>(t);
            v += td * (td - 1.0) * (2.0 * td + 5.0);
            pair2 += td * (td - 1.0);
            pair3 += td * (td - 1.0) * (td - 2.0);
        }
        return std::array<double, 3>{v, pair2, pair3};
    };
    const auto [vx, px2, px3] = tie_sums(x);
    const auto [vy, py2, py3] = tie_sums(y);

    double var_s = (nd * (nd - 1.0) * (2.0 * nd + 5.0) - vx - vy) / 18.0;
    var_s += px2 * py2 / (2.0 * nd * (nd - 1.0));
    if (n >= 3) var_s += px3 * py3 / (9.0 * nd * (nd - 1.0) * (nd - 2.0));

    StatTestResult result;
    result.method = Method::KendallTau;
    result.statistic = tau_b;
    result.extras["tau"] = tau_b;
    result.extras["s"] = s;
    result.extras["n"] = nd;
    const double z = var_s > 0.0 ? s / std::sqrt(var_s) : 0.0;
    result.extras["z"] = z;
    result.p_value = std::min(1.0, 2.0 * normal_sf(std::fabs(z)));
    return result;
}

}  // namespace agile::stats
