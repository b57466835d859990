#pragma once

#include <span>

#include "agile/stats/tests.hpp"

namespace agile::stats {

// Kendall's tau-b between two equal-length samples (pairwise-complete; the
// caller drops pairs with missing values). The statistic is tau-b; extras
// carry z (from the tie-corrected asymptotic variance of C-D), s = C-D and
// n. p_value is the two-sided normal tail of z. Throws DataError when n < 2
// or either variable is fully tied (association undefined).
StatTestResult kendall_tau(std::span<const double> x, std::span<const double> y);

}  // namespace agile::stats
