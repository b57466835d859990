#pragma once

#include <optional>
#include <vector>

#include "agile/stats/tests.hpp"

namespace agile::stats {

// Krippendorff's alpha for ordinal ratings. Rows are units, columns are
// raters; missing cells allowed. Units with fewer than two ratings are
// excluded from the coincidence matrix. The difference function is the
// ordinal metric over the observed value marginals. alpha <= 1 and may be
// negative; when the expected disagreement is zero (all ratings one value)
// alpha degenerates to 1. Throws DataError when fewer than two pairable
// values exist. No p-value is attached; extras carry alpha, n_pairable and
// units_used.
StatTestResult krippendorff_alpha(const std::vector<std::vector<std::optional<double>>>& units);

}  // namespace agile::stats
