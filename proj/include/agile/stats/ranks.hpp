#pragma once

#include <span>
#include <vector>

namespace agile::stats {

// Ranks 1..n with tied values receiving the mean of the ranks they occupy.
// The rank sum is always n(n+1)/2. Throws DataError on empty input.
std::vector<double> midranks(std::span<const double> values);

// Sum of t^3 - t over groups of tied values; the shared tie-correction term
// of the rank tests.
double tie_correction_term(std::span<const double> values);

// Sizes of the tie groups (values occurring t >= 1 times).
std::vector<long> tie_group_sizes(std::span<const double> values);

}  // namespace agile::stats
