#pragma once

#include <optional>
#include <vector>

// Test-side reference implementations, written independently of the
// library's statistics kernel. All of them are plain brute force:
// enumeration over the full permutation space and literal textbook
// formulas, with no small-sample shortcuts shared with the library.
namespace oracles {

// Friedman: exact permutation tail over all (k!)^n in-block orderings,
// recomputing within-block midranks and the tie-corrected chi-square from
// scratch per ordering.
double friedman_exact_p(const std::vector<std::vector<double>>& blocks);

// Kruskal-Wallis: exact permutation tail over all distinct assignments of
// the pooled values to the group slots.
double kruskal_wallis_exact_p(const std::vector<std::vector<double>>& groups);

// Wilcoxon signed rank: exact two-sided tail over all 2^n sign
// assignments (zeros dropped first). Returns 1.0 for all-zero input.
double wilcoxon_exact_p(const std::vector<double>& differences);

// Kendall tau-b by direct O(n^2) pair counting. nullopt when a variable
// is fully tied.
std::optional<double> kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y);

// Krippendorff's alpha via the literal coincidence-matrix definition with
// the ordinal difference function. nullopt when fewer than two values are
// pairable.
std::optional<double> krippendorff_alpha_ordinal(
    const std::vector<std::vector<std::optional<double>>>& units);

}  // namespace oracles
