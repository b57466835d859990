#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace agile::stats {

enum class Method {
    Friedman,
    WilcoxonSignedRank,
    KruskalWallis,
    Dunn,
    KendallTau,
    KrippendorffAlpha,
};

std::string_view method_name(Method m);

struct StatTestResult {
    Method method{};
    double statistic = 0.0;
    std::optional<int> df;            // present iff chi-squared reference distribution
    std::optional<double> p_value;    // absent for KrippendorffAlpha
    std::map<std::string, double> extras;  // tau, z, alpha, p_asymptotic, n, exact ...

    double extra(const std::string& key) const;  // throws if absent
    bool has_extra(const std::string& key) const { return extras.count(key) != 0; }
};

struct PairwiseResult {
    std::string group_a;
    std::string group_b;
    double z = 0.0;
    double p_unadjusted = 1.0;
    double p_adjusted = 1.0;
};

// Enumeration budget for the exact small-sample paths. Inputs whose
// permutation space is larger fall back to the asymptotic approximation;
// the asymptotic p is always reported in extras["p_asymptotic"].
inline constexpr double kExactEnumerationBudget = 2'000'000.0;

// Friedman rank sum test over an n x k matrix (rows = blocks/subjects,
// columns = treatments, no missing cells). Within-block midranks, tie
// corrected chi-squared with df = k-1. For small inputs the p-value is the
// exact permutation tail over all (k!)^n in-block orderings. Fully tied
// input degenerates to statistic 0, p 1.
StatTestResult friedman_test(const std::vector<std::vector<double>>& blocks);

// Wilcoxon signed rank test on paired differences. Zero differences are
// dropped; |d| are midranked. Exact two-sided p by sign enumeration when
// the effective n <= 20, else normal approximation with continuity
// correction and tie-corrected variance. All-zero input degenerates to
// statistic 0, p 1. The statistic is min(W+, W-); extras carry w_plus,
// w_minus and n_effective.
StatTestResult wilcoxon_signed_rank(std::span<const double> differences);
inline constexpr int kWilcoxonExactLimit = 20;

// Bonferroni adjustment: p' = min(1, m*p), order preserving.
std::vector<double> bonferroni(std::span<const double> p_values, int comparisons);

// Kruskal-Wallis rank sum test over >= 2 non-empty groups. Pooled midranks,
// tie-corrected H, df = groups-1. Exact permutation p over group
// assignments when the arrangement count fits the enumeration budget.
// Fully tied input degenerates to H 0, p 1.
StatTestResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

// Dunn's multiple-comparison z tests on rank-mean differences with
// tie-corrected pooled variance and Bonferroni adjustment over all pairs.
std::vector<PairwiseResult> dunn_test(const std::vector<std::vector<double>>& groups,
                                      const std::vector<std::string>& labels);

}  // namespace agile::stats
