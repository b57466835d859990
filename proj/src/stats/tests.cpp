#include "agile/stats/tests.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "agile/errors.hpp"
#include "agile/stats/prob.hpp"
#include "agile/stats/ranks.hpp"

namespace agile::stats {

namespace {

constexpr double kStatEps = 1e-9;

double count_factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

// Number of distinct arrangements of a multiset: n! / prod(t_i!).
double distinct_arrangements(std::span<const double> values) {
    double count = 1.0;
    for (std::size_t i = 2; i <= values.size(); ++i) count *= static_cast<double>(i);
    for (long t : tie_group_sizes(values)) count /= count_factorial(static_cast<int>(t));
    return count;
}

// Sum over columns of (colsum - n(k+1)/2)^2; the monotone core of the
// Friedman statistic (the tie term is permutation invariant).
double friedman_core(const std::vector<std::vector<double>>& rank_rows, std::size_t k) {
    const double n = static_cast<double>(rank_rows.size());
    const double center = n * (static_cast<double>(k) + 1.0) / 2.0;
    double core = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        double colsum = 0.0;
        for (const auto& row : rank_rows) colsum += row[j];
        const double d = colsum - center;
        core += d * d;
    }
    return core;
}

// Exact permutation tail for Friedman: enumerates all k! column orders of
// every block's rank vector and counts arrangements with a core >= the
// observed one.
struct FriedmanEnumerator {
    std::vector<std::vector<std::vector<double>>> block_perms;  // per block, k! arrangements
    std::size_t k = 0;
    double center = 0.0;
    double threshold = 0.0;
    double hits = 0.0;
    double total = 0.0;
    std::vector<double> colsum;

    void recurse(std::size_t block) {
        if (block == block_perms.size()) {
            double core = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                const double d = colsum[j] - center;
                core += d * d;
            }
            total += 1.0;
            if (core >= threshold) hits += 1.0;
            return;
        }
        for (const auto& arrangement : block_perms[block]) {
            for (std::size_t j = 0; j < k; ++j) colsum[j] += arrangement[j];
            recurse(block + 1);
            for (std::size_t j = 0; j < k; ++j) colsum[j] -= arrangement[j];
        }
    }
};

double friedman_exact_p(const std::vector<std::vector<double>>& rank_rows, std::size_t k,
                        double observed_core) {
    const std::size_t n = rank_rows.size();
    FriedmanEnumerator en;
    en.k = k;
    en.center = static_cast<double>(n) * (static_cast<double>(k) + 1.0) / 2.0;
    en.threshold = observed_core - kStatEps;
    en.colsum.assign(k, 0.0);
    en.block_perms.resize(n);
    for (std::size_t b = 0; b < n; ++b) {
        std::vector<double> sorted = rank_rows[b];
        std::sort(sorted.begin(), sorted.end());
        // all k! position orders; duplicates from ties keep the measure
        // uniform over value permutations
        std::vector<std::size_t> idx(k);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        do {
            std::vector<double> arranged(k);
            for (std::size_t j = 0; j < k; ++j) arranged[j] = sorted[idx[j]];
            en.block_perms[b].push_back(std::move(arranged));
        } while (std::next_permutation(idx.begin(), idx.end()));
    }
    en.recurse(0);
    return en.hits / en.total;
}

double kw_rank_sum_core(std::span<const double> pooled_ranks, std::span<const std::size_t> sizes) {
    double core = 0.0;
    std::size_t offset = 0;
    for (std::size_t g = 0; g < sizes.size(); ++g) {
        double rank_sum = 0.0;
        for (std::size_t i = 0; i < sizes[g]; ++i) rank_sum += pooled_ranks[offset + i];
        core += rank_sum * rank_sum / static_cast<double>(sizes[g]);
        offset += sizes[g];
    }
    return core;
}

}  // namespace

std::string_view method_name(Method m) {
    switch (m) {
        case Method::Friedman: return "friedman";
        case Method::WilcoxonSignedRank: return "wilcoxon_signed_rank";
        case Method::KruskalWallis: return "kruskal_wallis";
        case Method::Dunn: return "dunn";
        case Method::KendallTau: return "kendall_tau";
        case Method::KrippendorffAlpha: return "krippendorff_alpha";
    }
    return "unknown";
}

double StatTestResult::extra(const std::string& key) const {
    const auto it = extras.find(key);
    if (it == extras.end())
        throw DataError("StatTestResult: missing extra '" + key + "'");
    return it->second;
}

StatTestResult friedman_test(const std::vector<std::vector<double>>& blocks) {
    const std::size_t n = blocks.size();
    if (n < 2) throw DataError("friedman_test: need at least 2 blocks");
    const std::size_t k = blocks[0].size();
    if (k < 2) throw DataError("friedman_test: need at least 2 treatments");
    for (const auto& row : blocks)
        if (row.size() != k) throw DataError("friedman_test: ragged block matrix");

    std::vector<std::vector<double>> rank_rows(n);
    double tie_term = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
        rank_rows[b] = midranks(blocks[b]);
        tie_term += tie_correction_term(blocks[b]);
    }

    StatTestResult result;
    result.method = Method::Friedman;
    result.df = static_cast<int>(k) - 1;

    const double nk = static_cast<double>(n) * static_cast<double>(k);
    const double denom = nk * (static_cast<double>(k) + 1.0) - tie_term / (static_cast<double>(k) - 1.0);
    const double core = friedman_core(rank_rows, k);

    if (denom <= 0.0) {  // every block fully tied
        result.statistic = 0.0;
        result.p_value = 1.0;
        result.extras["p_asymptotic"] = 1.0;
        result.extras["n"] = static_cast<double>(n);
        result.extras["exact"] = 0.0;
        return result;
    }

    result.statistic = 12.0 * core / denom;
    const double p_asymptotic = chi_squared_sf(result.statistic, static_cast<int>(k) - 1);
    result.extras["p_asymptotic"] = p_asymptotic;
    result.extras["n"] = static_cast<double>(n);

    const double space = std::pow(count_factorial(static_cast<int>(k)), static_cast<double>(n));
    if (space <= kExactEnumerationBudget) {
        result.p_value = friedman_exact_p(rank_rows, k, core);
        result.extras["exact"] = 1.0;
    } else {
        result.p_value = p_asymptotic;
        result.extras["exact"] = 0.0;
    }
    return result;
}

StatTestResult wilcoxon_signed_rank(std::span<const double> differences) {
    std::vector<double> abs_d;
    std::vector<int> signs;
    for (double d : differences) {
        if (d == 0.0) continue;
        abs_d.push_back(std::fabs(d));
        signs.push_back(d > 0 ? 1 : -1);
    }
    const std::size_t n = abs_d.size();

    StatTestResult result;
    result.method = Method::WilcoxonSignedRank;
    if (n == 0) {  // all differences zero
        result.statistic = 0.0;
        result.p_value = 1.0;
        result.extras["w_plus"] = 0.0;
        result.extras["w_minus"] = 0.0;
        result.extras["n_effective"] = 0.0;
        result.extras["z"] = 0.0;
        return result;
    }

    const std::vector<double> ranks = midranks(abs_d);
    double w_plus = 0.0;
    double rank_sq_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (signs[i] > 0) w_plus += ranks[i];
        rank_sq_sum += ranks[i] * ranks[i];
    }
    const double total = static_cast<double>(n) * (static_cast<double>(n) + 1.0) / 2.0;
    const double w_minus = total - w_plus;
    const double mean = total / 2.0;
    const double variance = rank_sq_sum / 4.0;  // equals the tie-corrected n(n+1)(2n+1)/24 form

    result.statistic = std::min(w_plus, w_minus);
    result.extras["w_plus"] = w_plus;
    result.extras["w_minus"] = w_minus;
    result.extras["n_effective"] = static_cast<double>(n);

    double z = 0.0;
    if (variance > 0.0) {
        const double diff = w_plus - mean;
        const double correction = diff > 0 ? -0.5 : (diff < 0 ? 0.5 : 0.0);
        z = (diff + correction) / std::sqrt(variance);
    }
    result.extras["z"] = z;
    const double p_asymptotic = std::min(1.0, 2.0 * normal_sf(std::fabs(z)));
    result.extras["p_asymptotic"] = p_asymptotic;

    if (n <= static_cast<std::size_t>(kWilcoxonExactLimit)) {
        // Exact two-sided tail over the 2^n sign assignments, computed on
        // the distribution of 2*W+ (integral once ranks are doubled).
        std::vector<long> doubled(n);
        long sum2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            doubled[i] = static_cast<long>(std::llround(2.0 * ranks[i]));
            sum2 += doubled[i];
        }
        std::vector<double> dist(static_cast<std::size_t>(sum2) + 1, 0.0);
        dist[0] = 1.0;
        long reach = 0;
        for (std::size_t i = 0; i < n; ++i) {
            reach += doubled[i];
            for (long s = reach; s >= doubled[i]; --s) dist[s] += dist[s - doubled[i]];
        }
        const long w_lo = static_cast<long>(std::llround(2.0 * std::min(w_plus, w_minus)));
        const long w_hi = sum2 - w_lo;
        double tail = 0.0;
        double total_count = 0.0;
        for (long s = 0; s <= sum2; ++s) {
            total_count += dist[s];
            if (s <= w_lo || s >= w_hi) tail += dist[s];
        }
        result.p_value = std::min(1.0, tail / total_count);
        result.extras["exact"] = 1.0;
    } else {
        result.p_value = p_asymptotic;
        result.extras["exact"] = 0.0;
    }
    return result;
}

std::vector<double> bonferroni(std::span<const double> p_values, int comparisons) {
    if (comparisons < 1) throw DataError("bonferroni: comparisons must be >= 1");
    std::vector<double> adjusted;
    adjusted.reserve(p_values.size());
    for (double p : p_values) adjusted.push_back(std::min(1.0, p * static_cast<double>(comparisons)));
    return adjusted;
}

StatTestResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw DataError("kruskal_wallis: need at least 2 groups");
    std::vector<double> pooled;
    std::vector<std::size_t> sizes;
    for (const auto& g : groups) {
        if (g.empty()) throw DataError("kruskal_wallis: empty group");
        sizes.push_back(g.size());
        pooled.insert(pooled.end(), g.begin(), g.end());
    }
    const double n_total = static_cast<double>(pooled.size());
    const std::vector<double> ranks = midranks(pooled);

    StatTestResult result;
    result.method = Method::KruskalWallis;
    result.df = static_cast<int>(groups.size()) - 1;
    result.extras["n"] = n_total;

    const double tie_term = tie_correction_term(pooled);
    const double tie_factor = 1.0 - tie_term / (n_total * n_total * n_total - n_total);
    if (tie_factor <= 0.0) {  // all pooled values identical
        result.statistic = 0.0;
        result.p_value = 1.0;
        result.extras["p_asymptotic"] = 1.0;
        result.extras["exact"] = 0.0;
        return result;
    }

    const double core = kw_rank_sum_core(ranks, sizes);
    const double h_uncorrected = 12.0 / (n_total * (n_total + 1.0)) * core - 3.0 * (n_total + 1.0);
    result.statistic = h_uncorrected / tie_factor;
    const double p_asymptotic = chi_squared_sf(result.statistic, static_cast<int>(groups.size()) - 1);
    result.extras["p_asymptotic"] = p_asymptotic;

    if (distinct_arrangements(ranks) <= kExactEnumerationBudget) {
        // Exact permutation tail over group assignments: enumerate every
        // distinct arrangement of the pooled rank multiset across the
        // group slots (each is equally likely).
        std::vector<double> arrangement = ranks;
        std::sort(arrangement.begin(), arrangement.end());
        double hits = 0.0;
        double total_count = 0.0;
        do {
            total_count += 1.0;
            if (kw_rank_sum_core(arrangement, sizes) >= core - kStatEps) hits += 1.0;
        } while (std::next_permutation(arrangement.begin(), arrangement.end()));
        result.p_value = hits / total_count;
        result.extras["exact"] = 1.0;
    } else {
        result.p_value = p_asymptotic;
        result.extras["exact"] = 0.0;
    }
    return result;
}

std::vector<PairwiseResult> dunn_test(const std::vector<std::vector<double>>& groups,
                                      const std::vector<std::string>& labels) {
    if (groups.size() < 2) throw DataError("dunn_test: need at least 2 groups");
    if (labels.size() != groups.size()) throw DataError("dunn_test: labels/groups size mismatch");
    std::vector<double> pooled;
    for (const auto& g : groups) {
        if (g.empty()) throw DataError("dunn_test: empty group");
        pooled.insert(pooled.end(), g.begin(), g.end());
    }
    const double n_total = static_cast<double>(pooled.size());
    const std::vector<double> ranks = midranks(pooled);

    std::vector<double> mean_rank(groups.size(), 0.0);
    std::size_t offset = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        double sum = 0.0;
        for (std::size_t i = 0; i < groups[g].size(); ++i) sum += ranks[offset + i];
        mean_rank[g] = sum / static_cast<double>(groups[g].size());
        offset += groups[g].size();
    }

    const double tie_term = tie_correction_term(pooled);
    const double sigma_sq =
        n_total * (n_total + 1.0) / 12.0 - tie_term / (12.0 * (n_total - 1.0));

    const int m = static_cast<int>(groups.size() * (groups.size() - 1) / 2);
    std::vector<PairwiseResult> results;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            PairwiseResult pr;
            pr.group_a = labels[i];
            pr.group_b = labels[j];
            const double scale =
                sigma_sq * (1.0 / static_cast<double>(groups[i].size()) +
                            1.0 / static_cast<double>(groups[j].size()));
            pr.z = scale > 0.0 ? (mean_rank[i] - mean_rank[j]) / std::sqrt(scale) : 0.0;
            pr.p_unadjusted = std::min(1.0, 2.0 * normal_sf(std::fabs(pr.z)));
            pr.p_adjusted = std::min(1.0, pr.p_unadjusted * m);
            results.push_back(std::move(pr));
        }
    }
    return results;
}

}  // namespace agile::stats
