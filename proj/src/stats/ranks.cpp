#include "agile/stats/ranks.hpp"

#include <algorithm>
#include <numeric>

#include "agile/errors.hpp"

namespace agile::stats {

std::vector<double> midranks(std::span<const double> values) {
    if (values.empty()) throw DataError("midranks: empty input");
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

std::vector<long> tie_group_sizes(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<long> sizes;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        sizes.push_back(static_cast<long>(j - i + 1));
        i = j + 1;
    }
    return sizes;
}

double tie_correction_term(std::span<const double> values) {
    double sum = 0.0;
    for (long t : tie_group_sizes(values)) {
        const double td = static_cast<double>(t);
        sum += td * td * td - td;
    }
    return sum;
}

}  // namespace agile::stats
