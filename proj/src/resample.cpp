// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
#include "blb/resample.hpp"

#include <numeric>
#include <string>
#include <unordered_set>

namespace blb {

namespace {

void check_sizes(std::size_t n, std::size_t b) {
    if (b < 1 || b > n) {
        throw ConfigError("subset size b = " + std::to_string(b) + " must lie in [1, n = " +
                          std::to_string(n) + "]");
    }
}

WeightedSample compact(const DataMatrix& source,
                       const std::vector<std::uint64_t>& counts,
                       std::uint64_t nominal,
                       WeightKind kind) {
    std::vector<std::size_t> rows;
    std::vector<std::uint64_t> weights;
    for (std::size_t a = 0; a < counts.size(); ++a) {
        if (counts[a] == 0) continue;
        rows.push_back(a);
        weights.push_back(counts[a]);
    }
    return WeightedSample(source, std::move(rows), std::move(weights), nominal, kind);
}

}  // namespace

IndexSubset draw_subset(std::size_t n, std::size_t b, RngStream& rng) {
    check_sizes(n, b);
    std::vector<std::size_t> chosen;
    chosen.reserve(b);
    if (2 * b >= n) {
        // Dense case: partial Fisher-Yates over the full index range.
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = 0; i < b; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
            std::swap(perm[i], perm[j]);
        }
        chosen.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(b));
    } else {
        // Floyd's algorithm; membership decisions do not depend on set iteration order.
        std::unordered_set<std::size_t> seen;
        seen.reserve(2 * b);
        for (std::size_t j = n - b; j < n; ++j) {
            const std::size_t t = static_cast<std::size_t>(rng.below(j + 1));
            const std::size_t pick = seen.contains(t) ? j : t;
            seen.insert(pick);
            chosen.push_back(pick);
        }
    }
    return IndexSubset(std::move(chosen), n);
}

std::vector<IndexSubset> draw_partition(std::size_t n, std::size_t b, RngStream& rng) {
    check_sizes(n, b);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(perm[i], perm[j]);
    }
    std::vector<IndexSubset> parts;
    parts.reserve(n / b);
    for (std::size_t start = 0; start + b <= n; start += b) {
        parts.emplace_back(std::vector<std::size_t>(perm.begin() + static_cast<std::ptrdiff_t>(start),
                                                    perm.begin() + static_cast<std::ptrdiff_t>(start + b)),
                           n);
    }
    return parts;
}

std::vector<std::uint64_t> draw_multinomial_counts(std::uint64_t n, std::size_t b, RngStream& rng) {
    if (n < 1 || b < 1) throw ConfigError("multinomial counts need n >= 1 and b >= 1");
    std::vector<std::uint64_t> counts(b, 0);
    std::uint64_t remaining = n;
    for (std::size_t a = 0; a + 1 < b && remaining > 0; ++a) {
        const double p = 1.0 / static_cast<double>(b - a);
        counts[a] = rng.binomial(remaining, p);
        remaining -= counts[a];
    }
    counts[b - 1] += remaining;
    return counts;
}

std::vector<std::uint64_t> draw_poisson_counts(std::uint64_t n, std::size_t b, RngStream& rng) {
    if (n < 1 || b < 1) throw ConfigError("Poisson counts need n >= 1 and b >= 1");
    const double rate = static_cast<double>(n) / static_cast<double>(b);
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::vector<std::uint64_t> counts(b);
        std::uint64_t total = 0;
        for (auto& c : counts) {
            c = rng.poisson(rate);
            total += c;
        }
        if (total > 0) return counts;
    }
    throw ConfigError("Poisson resample had zero total weight twice in a row");
}

WeightedSample resample_weighted(const DataMatrix& source,
                                 std::uint64_t nominal,
                                 ResampleFlavor flavor,
                                 RngStream& rng) {
    if (nominal < 1) throw ConfigError("nominal resample size must be at least 1");
    if (flavor == ResampleFlavor::multinomial) {
        return compact(source, draw_multinomial_counts(nominal, source.n(), rng), nominal,
                       WeightKind::multinomial);
    }
    auto counts = draw_poisson_counts(nominal, source.n(), rng);
    const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    return compact(source, counts, total, WeightKind::poisson);
}

WeightedSample resample_weighted(const DataMatrix& data,
                                 const IndexSubset& subset,
                                 std::uint64_t nominal,
                                 ResampleFlavor flavor,
                                 RngStream& rng) {
    if (subset.n() != data.n()) throw ConfigError("index subset was drawn for a different dataset");
    if (nominal < 1) throw ConfigError("nominal resample size must be at least 1");
    const auto counts = flavor == ResampleFlavor::multinomial
                            ? draw_multinomial_counts(nominal, subset.b(), rng)
                            : draw_poisson_counts(nominal, subset.b(), rng);
    std::vector<std::size_t> rows;
    std::vector<std::uint64_t> weights;
    std::uint64_t total = 0;
    for (std::size_t a = 0; a < counts.size(); ++a) {
        if (counts[a] == 0) continue;
        rows.push_back(subset.indices()[a]);
        weights.push_back(counts[a]);
        total += counts[a];
    }
    const auto kind = flavor == ResampleFlavor::multinomial ? WeightKind::multinomial : WeightKind::poisson;
    return WeightedSample(data, std::move(rows), std::move(weights), total, kind);
}

WeightedSample resample_classical(const DataMatrix& data, RngStream& rng) {
    return resample_with_replacement(data, data.n(), rng);
}

WeightedSample resample_with_replacement(const DataMatrix& data, std::uint64_t size, RngStream& rng) {
    return compact(data, draw_multinomial_counts(size, data.n(), rng), size, WeightKind::multinomial);
}

}  // namespace blb
