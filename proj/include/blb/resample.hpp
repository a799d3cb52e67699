// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "blb/model.hpp"
#include "blb/rng.hpp"

namespace blb {

/// b distinct indices from [0, n), uniform over all size-b subsets.
IndexSubset draw_subset(std::size_t n, std::size_t b, RngStream& rng);

/// floor(n / b) disjoint size-b subsets cut from a uniformly random permutation
/// of [0, n). The n mod b leftover indices are dropped.
std::vector<IndexSubset> draw_partition(std::size_t n, std::size_t b, RngStream& rng);

/// Multinomial(n, uniform over b cells) by sequential conditional binomials.
std::vector<std::uint64_t> draw_multinomial_counts(std::uint64_t n, std::size_t b, RngStream& rng);

/// b independent Poisson(n / b) counts. An all-zero draw is redrawn once; a second
/// all-zero draw throws ConfigError.
std::vector<std::uint64_t> draw_poisson_counts(std::uint64_t n, std::size_t b, RngStream& rng);

/// A resample of nominal size `nominal` over the rows of `source` (typically a
/// materialized subsample of b rows). Distinct rows never exceed source.n().
WeightedSample resample_weighted(const DataMatrix& source,
                                 std::uint64_t nominal,
                                 ResampleFlavor flavor,
                                 RngStream& rng);

/// Same as above, but the sample references the subset's rows of the full dataset
/// instead of a materialized copy.
WeightedSample resample_weighted(const DataMatrix& data,
                                 const IndexSubset& subset,
                                 std::uint64_t nominal,
                                 ResampleFlavor flavor,
                                 RngStream& rng);

/// The classical bootstrap resample: n draws with replacement from all n rows.
WeightedSample resample_classical(const DataMatrix& data, RngStream& rng);

/// `size` draws with replacement from all rows of `data` (the b-out-of-n resample).
WeightedSample resample_with_replacement(const DataMatrix& data, std::uint64_t size, RngStream& rng);

}  // namespace blb
