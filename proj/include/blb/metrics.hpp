// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "blb/model.hpp"

namespace blb {

enum class MetricKind { marginal_ci, stderr_per_dim };

std::string_view to_string(MetricKind kind);
MetricKind parse_metric_kind(std::string_view text);

struct MetricSpec {
    MetricKind kind = MetricKind::marginal_ci;
    double coverage = QualitySummary::default_coverage;

    void validate() const;
    /// Smallest ensemble the metric accepts.
    std::size_t min_ensemble() const noexcept { return kind == MetricKind::stderr_per_dim ? 2 : 1; }
};

/// Empirical quantile with linear interpolation between order statistics at
/// 1-based position 1 + (size - 1) * prob. `sorted` must be ascending.
double interpolated_quantile(std::span<const double> sorted, double prob);

/// Percentile intervals (marginal_ci) or sample standard deviations (stderr).
QualitySummary summarize(const MetricSpec& spec, const EstimateEnsemble& ensemble);

/// Element-wise mean; the inputs are reduced in list order.
QualitySummary average(std::span<const QualitySummary> summaries);

/// Rescales dispersion measured on size-b data to size n: interval half-widths
/// (about the midpoint) or scalars are multiplied by (b / n)^rate_exponent.
QualitySummary correct_for_size(const QualitySummary& summary,
                                std::size_t b,
                                std::size_t n,
                                double rate_exponent);

/// upper - lower per dimension.
std::vector<double> ci_widths(const QualitySummary& summary);

double mean_ci_width(const QualitySummary& summary);

/// The per-dimension quantity that relative errors and convergence checks are
/// taken on: interval widths, or the scalars themselves.
std::vector<double> dispersion(const QualitySummary& summary);

}  // namespace blb
