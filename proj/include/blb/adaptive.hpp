// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "blb/procedures.hpp"

namespace blb {

/// An ordered series of equal-length real vectors.
class SummarySeries {
  public:
    SummarySeries() = default;
    explicit SummarySeries(std::vector<std::vector<double>> values);

    /// Throws ShapeError if `z` differs in length from earlier entries.
    void push(std::vector<double> z);

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    const std::vector<std::vector<double>>& values() const noexcept { return values_; }

  private:
    std::vector<std::vector<double>> values_;
};

/// Denominator floor for dimensions whose latest value is (near) zero.
inline constexpr double kConvergenceFloor = 1e-12;

/// True iff the series has more than w entries and, for each of the w previous
/// entries, the mean over dimensions of |z_prev - z_last| / |z_last| is at most
/// epsilon. |z_last| is floored at kConvergenceFloor.
bool has_converged(const SummarySeries& series, std::size_t window, double epsilon);

enum class StopReason { converged, cap_reached };

std::string_view to_string(StopReason reason);

struct SelectionReport {
    std::vector<std::size_t> r_per_subsample;
    std::vector<StopReason> r_stop;
    std::size_t s = 0;
    StopReason s_stop = StopReason::cap_reached;
    /// Resamples whose estimates were computed, including any that a parallel
    /// batch produced past the stopping point.
    std::size_t resamples_computed = 0;

    std::size_t resamples_used() const noexcept;
};

struct AdaptiveResult {
    QualitySummary summary;
    Trajectory trajectory;
    SelectionReport selection;
    RunStats stats;
};

/// BLB with r chosen per subsample and s chosen overall by the convergence check.
///
/// The inner series holds the dispersion (interval widths or scalars) of the
/// summary after each resample, starting from the first resample the metric
/// accepts; the outer series holds the dispersion of the running average after
/// each subsample. Resamples are computed in parallel batches of window_r, but
/// the check is applied to every prefix in index order, so the selected r never
/// depends on the batch size or worker count.
AdaptiveResult run_blb_adaptive(const DataMatrix& data,
                                const EstimatorSpec& estimator,
                                const MetricSpec& metric,
                                const ProcedureConfig& config);

}  // namespace blb
