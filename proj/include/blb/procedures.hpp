// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Quality-assessment drivers: the Bag of Little Bootstraps, the classical
// bootstrap, the b-out-of-n bootstrap and subsampling.
//
// Every (subsample j, resample k) work unit draws from its own RngStream, and
// all reductions happen in index order after the units finish, so results are
// bit-identical for any worker count. Only elapsed times vary between runs.
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "blb/estimators.hpp"
#include "blb/metrics.hpp"
#include "blb/model.hpp"

namespace blb {

enum class Method { blb, bootstrap, bofn, subsampling };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct TrajectoryStep {
    double elapsed_seconds = 0.0;
    QualitySummary summary;
    std::string work_unit;
};

/// Partial outputs of a driver, one per completed work unit.
class Trajectory {
  public:
    /// Throws ShapeError on a kind/shape change and ConfigError if time goes backwards.
    void push(TrajectoryStep step);

    const std::vector<TrajectoryStep>& steps() const noexcept { return steps_; }
    std::size_t size() const noexcept { return steps_.size(); }
    bool empty() const noexcept { return steps_.empty(); }

  private:
    std::vector<TrajectoryStep> steps_;
};

/// Instrumentation counters gathered while a driver runs.
struct RunStats {
    std::size_t estimates_computed = 0;
    /// Largest number of distinct rows any single estimate call saw.
    std::size_t max_distinct_rows = 0;
    /// Largest number of rows held by one work unit (materialized subsample or resample).
    std::size_t max_resident_rows = 0;
};

struct ProcedureResult {
    QualitySummary summary;
    Trajectory trajectory;
    RunStats stats;
};

ProcedureResult run_blb(const DataMatrix& data,
                        const EstimatorSpec& estimator,
                        const MetricSpec& metric,
                        const ProcedureConfig& config);

ProcedureResult run_bootstrap(const DataMatrix& data,
                              const EstimatorSpec& estimator,
                              const MetricSpec& metric,
                              const ProcedureConfig& config);

ProcedureResult run_bofn(const DataMatrix& data,
                         const EstimatorSpec& estimator,
                         const MetricSpec& metric,
                         const ProcedureConfig& config);

ProcedureResult run_subsampling(const DataMatrix& data,
                                const EstimatorSpec& estimator,
                                const MetricSpec& metric,
                                const ProcedureConfig& config);

ProcedureResult run_procedure(Method method,
                              const DataMatrix& data,
                              const EstimatorSpec& estimator,
                              const MetricSpec& metric,
                              const ProcedureConfig& config);

// Building blocks shared with the adaptive driver and the benchmarks.
namespace blb_detail {

/// The first `count` BLB subsets for this configuration (uniform draws use one
/// stream per subsample; partition mode cuts one shared random partition).
std::vector<IndexSubset> subsets(std::size_t n, std::size_t b, const ProcedureConfig& config,
                                 std::size_t count);

/// The estimate of BLB resample k of a materialized subsample j. Stores the
/// resample's distinct row count in `distinct_rows` when given.
EstimateVector resample_estimate(const DataMatrix& subsample,
                                 std::size_t n,
                                 const EstimatorSpec& estimator,
                                 const ProcedureConfig& config,
                                 std::size_t j,
                                 std::size_t k,
                                 std::size_t* distinct_rows = nullptr);

/// Recomputes subsample j's summary from scratch (sequentially).
QualitySummary subsample_summary(const DataMatrix& data,
                                 const EstimatorSpec& estimator,
                                 const MetricSpec& metric,
                                 const ProcedureConfig& config,
                                 std::size_t j);

}  // namespace blb_detail

}  // namespace blb
