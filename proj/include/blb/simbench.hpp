// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Simulation methodology for judging quality-assessment procedures against a
// known data-generating distribution: synthetic generators, a Monte Carlo
// ground truth, relative errors and multi-realization experiments.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "blb/adaptive.hpp"
#include "blb/estimators.hpp"
#include "blb/metrics.hpp"
#include "blb/procedures.hpp"
#include "blb/rng.hpp"

namespace blb {

enum class FeatureDist { normal, student_t, gamma };
enum class Link { linear, linear_scaled_by_sqrt_d, nonlinear_noisy };

std::string_view to_string(FeatureDist dist);
std::string_view to_string(Link link);

struct DataGeneratingSpec {
    Task task = Task::classification;
    FeatureDist features = FeatureDist::student_t;
    double df = 3.0;
    double gamma_shape = 2.0;
    double gamma_scale = 1.0;
    std::size_t d = 10;
    /// Empty means all ones.
    std::vector<double> coefficients;
    Link link = Link::linear;
    /// Response noise (regression, and the nonlinear_noisy link).
    double noise_sd = 1.0;
    /// Weight c of the quadratic term c * sum(x^2) in the nonlinear_noisy link.
    /// This form is a stand-in for a misspecified model, not a reference design.
    double nonlinearity = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
    Eigen::VectorXd beta() const;
};

/// n i.i.d. rows from the generator. Features are drawn row by row, then the response.
DataMatrix generate(const DataGeneratingSpec& spec, std::size_t n, RngStream& rng);

/// Dataset realization `index` of size n, on its own stream derived from spec.seed.
DataMatrix generate_realization(const DataGeneratingSpec& spec, std::size_t n, StreamTag purpose,
                                std::size_t index);

struct GroundTruth {
    QualitySummary summary;
    std::size_t num_realizations = 0;
    std::size_t n = 0;
};

/// The metric applied to the pooled full-data estimates of `num_realizations`
/// independent size-n datasets. Realizations are processed in parallel; the
/// result depends only on spec.seed.
GroundTruth compute_ground_truth(const DataGeneratingSpec& spec,
                                 std::size_t n,
                                 std::size_t num_realizations,
                                 const EstimatorSpec& estimator,
                                 const MetricSpec& metric,
                                 unsigned workers = 1);

/// Mean over dimensions of |c - c_o| / c_o, where c is an interval width (or
/// scalar) of `estimate` and c_o the matching value of `truth`.
double relative_error(const QualitySummary& estimate, const QualitySummary& truth);

struct ProcedureCell {
    std::string label;
    Method method = Method::blb;
    bool adaptive = false;
    ProcedureConfig config;
};

struct ExperimentPoint {
    double elapsed_seconds = 0.0;
    double relative_error = 0.0;
    /// Realizations that reached this step.
    std::size_t count = 0;
};

struct ProcedureOutcome {
    std::string label;
    /// Error-vs-time trajectory averaged across realizations by step index.
    std::vector<ExperimentPoint> trajectory;
    /// Final relative error of every successful realization.
    std::vector<double> final_errors;
    double final_relative_error = 0.0;
    /// Standard error of the mean of final_errors (0 with fewer than two).
    double final_error_stderr = 0.0;
    double mean_total_seconds = 0.0;
    /// One message per failed realization.
    std::vector<std::string> failures;
};

struct ExperimentReport {
    std::size_t n = 0;
    std::size_t realizations = 0;
    std::vector<ProcedureOutcome> procedures;

    const ProcedureOutcome& at(std::string_view label) const;
};

/// Runs every cell on `num_dataset_realizations` fresh datasets. A failing cell
/// is recorded in its outcome and does not stop the others. Realization i runs
/// each cell with seed derived from (cell seed, i).
ExperimentReport run_experiment(const DataGeneratingSpec& spec,
                                std::size_t n,
                                const std::vector<ProcedureCell>& cells,
                                const EstimatorSpec& estimator,
                                const MetricSpec& metric,
                                const GroundTruth& truth,
                                std::size_t num_dataset_realizations);

struct GridCell {
    std::size_t r = 0;
    std::size_t s = 0;
    double relative_error = 0.0;
};

/// BLB relative error for every (r, s) pair, averaged over realizations. The
/// estimates for the largest r and s are computed once per realization and each
/// cell reads its prefix, which equals run_blb with that r and s exactly.
std::vector<GridCell> blb_grid(const DataGeneratingSpec& spec,
                               std::size_t n,
                               const EstimatorSpec& estimator,
                               const MetricSpec& metric,
                               const GroundTruth& truth,
                               const ProcedureConfig& config,
                               const std::vector<std::size_t>& r_values,
                               const std::vector<std::size_t>& s_values,
                               std::size_t num_dataset_realizations);

/// Seed used by realization `index` of a cell whose configured seed is `seed`.
std::uint64_t realization_seed(std::uint64_t seed, std::size_t index);

}  // namespace blb
