// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string_view>

#include "blb/model.hpp"

namespace blb {

enum class EstimatorKind { weighted_mean, least_squares, logistic_newton };

std::string_view to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(std::string_view text);

struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::weighted_mean;
    std::size_t max_iterations = 100;
    /// Newton stops when the max-norm of the gradient of the weight-normalized
    /// objective is at most this.
    double gradient_tolerance = 1e-8;
    /// Ridge penalty per unit weight: the fitted objective is the weighted loss
    /// divided by the total weight plus (ridge_lambda / 2) * |beta|^2, so the
    /// penalty's strength does not depend on the nominal sample size.
    double ridge_lambda = 0.0;

    void validate() const;
};

/// Fits the estimator on a weighted sample in O(distinct rows) memory.
///
/// All three estimators depend only on the multiset of (row, weight) pairs.
/// Least squares and logistic regression use the feature matrix as the design
/// matrix; append a constant column for an intercept.
///
/// Throws EstimationError on zero total weight, a missing response, a singular
/// normal system (ridge_lambda == 0), or Newton non-convergence.
EstimateVector estimate(const EstimatorSpec& spec, const WeightedSample& sample);

/// Diagnostics of one logistic fit, for tests and tooling. `gradient` is the
/// gradient of the weight-normalized penalized objective at `coefficients`.
struct LogisticFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd gradient;
    std::size_t iterations = 0;
    bool converged = false;
};

LogisticFit fit_logistic(const EstimatorSpec& spec, const WeightedSample& sample);

}  // namespace blb
