// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
#include "blb/estimators.hpp"

#include <cfloat>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace blb {

std::string_view to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::weighted_mean: return "mean";
        case EstimatorKind::least_squares: return "linreg";
        case EstimatorKind::logistic_newton: return "logreg";
    }
    return "?";
}

EstimatorKind parse_estimator_kind(std::string_view text) {
    if (text == "mean" || text == "weighted_mean") return EstimatorKind::weighted_mean;
    if (text == "linreg" || text == "least_squares") return EstimatorKind::least_squares;
    if (text == "logreg" || text == "logistic_newton") return EstimatorKind::logistic_newton;
    throw ConfigError("unknown estimator '" + std::string(text) + "'");
}

void EstimatorSpec::validate() const {
    if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
    if (!(gradient_tolerance > 0.0)) throw ConfigError("gradient_tolerance must be positive");
    if (!(ridge_lambda >= 0.0)) throw ConfigError("ridge_lambda must be nonnegative");
}

namespace {

struct Gathered {
    Eigen::MatrixXd x;
    Eigen::VectorXd w;
    Eigen::VectorXd y;
};

Gathered gather(const WeightedSample& sample, bool need_response) {
    const DataMatrix& src = sample.source();
    const auto m = static_cast<Eigen::Index>(sample.distinct_rows());
    Gathered g{Eigen::MatrixXd(m, static_cast<Eigen::Index>(src.p())), Eigen::VectorXd(m), {}};
    if (need_response) {
        if (!src.has_response()) {
            throw EstimationError(EstimationError::Reason::missing_response,
                                  "estimator requires a response column");
        }
        g.y.resize(m);
    }
    const auto rows = sample.rows();
    const auto weights = sample.weights();
    for (Eigen::Index a = 0; a < m; ++a) {
        const auto i = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(a)]);
        g.x.row(a) = src.features().row(i);
        g.w[a] = static_cast<double>(weights[static_cast<std::size_t>(a)]);
        if (need_response) g.y[a] = src.response()[i];
    }
    if (!(g.w.sum() > 0.0)) {
        throw EstimationError(EstimationError::Reason::zero_weight, "sample has zero total weight");
    }
    return g;
}

/// Solves the symmetric system; throws when it is numerically rank deficient.
/// The collinearity test only applies to unpenalized systems.
Eigen::VectorXd solve_normal(const Eigen::MatrixXd& a, const Eigen::VectorXd& rhs, double ridge) {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    bool singular = llt.info() != Eigen::Success;
    if (!singular && ridge == 0.0) {
        // L_ii^2 / A_ii is 1 - R^2 of column i regressed on the earlier columns.
        const Eigen::MatrixXd l = llt.matrixL();
        for (Eigen::Index i = 0; i < a.rows() && !singular; ++i) {
            singular = !(l(i, i) * l(i, i) > 1e-12 * a(i, i));
        }
    }
    if (singular) {
        throw EstimationError(EstimationError::Reason::singular_system,
                              "normal equations are singular (rank-deficient design)");
    }
    return llt.solve(rhs);
}

double softplus(double eta) { return std::max(eta, 0.0) + std::log1p(std::exp(-std::fabs(eta))); }

/// Weight-normalized negative log-likelihood plus the ridge term.
double penalized_nll(const Gathered& g, double total, const Eigen::VectorXd& beta, double ridge) {
    const Eigen::VectorXd eta = g.x * beta;
    double f = 0.0;
    for (Eigen::Index a = 0; a < eta.size(); ++a) {
        f += g.w[a] * (softplus(eta[a]) - g.y[a] * eta[a]);
    }
    return f / total + 0.5 * ridge * beta.squaredNorm();
}

}  // namespace

LogisticFit fit_logistic(const EstimatorSpec& spec, const WeightedSample& sample) {
    spec.validate();
    const Gathered g = gather(sample, true);
    const auto p = g.x.cols();
    const double total = g.w.sum();
    const double ridge = spec.ridge_lambda;

    LogisticFit fit;
    fit.coefficients = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd& beta = fit.coefficients;
    for (std::size_t it = 0;; ++it) {
        const Eigen::VectorXd eta = g.x * beta;
        const Eigen::VectorXd mu = (1.0 + (-eta.array()).exp()).inverse().matrix();
        fit.gradient = g.x.transpose() * (g.w.array() * (g.y - mu).array()).matrix() / total - ridge * beta;
        fit.iterations = it;

        const Eigen::VectorXd h = (g.w.array() * mu.array() * (1.0 - mu.array())).matrix() / total;
        Eigen::MatrixXd hess = g.x.transpose() * h.asDiagonal() * g.x;
        hess.diagonal().array() += ridge;
        Eigen::VectorXd step;
        try {
            step = solve_normal(hess, fit.gradient, ridge);
        } catch (const EstimationError&) {
            // At beta = 0 the curvature is a multiple of the design's Gram matrix.
            if (it == 0) throw;
            break;
        }

        // A vanishing gradient with a non-vanishing Newton step means the
        // likelihood keeps improving toward infinity (separable data).
        if (fit.gradient.lpNorm<Eigen::Infinity>() <= spec.gradient_tolerance &&
            step.lpNorm<Eigen::Infinity>() <= 1e-6 * (1.0 + beta.lpNorm<Eigen::Infinity>())) {
            fit.converged = true;
            break;
        }
        if (it == spec.max_iterations) break;

        // Damped step: halve until the objective stops increasing (up to rounding).
        const double f0 = penalized_nll(g, total, beta, ridge);
        const double slack = 64.0 * DBL_EPSILON * std::fabs(f0);
        double t = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= 30; ++halving, t *= 0.5) {
            const Eigen::VectorXd candidate = beta + t * step;
            if (penalized_nll(g, total, candidate, ridge) <= f0 + slack) {
                beta = candidate;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    return fit;
}

EstimateVector estimate(const EstimatorSpec& spec, const WeightedSample& sample) {
    spec.validate();
    switch (spec.kind) {
        case EstimatorKind::weighted_mean: {
            const Gathered g = gather(sample, false);
            return EstimateVector((g.x.transpose() * g.w) / g.w.sum());
        }
        case EstimatorKind::least_squares: {
            const Gathered g = gather(sample, true);
            Eigen::MatrixXd a = g.x.transpose() * g.w.asDiagonal() * g.x;
            a.diagonal().array() += spec.ridge_lambda * g.w.sum();
            const Eigen::VectorXd rhs = g.x.transpose() * (g.w.array() * g.y.array()).matrix();
            return EstimateVector(solve_normal(a, rhs, spec.ridge_lambda));
        }
        case EstimatorKind::logistic_newton: {
            LogisticFit fit = fit_logistic(spec, sample);
            if (!fit.converged) {
                throw EstimationError(EstimationError::Reason::non_convergence,
                                      "logistic Newton did not converge after " +
                                          std::to_string(fit.iterations) + " iterations (gradient " +
                                          std::to_string(fit.gradient.lpNorm<Eigen::Infinity>()) +
                                          "); data may be separable");
            }
            return EstimateVector(std::move(fit.coefficients));
        }
    }
    throw ConfigError("unknown estimator kind");
}

}  // namespace blb
