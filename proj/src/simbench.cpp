// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
#include "blb/simbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>

#include "blb/parallel.hpp"

namespace blb {

std::string_view to_string(FeatureDist dist) {
    switch (dist) {
        case FeatureDist::normal: return "normal";
        case FeatureDist::student_t: return "student_t";
        case FeatureDist::gamma: return "gamma";
    }
    return "?";
}

std::string_view to_string(Link link) {
    switch (link) {
        case Link::linear: return "linear";
        case Link::linear_scaled_by_sqrt_d: return "linear_scaled";
        case Link::nonlinear_noisy: return "nonlinear_noisy";
    }
    return "?";
}

void DataGeneratingSpec::validate() const {
    if (d < 1) throw ConfigError("feature dimension d must be at least 1");
    if (features == FeatureDist::student_t && !(df > 2.0)) {
        throw ConfigError("student_t features need df > 2 for a finite variance");
    }
    if (features == FeatureDist::gamma && !(gamma_shape > 0.0 && gamma_scale > 0.0)) {
        throw ConfigError("gamma features need positive shape and scale");
    }
    if (task == Task::regression && !(noise_sd > 0.0)) {
        throw ConfigError("regression needs noise_sd > 0");
    }
    if (!(noise_sd >= 0.0)) throw ConfigError("noise_sd must be nonnegative");
    if (!coefficients.empty() && coefficients.size() != d) {
        throw ConfigError("coefficient vector length must equal d");
    }
}

Eigen::VectorXd DataGeneratingSpec::beta() const {
    if (coefficients.empty()) return Eigen::VectorXd::Ones(static_cast<Eigen::Index>(d));
    return Eigen::Map<const Eigen::VectorXd>(coefficients.data(), static_cast<Eigen::Index>(d));
}

DataMatrix generate(const DataGeneratingSpec& spec, std::size_t n, RngStream& rng) {
    spec.validate();
    if (n < 1) throw ConfigError("cannot generate an empty dataset");
    const auto rows = static_cast<Eigen::Index>(n);
    const auto d = static_cast<Eigen::Index>(spec.d);
    const Eigen::VectorXd beta = spec.beta();
    const double scale = spec.link == Link::linear_scaled_by_sqrt_d ? 1.0 / std::sqrt(static_cast<double>(d)) : 1.0;

    DataMatrix::Features x(rows, d);
    Eigen::VectorXd y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index c = 0; c < d; ++c) {
            switch (spec.features) {
                case FeatureDist::normal: x(i, c) = rng.normal(); break;
                case FeatureDist::student_t: x(i, c) = rng.student_t(spec.df); break;
                case FeatureDist::gamma: x(i, c) = rng.gamma(spec.gamma_shape, spec.gamma_scale); break;
            }
        }
        double eta = scale * x.row(i).dot(beta);
        if (spec.link == Link::nonlinear_noisy) {
            eta += spec.nonlinearity * x.row(i).squaredNorm();
            if (spec.task == Task::classification) eta += spec.noise_sd * rng.normal();
        }
        if (spec.task == Task::regression) {
            y[i] = eta + spec.noise_sd * rng.normal();
        } else {
            y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-eta))) ? 1.0 : 0.0;
        }
    }
    return DataMatrix(std::move(x), std::move(y));
}

DataMatrix generate_realization(const DataGeneratingSpec& spec, std::size_t n, StreamTag purpose,
                                std::size_t index) {
    RngStream rng(spec.seed, purpose, {n, index});
    return generate(spec, n, rng);
}

GroundTruth compute_ground_truth(const DataGeneratingSpec& spec,
                                 std::size_t n,
                                 std::size_t num_realizations,
                                 const EstimatorSpec& estimator,
                                 const MetricSpec& metric,
                                 unsigned workers) {
    if (num_realizations < 2) throw ConfigError("ground truth needs at least 2 realizations");
    spec.validate();
    estimator.validate();
    metric.validate();
    std::vector<std::optional<EstimateVector>> estimates(num_realizations);
    parallel_for(num_realizations, workers, [&](std::size_t i) {
        const DataMatrix data = generate_realization(spec, n, StreamTag::truth, i);
        try {
            estimates[i] = estimate(estimator, WeightedSample::unit(data));
        } catch (const Error& e) {
            throw ProcedureError(ProcedureError::npos, ProcedureError::npos,
                                 "ground-truth realization " + std::to_string(i) + ": " + e.what());
        }
    });
    std::vector<EstimateVector> pooled;
    pooled.reserve(num_realizations);
    for (auto& e : estimates) pooled.push_back(std::move(*e));
    return {summarize(metric, EstimateEnsemble(std::move(pooled))), num_realizations, n};
}

double relative_error(const QualitySummary& estimate, const QualitySummary& truth) {
    if (estimate.kind() != truth.kind() || estimate.dim() != truth.dim()) {
        throw ShapeError("relative error needs summaries of the same kind and dimension");
    }
    const auto c = dispersion(estimate);
    const auto c0 = dispersion(truth);
    double total = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c0[i] == 0.0) throw ShapeError("truth component " + std::to_string(i) + " is zero");
        total += std::fabs(c[i] - c0[i]) / std::fabs(c0[i]);
    }
    return total / static_cast<double>(c.size());
}

std::uint64_t realization_seed(std::uint64_t seed, std::size_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

const ProcedureOutcome& ExperimentReport::at(std::string_view label) const {
    for (const auto& p : procedures) {
        if (p.label == label) return p;
    }
    throw ConfigError("no procedure labelled '" + std::string(label) + "'");
}

namespace {

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

ExperimentReport run_experiment(const DataGeneratingSpec& spec,
                                std::size_t n,
                                const std::vector<ProcedureCell>& cells,
                                const EstimatorSpec& estimator,
                                const MetricSpec& metric,
                                const GroundTruth& truth,
                                std::size_t num_dataset_realizations) {
    if (truth.n != n) throw ConfigError("ground truth was computed for a different n");
    if (num_dataset_realizations < 1) throw ConfigError("need at least one dataset realization");

    ExperimentReport report;
    report.n = n;
    report.realizations = num_dataset_realizations;
    struct Accum {
        std::vector<double> time_sum, error_sum;
        std::vector<std::size_t> count;
        std::vector<double> totals;
    };
    std::vector<Accum> accum(cells.size());
    for (const auto& cell : cells) report.procedures.push_back({cell.label, {}, {}, 0.0, 0.0, 0.0, {}});

    for (std::size_t i = 0; i < num_dataset_realizations; ++i) {
        const DataMatrix data = generate_realization(spec, n, StreamTag::dataset, i);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            ProcedureConfig config = cells[c].config;
            config.seed = realization_seed(config.seed, i);
            std::optional<Trajectory> trajectory;
            try {
                if (cells[c].adaptive) {
                    trajectory = run_blb_adaptive(data, estimator, metric, config).trajectory;
                } else {
                    trajectory = run_procedure(cells[c].method, data, estimator, metric, config).trajectory;
                }
            } catch (const Error& e) {
                report.procedures[c].failures.push_back("realization " + std::to_string(i) + ": " +
                                                        e.what());
                continue;
            }
            Accum& a = accum[c];
            const auto& steps = trajectory->steps();
            if (a.count.size() < steps.size()) {
                a.time_sum.resize(steps.size(), 0.0);
                a.error_sum.resize(steps.size(), 0.0);
                a.count.resize(steps.size(), 0);
            }
            double err = 0.0;
            for (std::size_t t = 0; t < steps.size(); ++t) {
                err = relative_error(steps[t].summary, truth.summary);
                a.time_sum[t] += steps[t].elapsed_seconds;
                a.error_sum[t] += err;
                ++a.count[t];
            }
            report.procedures[c].final_errors.push_back(err);
            a.totals.push_back(steps.back().elapsed_seconds);
        }
    }

    for (std::size_t c = 0; c < cells.size(); ++c) {
        ProcedureOutcome& out = report.procedures[c];
        const Accum& a = accum[c];
        for (std::size_t t = 0; t < a.count.size(); ++t) {
            const auto k = static_cast<double>(a.count[t]);
            out.trajectory.push_back({a.time_sum[t] / k, a.error_sum[t] / k, a.count[t]});
        }
        out.final_relative_error = mean_of(out.final_errors);
        out.final_error_stderr = stderr_of(out.final_errors);
        out.mean_total_seconds = mean_of(a.totals);
    }
    return report;
}

std::vector<GridCell> blb_grid(const DataGeneratingSpec& spec,
                               std::size_t n,
                               const EstimatorSpec& estimator,
                               const MetricSpec& metric,
                               const GroundTruth& truth,
                               const ProcedureConfig& config,
                               const std::vector<std::size_t>& r_values,
                               const std::vector<std::size_t>& s_values,
                               std::size_t num_dataset_realizations) {
    if (r_values.empty() || s_values.empty()) throw ConfigError("grid axes must be nonempty");
    if (truth.n != n) throw ConfigError("ground truth was computed for a different n");
    const std::size_t r_max = *std::max_element(r_values.begin(), r_values.end());
    const std::size_t s_max = *std::max_element(s_values.begin(), s_values.end());
    if (*std::min_element(r_values.begin(), r_values.end()) < metric.min_ensemble()) {
        throw ConfigError("grid r values are too small for the metric");
    }

    std::vector<GridCell> grid;
    for (std::size_t r : r_values) {
        for (std::size_t s : s_values) grid.push_back({r, s, 0.0});
    }

    for (std::size_t i = 0; i < num_dataset_realizations; ++i) {
        const DataMatrix data = generate_realization(spec, n, StreamTag::dataset, i);
        ProcedureConfig cfg = config;
        cfg.seed = realization_seed(config.seed, i);
        cfg.r = r_max;
        cfg.s = s_max;
        cfg.validate(n);
        const std::size_t b = cfg.subset_size(n);

        std::vector<DataMatrix> subsamples;
        for (const auto& subset : blb_detail::subsets(n, b, cfg, s_max)) {
            subsamples.push_back(data.select(subset.indices()));
        }
        std::vector<std::optional<EstimateVector>> table(s_max * r_max);
        parallel_for(s_max * r_max, cfg.workers, [&](std::size_t unit) {
            const std::size_t j = unit / r_max;
            const std::size_t k = unit % r_max;
            try {
                table[unit] = blb_detail::resample_estimate(subsamples[j], n, estimator, cfg, j, k);
            } catch (const Error& e) {
                throw ProcedureError(j, k, e.what());
            }
        });

        for (auto& cell : grid) {
            std::vector<QualitySummary> per_subsample;
            for (std::size_t j = 0; j < cell.s; ++j) {
                std::vector<EstimateVector> ensemble;
                for (std::size_t k = 0; k < cell.r; ++k) ensemble.push_back(*table[j * r_max + k]);
                per_subsample.push_back(summarize(metric, EstimateEnsemble(std::move(ensemble))));
            }
            cell.relative_error += relative_error(average(per_subsample), truth.summary);
        }
    }
    for (auto& cell : grid) cell.relative_error /= static_cast<double>(num_dataset_realizations);
    return grid;
}

}  // namespace blb
