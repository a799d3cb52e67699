// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
#include "blb/adaptive.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "blb/parallel.hpp"

namespace blb {

SummarySeries::SummarySeries(std::vector<std::vector<double>> values) {
    for (auto& z : values) push(std::move(z));
}

void SummarySeries::push(std::vector<double> z) {
    if (!values_.empty() && z.size() != values_.front().size()) {
        throw ShapeError("series entries must share one dimension");
    }
    if (z.empty()) throw ShapeError("series entries must be nonempty");
    values_.push_back(std::move(z));
}

bool has_converged(const SummarySeries& series, std::size_t window, double epsilon) {
    if (window < 1) throw ConfigError("convergence window must be at least 1");
    if (!(epsilon >= 0.0)) throw ConfigError("convergence epsilon must be nonnegative");
    const auto& z = series.values();
    const std::size_t t = z.size();
    if (t <= window) return false;
    const auto& last = z.back();
    const auto d = static_cast<double>(last.size());
    for (std::size_t j = 1; j <= window; ++j) {
        const auto& prev = z[t - 1 - j];
        double total = 0.0;
        for (std::size_t i = 0; i < last.size(); ++i) {
            total += std::fabs(prev[i] - last[i]) / std::max(std::fabs(last[i]), kConvergenceFloor);
        }
        if (total / d > epsilon) return false;
    }
    return true;
}

std::string_view to_string(StopReason reason) {
    return reason == StopReason::converged ? "converged" : "cap_reached";
}

std::size_t SelectionReport::resamples_used() const noexcept {
    return std::accumulate(r_per_subsample.begin(), r_per_subsample.end(), std::size_t{0});
}

AdaptiveResult run_blb_adaptive(const DataMatrix& data,
                                const EstimatorSpec& estimator,
                                const MetricSpec& metric,
                                const ProcedureConfig& config) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();

    estimator.validate();
    metric.validate();
    config.validate(data.n());
    if (estimator.kind == EstimatorKind::logistic_newton) validate(data, Task::classification);
    const AdaptiveParams params = config.adaptive.value_or(AdaptiveParams{});
    params.validate();
    if (params.r_max < metric.min_ensemble()) throw ConfigError("r_max is too small for the metric");

    const std::size_t n = data.n();
    const std::size_t b = config.subset_size(n);
    std::size_t s_cap = params.s_max;
    std::vector<IndexSubset> partition;
    if (config.subsample_mode == SubsampleMode::disjoint_partition) {
        s_cap = std::min(s_cap, n / b);
        partition = blb_detail::subsets(n, b, config, s_cap);
    }

    AdaptiveResult out{QualitySummary::scalars({0.0}), {}, {}, {}};
    std::vector<QualitySummary> summaries;
    SummarySeries outer;
    RunStats& stats = out.stats;

    for (std::size_t j = 0; j < s_cap; ++j) {
        const IndexSubset subset = partition.empty()
                                       ? std::move(blb_detail::subsets(n, b, config, j + 1).back())
                                       : partition[j];
        const DataMatrix subsample = data.select(subset.indices());
        stats.max_resident_rows = std::max(stats.max_resident_rows, subsample.n());

        std::vector<EstimateVector> ensemble;
        SummarySeries inner;
        std::optional<QualitySummary> current;
        StopReason r_stop = StopReason::cap_reached;
        bool stopped = false;
        std::size_t k0 = 0;
        while (!stopped && k0 < params.r_max) {
            const std::size_t batch = std::min(params.window_r, params.r_max - k0);
            std::vector<std::optional<EstimateVector>> fresh(batch);
            std::vector<std::size_t> distinct(batch, 0);
            parallel_for(batch, config.workers, [&](std::size_t u) {
                const std::size_t k = k0 + u;
                try {
                    fresh[u] = blb_detail::resample_estimate(subsample, n, estimator, config, j, k,
                                                             &distinct[u]);
                } catch (const Error& e) {
                    throw ProcedureError(j, k, e.what());
                }
            });
            out.selection.resamples_computed += batch;
            stats.estimates_computed += batch;
            stats.max_distinct_rows =
                std::max(stats.max_distinct_rows, *std::max_element(distinct.begin(), distinct.end()));

            for (std::size_t u = 0; u < batch && !stopped; ++u) {
                ensemble.push_back(std::move(*fresh[u]));
                if (ensemble.size() < metric.min_ensemble()) continue;
                current = summarize(metric, EstimateEnsemble(ensemble));
                inner.push(dispersion(*current));
                if (has_converged(inner, params.window_r, params.epsilon_r)) {
                    r_stop = StopReason::converged;
                    stopped = true;
                }
            }
            k0 += batch;
        }

        out.selection.r_per_subsample.push_back(ensemble.size());
        out.selection.r_stop.push_back(r_stop);
        summaries.push_back(std::move(*current));
        QualitySummary running = average(summaries);
        outer.push(dispersion(running));
        const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
        out.trajectory.push({elapsed, running,
                             "subsample " + std::to_string(j) + " r=" + std::to_string(ensemble.size())});
        out.summary = std::move(running);
        out.selection.s = j + 1;
        if (has_converged(outer, params.window_s, params.epsilon_s)) {
            out.selection.s_stop = StopReason::converged;
            break;
        }
    }
    return out;
}

}  // namespace blb
