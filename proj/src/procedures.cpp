// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
#include "blb/procedures.hpp"

#include <atomic>
#include <chrono>
#include <optional>
#include <string>

#include "blb/parallel.hpp"
#include "blb/resample.hpp"
#include "blb/rng.hpp"

namespace blb {

std::string_view to_string(Method method) {
    switch (method) {
        case Method::blb: return "blb";
        case Method::bootstrap: return "boot";
        case Method::bofn: return "bofn";
        case Method::subsampling: return "subsampling";
    }
    return "?";
}

Method parse_method(std::string_view text) {
    if (text == "blb") return Method::blb;
    if (text == "boot" || text == "bootstrap") return Method::bootstrap;
    if (text == "bofn") return Method::bofn;
    if (text == "subsampling") return Method::subsampling;
    throw ConfigError("unknown method '" + std::string(text) + "'");
}

void Trajectory::push(TrajectoryStep step) {
    if (!steps_.empty()) {
        const auto& last = steps_.back();
        if (!step.summary.same_shape(last.summary)) {
            throw ShapeError("trajectory steps must share summary kind and shape");
        }
        if (step.elapsed_seconds < last.elapsed_seconds) {
            throw ConfigError("trajectory elapsed time must be nondecreasing");
        }
    }
    steps_.push_back(std::move(step));
}

namespace {

using Clock = std::chrono::steady_clock;

// Stream label for the resample streams of each driver.
enum : std::uint64_t { kBlb = 0, kBoot = 1, kBofn = 2, kSub = 3 };

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void atomic_max(std::atomic<std::size_t>& target, std::size_t value) {
    std::size_t cur = target.load(std::memory_order_relaxed);
    while (cur < value && !target.compare_exchange_weak(cur, value, std::memory_order_relaxed)) {
    }
}

struct Counters {
    std::atomic<std::size_t> estimates{0};
    std::atomic<std::size_t> max_distinct{0};
    std::atomic<std::size_t> max_resident{0};

    void record(std::size_t distinct, std::size_t resident) {
        estimates.fetch_add(1, std::memory_order_relaxed);
        atomic_max(max_distinct, distinct);
        atomic_max(max_resident, resident);
    }

    RunStats snapshot() const {
        return {estimates.load(), max_distinct.load(), max_resident.load()};
    }
};

void check_inputs(const DataMatrix& data,
                  const EstimatorSpec& estimator,
                  const MetricSpec& metric,
                  const ProcedureConfig& config) {
    estimator.validate();
    metric.validate();
    config.validate(data.n());
    if (estimator.kind == EstimatorKind::logistic_newton) validate(data, Task::classification);
    if (estimator.kind != EstimatorKind::weighted_mean && !data.has_response()) {
        throw DataError(DataError::Kind::missing_response,
                        std::string("estimator '") + std::string(to_string(estimator.kind)) +
                            "' requires a response column");
    }
}

template <typename Fn>
EstimateVector guarded(std::size_t j, std::size_t k, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw ProcedureError(j, k, e.what());
    }
}

/// Shared skeleton of the three single-ensemble drivers: r independent units,
/// each producing one estimate; the trajectory holds the summary of every prefix.
template <typename UnitFn, typename Finish>
ProcedureResult run_flat(std::size_t r,
                         const MetricSpec& metric,
                         unsigned workers,
                         UnitFn&& unit,
                         Finish&& finish) {
    const auto start = Clock::now();
    std::vector<std::optional<EstimateVector>> estimates(r);
    std::vector<double> done_at(r, 0.0);
    Counters counters;

    parallel_for(r, workers, [&](std::size_t k) {
        estimates[k] = guarded(ProcedureError::npos, k, [&] { return unit(k, counters); });
        done_at[k] = seconds_since(start);
    });

    ProcedureResult out{QualitySummary::scalars({0.0}), {}, counters.snapshot()};
    std::vector<EstimateVector> prefix;
    prefix.reserve(r);
    double elapsed = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
        prefix.push_back(*estimates[k]);
        elapsed = std::max(elapsed, done_at[k]);
        if (prefix.size() < metric.min_ensemble()) continue;
        out.trajectory.push({elapsed, finish(summarize(metric, EstimateEnsemble(prefix))),
                             "resample " + std::to_string(k)});
    }
    if (out.trajectory.empty()) {
        throw ConfigError("metric '" + std::string(to_string(metric.kind)) + "' needs r >= " +
                          std::to_string(metric.min_ensemble()));
    }
    out.summary = out.trajectory.steps().back().summary;
    return out;
}

}  // namespace

namespace blb_detail {

std::vector<IndexSubset> subsets(std::size_t n, std::size_t b, const ProcedureConfig& config,
                                 std::size_t count) {
    std::vector<IndexSubset> out;
    out.reserve(count);
    if (config.subsample_mode == SubsampleMode::disjoint_partition) {
        RngStream rng(config.seed, StreamTag::partition);
        auto parts = draw_partition(n, b, rng);
        if (count > parts.size()) {
            throw ConfigError("disjoint partition yields only " + std::to_string(parts.size()) +
                              " subsets of size " + std::to_string(b) + ", " + std::to_string(count) +
                              " requested");
        }
        parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(count), parts.end());
        return parts;
    }
    for (std::size_t j = 0; j < count; ++j) {
        RngStream rng(config.seed, StreamTag::subsample, {j});
        out.push_back(draw_subset(n, b, rng));
    }
    return out;
}

EstimateVector resample_estimate(const DataMatrix& subsample,
                                 std::size_t n,
                                 const EstimatorSpec& estimator,
                                 const ProcedureConfig& config,
                                 std::size_t j,
                                 std::size_t k,
                                 std::size_t* distinct_rows) {
    RngStream rng(config.seed, StreamTag::resample, {kBlb, j, k});
    const WeightedSample sample = resample_weighted(subsample, n, config.flavor, rng);
    if (distinct_rows) *distinct_rows = sample.distinct_rows();
    return estimate(estimator, sample);
}

QualitySummary subsample_summary(const DataMatrix& data,
                                 const EstimatorSpec& estimator,
                                 const MetricSpec& metric,
                                 const ProcedureConfig& config,
                                 std::size_t j) {
    const std::size_t n = data.n();
    const std::size_t b = config.subset_size(n);
    const auto subset = std::move(subsets(n, b, config, j + 1).back());
    const DataMatrix subsample = data.select(subset.indices());
    std::vector<EstimateVector> ensemble;
    for (std::size_t k = 0; k < config.r; ++k) {
        ensemble.push_back(guarded(j, k, [&] {
            return resample_estimate(subsample, n, estimator, config, j, k);
        }));
    }
    return summarize(metric, EstimateEnsemble(std::move(ensemble)));
}

}  // namespace blb_detail

ProcedureResult run_blb(const DataMatrix& data,
                        const EstimatorSpec& estimator,
                        const MetricSpec& metric,
                        const ProcedureConfig& config) {
    check_inputs(data, estimator, metric, config);
    if (config.r < metric.min_ensemble()) {
        throw ConfigError("metric '" + std::string(to_string(metric.kind)) + "' needs r >= " +
                          std::to_string(metric.min_ensemble()));
    }
    const auto start = Clock::now();
    const std::size_t n = data.n();
    const std::size_t b = config.subset_size(n);
    const std::size_t s = config.s;
    const std::size_t r = config.r;

    // Each subsample is copied out once; its resamples only ever touch these b rows.
    std::vector<DataMatrix> subsamples;
    subsamples.reserve(s);
    for (const auto& subset : blb_detail::subsets(n, b, config, s)) {
        subsamples.push_back(data.select(subset.indices()));
    }

    Counters counters;
    std::vector<std::optional<EstimateVector>> estimates(s * r);
    std::vector<std::optional<QualitySummary>> summaries(s);
    std::vector<double> done_at(s, 0.0);
    std::vector<std::atomic<std::size_t>> remaining(s);
    for (auto& c : remaining) c.store(r);

    parallel_for(s * r, config.workers, [&](std::size_t unit) {
        const std::size_t j = unit / r;
        const std::size_t k = unit % r;
        std::size_t distinct = 0;
        estimates[unit] = guarded(j, k, [&] {
            return blb_detail::resample_estimate(subsamples[j], n, estimator, config, j, k, &distinct);
        });
        counters.record(distinct, subsamples[j].n());
        if (remaining[j].fetch_sub(1, std::memory_order_acq_rel) == 1) {
            std::vector<EstimateVector> ensemble;
            ensemble.reserve(r);
            for (std::size_t kk = 0; kk < r; ++kk) ensemble.push_back(*estimates[j * r + kk]);
            summaries[j] = summarize(metric, EstimateEnsemble(std::move(ensemble)));
            done_at[j] = seconds_since(start);
        }
    });

    ProcedureResult out{QualitySummary::scalars({0.0}), {}, counters.snapshot()};
    std::vector<QualitySummary> done;
    done.reserve(s);
    double elapsed = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
        done.push_back(*summaries[j]);
        elapsed = std::max(elapsed, done_at[j]);
        out.trajectory.push({elapsed, average(done), "subsample " + std::to_string(j)});
    }
    out.summary = out.trajectory.steps().back().summary;
    return out;
}

ProcedureResult run_bootstrap(const DataMatrix& data,
                              const EstimatorSpec& estimator,
                              const MetricSpec& metric,
                              const ProcedureConfig& config) {
    check_inputs(data, estimator, metric, config);
    return run_flat(
        config.r, metric, config.workers,
        [&](std::size_t k, Counters& counters) {
            RngStream rng(config.seed, StreamTag::resample, {kBoot, 0, k});
            const WeightedSample sample = resample_classical(data, rng);
            counters.record(sample.distinct_rows(), sample.distinct_rows());
            return estimate(estimator, sample);
        },
        [](QualitySummary s) { return s; });
}

ProcedureResult run_bofn(const DataMatrix& data,
                         const EstimatorSpec& estimator,
                         const MetricSpec& metric,
                         const ProcedureConfig& config) {
    check_inputs(data, estimator, metric, config);
    const std::size_t n = data.n();
    const std::size_t b = config.subset_size(n);
    return run_flat(
        config.r, metric, config.workers,
        [&](std::size_t k, Counters& counters) {
            RngStream rng(config.seed, StreamTag::resample, {kBofn, 0, k});
            const WeightedSample sample = resample_with_replacement(data, b, rng);
            counters.record(sample.distinct_rows(), sample.distinct_rows());
            return estimate(estimator, sample);
        },
        [&](const QualitySummary& s) { return correct_for_size(s, b, n, config.rate_exponent); });
}

ProcedureResult run_subsampling(const DataMatrix& data,
                                const EstimatorSpec& estimator,
                                const MetricSpec& metric,
                                const ProcedureConfig& config) {
    check_inputs(data, estimator, metric, config);
    const std::size_t n = data.n();
    const std::size_t b = config.subset_size(n);
    return run_flat(
        config.r, metric, config.workers,
        [&](std::size_t k, Counters& counters) {
            RngStream rng(config.seed, StreamTag::resample, {kSub, 0, k});
            const IndexSubset subset = draw_subset(n, b, rng);
            const auto idx = subset.indices();
            const WeightedSample sample(data, std::vector<std::size_t>(idx.begin(), idx.end()),
                                        std::vector<std::uint64_t>(b, 1), b, WeightKind::unit);
            counters.record(sample.distinct_rows(), sample.distinct_rows());
            return estimate(estimator, sample);
        },
        [&](const QualitySummary& s) { return correct_for_size(s, b, n, config.rate_exponent); });
}

ProcedureResult run_procedure(Method method,
                              const DataMatrix& data,
                              const EstimatorSpec& estimator,
                              const MetricSpec& metric,
                              const ProcedureConfig& config) {
    switch (method) {
        case Method::blb: return run_blb(data, estimator, metric, config);
        case Method::bootstrap: return run_bootstrap(data, estimator, metric, config);
        case Method::bofn: return run_bofn(data, estimator, metric, config);
        case Method::subsampling: return run_subsampling(data, estimator, metric, config);
    }
    throw ConfigError("unknown method");
}

}  // namespace blb
