// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
#include "blb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace blb {

std::string_view to_string(MetricKind kind) {
    return kind == MetricKind::marginal_ci ? "ci" : "stderr";
}

MetricKind parse_metric_kind(std::string_view text) {
    if (text == "ci" || text == "marginal_ci") return MetricKind::marginal_ci;
    if (text == "stderr") return MetricKind::stderr_per_dim;
    throw ConfigError("unknown metric '" + std::string(text) + "'");
}

void MetricSpec::validate() const {
    if (!(coverage > 0.0 && coverage < 1.0)) throw ConfigError("coverage must lie in (0, 1)");
}

double interpolated_quantile(std::span<const double> sorted, double prob) {
    if (sorted.empty()) throw ShapeError("quantile of an empty sample");
    const double pos = static_cast<double>(sorted.size() - 1) * prob;  // 0-based
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

QualitySummary summarize(const MetricSpec& spec, const EstimateEnsemble& ensemble) {
    spec.validate();
    const std::size_t r = ensemble.r();
    if (r < spec.min_ensemble()) {
        throw ConfigError("metric '" + std::string(to_string(spec.kind)) + "' needs at least " +
                          std::to_string(spec.min_ensemble()) + " estimates, got " + std::to_string(r));
    }
    const std::size_t d = ensemble.dim();
    if (spec.kind == MetricKind::marginal_ci) {
        const double alpha = 1.0 - spec.coverage;
        std::vector<double> lower(d), upper(d);
        for (std::size_t i = 0; i < d; ++i) {
            auto column = ensemble.coordinate(i);
            std::sort(column.begin(), column.end());
            lower[i] = interpolated_quantile(column, alpha / 2.0);
            upper[i] = interpolated_quantile(column, 1.0 - alpha / 2.0);
        }
        return QualitySummary::intervals(std::move(lower), std::move(upper), spec.coverage);
    }
    std::vector<double> sd(d);
    for (std::size_t i = 0; i < d; ++i) {
        const auto column = ensemble.coordinate(i);
        const double mean = std::accumulate(column.begin(), column.end(), 0.0) / static_cast<double>(r);
        double ss = 0.0;
        for (double v : column) ss += (v - mean) * (v - mean);
        sd[i] = std::sqrt(ss / static_cast<double>(r - 1));
    }
    return QualitySummary::scalars(std::move(sd));
}

QualitySummary average(std::span<const QualitySummary> summaries) {
    if (summaries.empty()) throw ShapeError("cannot average an empty list of summaries");
    const QualitySummary& head = summaries.front();
    for (const auto& s : summaries) {
        if (!s.same_shape(head)) throw ShapeError("summaries differ in kind, dimension or coverage");
    }
    if (summaries.size() == 1) return head;
    // Incremental means reproduce identical inputs exactly.
    const std::size_t d = head.dim();
    const bool intervals = head.kind() == SummaryKind::interval_set;
    std::vector<double> first(d, 0.0), second(intervals ? d : 0, 0.0);
    for (std::size_t k = 0; k < summaries.size(); ++k) {
        const auto& s = summaries[k];
        const double inv = 1.0 / static_cast<double>(k + 1);
        const auto& a = intervals ? s.lower() : s.values();
        for (std::size_t i = 0; i < d; ++i) first[i] += (a[i] - first[i]) * inv;
        if (intervals) {
            for (std::size_t i = 0; i < d; ++i) second[i] += (s.upper()[i] - second[i]) * inv;
        }
    }
    if (!intervals) return QualitySummary::scalars(std::move(first));
    for (std::size_t i = 0; i < d; ++i) {
        // Rounding can invert a zero-width interval by one ulp.
        if (first[i] > second[i]) first[i] = second[i] = 0.5 * (first[i] + second[i]);
    }
    return QualitySummary::intervals(std::move(first), std::move(second), head.coverage());
}

QualitySummary correct_for_size(const QualitySummary& summary,
                                std::size_t b,
                                std::size_t n,
                                double rate_exponent) {
    if (b < 1 || b > n) throw ConfigError("size correction needs 1 <= b <= n");
    if (!(rate_exponent > 0.0)) throw ConfigError("rate exponent must be positive");
    if (b == n) return summary;
    const double factor = std::pow(static_cast<double>(b) / static_cast<double>(n), rate_exponent);
    if (summary.kind() == SummaryKind::interval_set) {
        std::vector<double> lower = summary.lower();
        std::vector<double> upper = summary.upper();
        for (std::size_t i = 0; i < lower.size(); ++i) {
            const double mid = 0.5 * (lower[i] + upper[i]);
            const double half = 0.5 * (upper[i] - lower[i]) * factor;
            lower[i] = mid - half;
            upper[i] = mid + half;
        }
        return QualitySummary::intervals(std::move(lower), std::move(upper), summary.coverage());
    }
    std::vector<double> values = summary.values();
    for (auto& v : values) v *= factor;
    return QualitySummary::scalars(std::move(values));
}

std::vector<double> ci_widths(const QualitySummary& summary) {
    if (summary.kind() != SummaryKind::interval_set) {
        throw ShapeError("interval widths requested for a non-interval summary");
    }
    std::vector<double> widths(summary.dim());
    for (std::size_t i = 0; i < widths.size(); ++i) widths[i] = summary.upper()[i] - summary.lower()[i];
    return widths;
}

double mean_ci_width(const QualitySummary& summary) {
    const auto w = ci_widths(summary);
    return std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
}

std::vector<double> dispersion(const QualitySummary& summary) {
    return summary.kind() == SummaryKind::interval_set ? ci_widths(summary) : summary.values();
}

}  // namespace blb
