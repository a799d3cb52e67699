#include <algorithm>
#include <cmath>
#include <numeric>

#include "blb/error.hpp"
#include "blb/metrics.hpp"
#include "blb/rng.hpp"
#include "doctest.h"

using namespace blb;

namespace {

EstimateEnsemble scalar_ensemble(const std::vector<double>& xs) {
    std::vector<EstimateVector> v;
    for (double x : xs) v.emplace_back(Eigen::VectorXd::Constant(1, x));
    return EstimateEnsemble(std::move(v));
}

EstimateEnsemble random_ensemble(RngStream& rng, std::size_t r, std::size_t d) {
    std::vector<EstimateVector> v;
    for (std::size_t k = 0; k < r; ++k) {
        Eigen::VectorXd e(d);
        for (std::size_t i = 0; i < d; ++i) e[i] = rng.normal() * (1.0 + i);
        v.emplace_back(e);
    }
    return EstimateEnsemble(std::move(v));
}

}  // namespace

TEST_CASE("identical estimates give zero-width intervals") {
    std::vector<EstimateVector> v(7, EstimateVector(Eigen::Vector2d(1.5, -2.0)));
    const auto s = summarize(MetricSpec{}, EstimateEnsemble(v));
    CHECK(s.lower() == std::vector<double>{1.5, -2.0});
    CHECK(s.upper() == std::vector<double>{1.5, -2.0});
}

TEST_CASE("standard error by hand") {
    const auto s = summarize(MetricSpec{MetricKind::stderr_per_dim, 0.95}, scalar_ensemble({1, 2, 3}));
    CHECK(s.values()[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(summarize(MetricSpec{MetricKind::stderr_per_dim, 0.95}, scalar_ensemble({1})), ConfigError);
}

TEST_CASE("interpolated percentile interval of 1..100") {
    std::vector<double> xs(100);
    std::iota(xs.begin(), xs.end(), 1.0);
    std::reverse(xs.begin(), xs.end());
    const auto s = summarize(MetricSpec{}, scalar_ensemble(xs));
    CHECK(s.lower()[0] == doctest::Approx(3.475).epsilon(1e-12));
    CHECK(s.upper()[0] == doctest::Approx(97.525).epsilon(1e-12));
    CHECK(s.coverage() == 0.95);
}

TEST_CASE("interpolated_quantile matches numpy's default rule") {
    // Reference values from numpy.quantile(x, p) with the linear method.
    const std::vector<double> x{-1.5, 0.25, 0.75, 2.0, 9.0};
    CHECK(interpolated_quantile(x, 0.0) == -1.5);
    CHECK(interpolated_quantile(x, 1.0) == 9.0);
    CHECK(interpolated_quantile(x, 0.1) == doctest::Approx(-0.8));
    CHECK(interpolated_quantile(x, 0.5) == doctest::Approx(0.75));
    CHECK(interpolated_quantile(x, 0.9) == doctest::Approx(6.2));
    CHECK(interpolated_quantile(std::vector<double>{4.0}, 0.3) == 4.0);
}

TEST_CASE("bounds are monotone in coverage and lie within the data range") {
    RngStream rng(1, StreamTag::test);
    for (int t = 0; t < 100; ++t) {
        const auto e = random_ensemble(rng, 1 + rng.below(60), 3);
        const auto narrow = summarize(MetricSpec{MetricKind::marginal_ci, 0.5 + 0.4 * rng.uniform()}, e);
        const auto wide = summarize(MetricSpec{MetricKind::marginal_ci, narrow.coverage() + 0.09 * rng.uniform()}, e);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(wide.lower()[i] <= narrow.lower()[i]);
            CHECK(wide.upper()[i] >= narrow.upper()[i]);
            const auto c = e.coordinate(i);
            const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
            CHECK(wide.lower()[i] >= *lo);
            CHECK(wide.upper()[i] <= *hi);
        }
    }
}

TEST_CASE("average") {
    const auto a = QualitySummary::intervals({0.0}, {2.0});
    const auto b = QualitySummary::intervals({1.0}, {3.0});
    CHECK(average(std::vector{a}) == a);
    const auto m = average(std::vector{a, b});
    CHECK(m.lower()[0] == 0.5);
    CHECK(m.upper()[0] == 2.5);
    CHECK_THROWS_AS(average(std::vector<QualitySummary>{}), ShapeError);
    CHECK_THROWS_AS(average(std::vector{a, QualitySummary::scalars({1.0})}), ShapeError);

    RngStream rng(2, StreamTag::test);
    for (int t = 0; t < 50; ++t) {
        const auto s = summarize(MetricSpec{}, random_ensemble(rng, 25, 4));
        const std::size_t k = 1 + rng.below(12);
        CHECK(average(std::vector<QualitySummary>(k, s)) == s);

        std::vector<QualitySummary> list;
        for (int j = 0; j < 5; ++j) list.push_back(summarize(MetricSpec{}, random_ensemble(rng, 25, 4)));
        const auto forward = average(list);
        std::reverse(list.begin(), list.end());
        const auto backward = average(list);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(forward.lower()[i] == doctest::Approx(backward.lower()[i]).epsilon(1e-14));
            CHECK(forward.upper()[i] == doctest::Approx(backward.upper()[i]).epsilon(1e-14));
        }
    }
}

TEST_CASE("correct_for_size") {
    const auto ci = QualitySummary::intervals({-1.0}, {3.0});
    CHECK(correct_for_size(ci, 10, 10, 0.5) == ci);
    const auto c = correct_for_size(ci, 25, 100, 0.5);
    CHECK(c.lower()[0] == 0.0);
    CHECK(c.upper()[0] == 2.0);
    const auto se = correct_for_size(QualitySummary::scalars({2.0}), 100, 10000, 0.5);
    CHECK(se.values()[0] == doctest::Approx(0.2).epsilon(1e-15));

    RngStream rng(3, StreamTag::test);
    for (int t = 0; t < 100; ++t) {
        const auto s = summarize(MetricSpec{}, random_ensemble(rng, 30, 3));
        const std::size_t n = 10 + rng.below(10000);
        const auto k = correct_for_size(s, 1 + rng.below(n), n, 0.25 + rng.uniform());
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(0.5 * (k.lower()[i] + k.upper()[i]) ==
                  doctest::Approx(0.5 * (s.lower()[i] + s.upper()[i])).epsilon(1e-14).scale(1.0));
            CHECK(k.upper()[i] - k.lower()[i] <= s.upper()[i] - s.lower()[i] + 1e-15);
        }
    }
}

TEST_CASE("widths") {
    const auto ci = QualitySummary::intervals({0.0, 5.0}, {2.0, 5.0});
    CHECK(ci_widths(ci) == std::vector<double>{2.0, 0.0});
    CHECK(mean_ci_width(ci) == 1.0);
    CHECK_THROWS_AS(ci_widths(QualitySummary::scalars({1.0})), ShapeError);
    CHECK(dispersion(QualitySummary::scalars({4.0})) == std::vector<double>{4.0});

    RngStream rng(4, StreamTag::test);
    for (int t = 0; t < 50; ++t) {
        for (double w : ci_widths(summarize(MetricSpec{}, random_ensemble(rng, 1 + rng.below(40), 2)))) {
            CHECK(w >= 0.0);
        }
    }
}

TEST_CASE("metric names and validation") {
    CHECK(parse_metric_kind("ci") == MetricKind::marginal_ci);
    CHECK(parse_metric_kind("stderr") == MetricKind::stderr_per_dim);
    CHECK_THROWS_AS(parse_metric_kind("iqr"), ConfigError);
    CHECK_THROWS_AS((MetricSpec{MetricKind::marginal_ci, 1.0}).validate(), ConfigError);
}
