#include "blb/adaptive.hpp"
#include "blb/error.hpp"
#include "blb/rng.hpp"
#include "doctest.h"

using namespace blb;

namespace {

SummarySeries series1(std::initializer_list<double> xs) {
    SummarySeries s;
    for (double x : xs) s.push({x});
    return s;
}

DataMatrix constant_rows(std::size_t n, double value) {
    return DataMatrix(DataMatrix::Features::Constant(static_cast<Eigen::Index>(n), 2, value));
}

DataMatrix normal_rows(std::size_t n, std::uint64_t seed) {
    RngStream rng(seed, StreamTag::test);
    DataMatrix::Features x(static_cast<Eigen::Index>(n), 2);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        x(i, 0) = rng.normal();
        x(i, 1) = 1.0 + 2.0 * rng.normal();
    }
    return DataMatrix(std::move(x));
}

}  // namespace

TEST_CASE("hand-computed convergence checks") {
    CHECK(has_converged(series1({2.0, 2.0, 2.0, 2.0}), 3, 0.05));
    CHECK(has_converged(series1({1.0, 1.04, 1.0}), 2, 0.05));
    CHECK_FALSE(has_converged(series1({1.0, 1.2, 1.0}), 2, 0.05));
    CHECK_FALSE(has_converged(series1({2.0, 2.0, 2.0}), 3, 0.05));
    CHECK_THROWS_AS(has_converged(series1({1.0}), 0, 0.05), ConfigError);
    CHECK_THROWS_AS(has_converged(series1({1.0}), 1, -0.1), ConfigError);
}

TEST_CASE("series entries share one dimension") {
    SummarySeries s;
    s.push({1.0, 2.0});
    CHECK_THROWS_AS(s.push({1.0}), ShapeError);
}

TEST_CASE("convergence is monotone in epsilon") {
    RngStream rng(6, StreamTag::test);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t d = 1 + rng.below(4);
        const std::size_t len = 1 + rng.below(12);
        SummarySeries s;
        for (std::size_t k = 0; k < len; ++k) {
            std::vector<double> z(d);
            for (double& v : z) v = 1.0 + 0.1 * rng.normal();
            s.push(z);
        }
        const std::size_t w = 1 + rng.below(6);
        const double e1 = 0.2 * rng.uniform();
        const double e2 = e1 + 0.2 * rng.uniform();
        if (has_converged(s, w, e1)) CHECK(has_converged(s, w, e2));
        CHECK(has_converged(s, w, 1e9) == (len > w));
    }
}

TEST_CASE("convergence is scale-equivariant") {
    RngStream rng(7, StreamTag::test);
    for (int t = 0; t < 500; ++t) {
        SummarySeries a, b;
        const double c = rng.uniform() < 0.5 ? -3.5 : 0.125;
        for (int k = 0; k < 8; ++k) {
            const std::vector<double> z{1.0 + 0.05 * rng.normal(), 2.0 + 0.05 * rng.normal()};
            a.push(z);
            b.push({c * z[0], c * z[1]});
        }
        const double eps = 0.1 * rng.uniform();
        CHECK(has_converged(a, 4, eps) == has_converged(b, 4, eps));
    }
}

TEST_CASE("constant estimates stop at the first opportunity") {
    const DataMatrix data = constant_rows(400, 3.0);
    ProcedureConfig c;
    c.gamma = 0.7;
    c.adaptive = AdaptiveParams{};
    for (unsigned workers : {1u, 3u}) {
        c.workers = workers;
        const AdaptiveResult res = run_blb_adaptive(data, EstimatorSpec{}, MetricSpec{}, c);
        CHECK(res.selection.s == 4);
        CHECK(res.selection.s_stop == StopReason::converged);
        for (std::size_t r : res.selection.r_per_subsample) CHECK(r == 21);
        CHECK(res.selection.resamples_used() == 84);
        CHECK(res.trajectory.size() == 4);
    }
}

TEST_CASE("shipped defaults") {
    const AdaptiveParams p;
    CHECK(p.epsilon_r == 0.05);
    CHECK(p.window_r == 20);
    CHECK(p.epsilon_s == 0.05);
    CHECK(p.window_s == 3);
}

TEST_CASE("epsilon zero with caps r and s reproduces the fixed driver") {
    const DataMatrix data = normal_rows(3000, 11);
    for (auto metric : {MetricSpec{}, MetricSpec{MetricKind::stderr_per_dim, 0.95}}) {
        for (auto mode : {SubsampleMode::uniform_without_replacement, SubsampleMode::disjoint_partition}) {
            ProcedureConfig c;
            c.gamma = 0.6;
            c.s = 4;
            c.r = 30;
            c.seed = 99;
            c.subsample_mode = mode;
            const ProcedureResult fixed = run_blb(data, EstimatorSpec{}, metric, c);
            c.adaptive = AdaptiveParams{0.0, 20, 0.0, 3, 30, 4};
            const AdaptiveResult adaptive = run_blb_adaptive(data, EstimatorSpec{}, metric, c);
            CHECK(adaptive.summary == fixed.summary);
            CHECK(adaptive.selection.s == 4);
            CHECK(adaptive.selection.s_stop == StopReason::cap_reached);
            for (std::size_t r : adaptive.selection.r_per_subsample) CHECK(r == 30);
            REQUIRE(adaptive.trajectory.size() == fixed.trajectory.size());
            for (std::size_t j = 0; j < fixed.trajectory.size(); ++j) {
                CHECK(adaptive.trajectory.steps()[j].summary == fixed.trajectory.steps()[j].summary);
            }
        }
    }
}

TEST_CASE("selected r lies between window + 1 and the cap") {
    const DataMatrix data = normal_rows(5000, 12);
    ProcedureConfig c;
    c.seed = 5;
    c.adaptive = AdaptiveParams{};
    c.adaptive->r_max = 60;
    for (auto metric : {MetricSpec{}, MetricSpec{MetricKind::stderr_per_dim, 0.95}}) {
        const AdaptiveResult res = run_blb_adaptive(data, EstimatorSpec{}, metric, c);
        for (std::size_t j = 0; j < res.selection.r_per_subsample.size(); ++j) {
            const std::size_t r = res.selection.r_per_subsample[j];
            CHECK(r >= c.adaptive->window_r + 1);
            CHECK(r <= 60);
            CHECK((res.selection.r_stop[j] == StopReason::cap_reached) == (r == 60));
        }
        CHECK(res.selection.resamples_computed >= res.selection.resamples_used());
    }
}

TEST_CASE("adaptive results do not depend on the worker count") {
    const DataMatrix data = normal_rows(4000, 13);
    ProcedureConfig c;
    c.seed = 8;
    c.adaptive = AdaptiveParams{};
    c.workers = 1;
    const AdaptiveResult a = run_blb_adaptive(data, EstimatorSpec{}, MetricSpec{}, c);
    for (unsigned w : {2u, 8u}) {
        c.workers = w;
        const AdaptiveResult b = run_blb_adaptive(data, EstimatorSpec{}, MetricSpec{}, c);
        CHECK(a.summary == b.summary);
        CHECK(a.selection.r_per_subsample == b.selection.r_per_subsample);
    }
}

TEST_CASE("partition mode caps s at n / b") {
    const DataMatrix data = normal_rows(100, 14);
    ProcedureConfig c;
    c.b = 40;
    c.gamma.reset();
    c.subsample_mode = SubsampleMode::disjoint_partition;
    c.adaptive = AdaptiveParams{};
    const AdaptiveResult res = run_blb_adaptive(data, EstimatorSpec{}, MetricSpec{}, c);
    CHECK(res.selection.s == 2);
    CHECK(res.selection.s_stop == StopReason::cap_reached);
}
