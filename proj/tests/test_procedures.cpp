#include <cmath>
#include <set>

#include "blb/error.hpp"
#include "blb/procedures.hpp"
#include "blb/rng.hpp"
#include "doctest.h"

using namespace blb;

namespace {

constexpr double kAnalyticWidth = 2.0 * 1.959963984540054 / 100.0;

DataMatrix gaussian(std::size_t n, std::uint64_t seed) {
    RngStream rng(seed, StreamTag::test);
    DataMatrix::Features x(static_cast<Eigen::Index>(n), 1);
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 0) = rng.normal();
    return DataMatrix(std::move(x));
}

DataMatrix classification(std::size_t n, std::uint64_t seed) {
    RngStream rng(seed, StreamTag::test);
    DataMatrix::Features x(static_cast<Eigen::Index>(n), 3);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = rng.normal();
        x(i, 2) = rng.normal();
        const double eta = 0.3 + 0.8 * x(i, 1) - 0.5 * x(i, 2);
        y[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
    }
    return DataMatrix(std::move(x), std::move(y));
}

ProcedureConfig config(double gamma, std::size_t s, std::size_t r, std::uint64_t seed) {
    ProcedureConfig c;
    c.gamma = gamma;
    c.s = s;
    c.r = r;
    c.seed = seed;
    return c;
}

constexpr Method kMethods[] = {Method::blb, Method::bootstrap, Method::bofn, Method::subsampling};

}  // namespace

TEST_CASE("method names") {
    for (Method m : kMethods) CHECK(parse_method(to_string(m)) == m);
    CHECK_THROWS_AS(parse_method("jackknife"), ConfigError);
}

TEST_CASE("Gaussian mean: widths match the analytic sampling distribution") {
    const DataMatrix data = gaussian(10000, 1);
    const auto blb = run_blb(data, EstimatorSpec{}, MetricSpec{}, config(0.7, 5, 100, 2));
    CHECK(mean_ci_width(blb.summary) == doctest::Approx(kAnalyticWidth).epsilon(0.10));
    const auto boot = run_bootstrap(data, EstimatorSpec{}, MetricSpec{}, config(0.7, 5, 100, 3));
    CHECK(mean_ci_width(boot.summary) == doctest::Approx(kAnalyticWidth).epsilon(0.10));
    const auto bofn = run_bofn(data, EstimatorSpec{}, MetricSpec{}, config(0.5, 1, 100, 4));
    CHECK(mean_ci_width(bofn.summary) == doctest::Approx(kAnalyticWidth).epsilon(0.15));
    const auto sub = run_subsampling(data, EstimatorSpec{}, MetricSpec{}, config(0.5, 1, 100, 5));
    CHECK(mean_ci_width(sub.summary) == doctest::Approx(kAnalyticWidth).epsilon(0.15));
}

TEST_CASE("b out of n correction rescales by (b/n)^rate") {
    const DataMatrix data = gaussian(10000, 6);
    ProcedureConfig c = config(0.5, 1, 100, 7);
    const auto corrected = run_bofn(data, EstimatorSpec{}, MetricSpec{}, c);
    c.rate_exponent = 1.0;
    const auto squared = run_bofn(data, EstimatorSpec{}, MetricSpec{}, c);
    // Same draws, so only the factor (b/n)^rate differs: 0.1 versus 0.01.
    CHECK(mean_ci_width(corrected.summary) ==
          doctest::Approx(10.0 * mean_ci_width(squared.summary)).epsilon(1e-12));
}

TEST_CASE("degenerate cases") {
    const DataMatrix data = gaussian(50, 8);
    SUBCASE("bootstrap with r = 1 collapses to a point") {
        const auto res = run_bootstrap(data, EstimatorSpec{}, MetricSpec{}, config(0.7, 1, 1, 1));
        CHECK(res.summary.lower() == res.summary.upper());
        CHECK(res.trajectory.size() == 1);
    }
    SUBCASE("BLB with r = 1 collapses each subsample to a point") {
        const auto res = run_blb(data, EstimatorSpec{}, MetricSpec{}, config(0.7, 3, 1, 1));
        CHECK(res.summary.lower() == res.summary.upper());
    }
    SUBCASE("subsampling with b = n draws the full data every time") {
        ProcedureConfig c = config(1.0, 1, 20, 1);
        const auto res = run_subsampling(data, EstimatorSpec{}, MetricSpec{}, c);
        CHECK(res.summary.lower()[0] == doctest::Approx(res.summary.upper()[0]).epsilon(1e-13));
    }
    SUBCASE("constant data gives zero width at b = n") {
        const DataMatrix flat(DataMatrix::Features::Constant(40, 2, 1.25));
        for (Method m : kMethods) {
            const auto res = run_procedure(m, flat, EstimatorSpec{}, MetricSpec{}, config(1.0, 1, 10, 1));
            CHECK(res.summary.lower() == std::vector<double>{1.25, 1.25});
            CHECK(res.summary.upper() == std::vector<double>{1.25, 1.25});
        }
    }
    SUBCASE("stderr needs two resamples") {
        CHECK_THROWS_AS(run_blb(data, EstimatorSpec{}, MetricSpec{MetricKind::stderr_per_dim, 0.95},
                                config(0.7, 2, 1, 1)),
                        ConfigError);
    }
}

TEST_CASE("every driver is bit-exact across worker counts") {
    const DataMatrix data = classification(1500, 9);
    EstimatorSpec logistic;
    logistic.kind = EstimatorKind::logistic_newton;
    logistic.ridge_lambda = 1e-3;
    for (Method m : kMethods) {
        for (auto flavor : {ResampleFlavor::multinomial, ResampleFlavor::poisson}) {
            ProcedureConfig c = config(0.7, 4, 12, 21);
            c.flavor = flavor;
            c.workers = 1;
            const auto base = run_procedure(m, data, logistic, MetricSpec{}, c);
            for (unsigned w : {2u, 8u}) {
                c.workers = w;
                const auto other = run_procedure(m, data, logistic, MetricSpec{}, c);
                CHECK(other.summary == base.summary);
                REQUIRE(other.trajectory.size() == base.trajectory.size());
                for (std::size_t i = 0; i < base.trajectory.size(); ++i) {
                    CHECK(other.trajectory.steps()[i].summary == base.trajectory.steps()[i].summary);
                    CHECK(other.trajectory.steps()[i].work_unit == base.trajectory.steps()[i].work_unit);
                }
            }
        }
    }
}

TEST_CASE("trajectories") {
    const DataMatrix data = gaussian(2000, 10);
    const auto blb = run_blb(data, EstimatorSpec{}, MetricSpec{}, config(0.7, 6, 30, 1));
    CHECK(blb.trajectory.size() == 6);
    const auto boot = run_bootstrap(data, EstimatorSpec{}, MetricSpec{MetricKind::stderr_per_dim, 0.95},
                                    config(0.7, 6, 30, 1));
    CHECK(boot.trajectory.size() == 29);
    for (const auto* res : {&blb, &boot}) {
        CHECK(res->trajectory.steps().back().summary == res->summary);
        for (std::size_t i = 1; i < res->trajectory.size(); ++i) {
            CHECK(res->trajectory.steps()[i].elapsed_seconds >= res->trajectory.steps()[i - 1].elapsed_seconds);
            CHECK(res->trajectory.steps()[i].summary.kind() == res->summary.kind());
        }
    }
}

TEST_CASE("BLB averages independently recomputed subsample summaries") {
    const DataMatrix data = gaussian(3000, 11);
    for (auto mode : {SubsampleMode::uniform_without_replacement, SubsampleMode::disjoint_partition}) {
        ProcedureConfig c = config(0.6, 5, 25, 12);
        c.subsample_mode = mode;
        const auto res = run_blb(data, EstimatorSpec{}, MetricSpec{}, c);
        std::vector<QualitySummary> parts;
        for (std::size_t j = 0; j < c.s; ++j) {
            parts.push_back(blb_detail::subsample_summary(data, EstimatorSpec{}, MetricSpec{}, c, j));
        }
        CHECK(average(parts) == res.summary);
    }
}

TEST_CASE("per-subsample width matches the closed form for the mean") {
    const DataMatrix data = gaussian(20000, 13);
    ProcedureConfig c = config(0.7, 1, 4000, 14);
    const auto res = run_blb(data, EstimatorSpec{}, MetricSpec{}, c);
    const auto subset = std::move(blb_detail::subsets(data.n(), c.subset_size(data.n()), c, 1).front());
    double sum = 0.0, sq = 0.0;
    for (std::size_t i : subset.indices()) {
        const double v = data.features()(static_cast<Eigen::Index>(i), 0);
        sum += v;
        sq += v * v;
    }
    const double b = static_cast<double>(subset.indices().size());
    const double sd = std::sqrt(sq / b - (sum / b) * (sum / b));
    const double expected = 2.0 * 1.959963984540054 * sd / std::sqrt(20000.0);
    CHECK(mean_ci_width(res.summary) == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("resident rows stay within the subset size") {
    const DataMatrix data = gaussian(20000, 15);
    for (auto flavor : {ResampleFlavor::multinomial, ResampleFlavor::poisson}) {
        ProcedureConfig c = config(0.7, 4, 250, 16);
        c.flavor = flavor;
        c.workers = 2;
        const auto res = run_blb(data, EstimatorSpec{}, MetricSpec{}, c);
        CHECK(res.stats.estimates_computed == 1000);
        CHECK(res.stats.max_distinct_rows <= 1024);
        CHECK(res.stats.max_resident_rows <= 1024);
    }
}

TEST_CASE("subsampling draws exactly b distinct rows") {
    const DataMatrix data = gaussian(500, 17);
    const auto res = run_subsampling(data, EstimatorSpec{}, MetricSpec{}, config(0.7, 1, 20, 1));
    CHECK(res.stats.max_distinct_rows == subset_size_for(500, 0.7));
}

TEST_CASE("estimator failures are reported with their work unit") {
    // Perfectly separated labels: unpenalized logistic regression diverges.
    DataMatrix::Features x(40, 2);
    Eigen::VectorXd y(40);
    for (Eigen::Index i = 0; i < 40; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = static_cast<double>(i) - 19.5;
        y[i] = i >= 20 ? 1.0 : 0.0;
    }
    const DataMatrix data(std::move(x), std::move(y));
    EstimatorSpec logistic;
    logistic.kind = EstimatorKind::logistic_newton;
    try {
        run_blb(data, logistic, MetricSpec{}, config(1.0, 1, 3, 1));
        FAIL("expected a ProcedureError");
    } catch (const ProcedureError& e) {
        CHECK(e.subsample() == 0);
        CHECK(e.resample() < 3);
    }
    try {
        run_bootstrap(data, logistic, MetricSpec{}, config(1.0, 1, 3, 1));
        FAIL("expected a ProcedureError");
    } catch (const ProcedureError& e) {
        CHECK(e.subsample() == ProcedureError::npos);
    }
}

TEST_CASE("input validation") {
    const DataMatrix data = gaussian(100, 18);
    EstimatorSpec ols;
    ols.kind = EstimatorKind::least_squares;
    CHECK_THROWS_AS(run_blb(data, ols, MetricSpec{}, config(0.7, 2, 5, 1)), DataError);
    ProcedureConfig c = config(0.7, 2, 5, 1);
    c.s = 0;
    CHECK_THROWS_AS(run_blb(data, EstimatorSpec{}, MetricSpec{}, c), ConfigError);
    c = config(0.7, 2, 5, 1);
    c.b = 101;
    c.gamma.reset();
    CHECK_THROWS_AS(run_bofn(data, EstimatorSpec{}, MetricSpec{}, c), ConfigError);
    c = config(0.5, 11, 5, 1);
    c.subsample_mode = SubsampleMode::disjoint_partition;
    CHECK_THROWS_AS(run_blb(data, EstimatorSpec{}, MetricSpec{}, c), ConfigError);
}
