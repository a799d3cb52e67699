#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "blb/error.hpp"
#include "blb/resample.hpp"
#include "doctest.h"

using namespace blb;

TEST_CASE("draw_subset edge cases") {
    RngStream rng(1, StreamTag::test);
    const IndexSubset all = draw_subset(5, 5, rng);
    CHECK(std::vector<std::size_t>(all.indices().begin(), all.indices().end()) ==
          std::vector<std::size_t>{0, 1, 2, 3, 4});
    const IndexSubset three = draw_subset(10, 3, rng);
    CHECK(three.b() == 3);
    CHECK(std::set<std::size_t>(three.indices().begin(), three.indices().end()).size() == 3);
    CHECK(three.indices().back() < 10);
    CHECK_THROWS_AS(draw_subset(5, 6, rng), ConfigError);
    CHECK_THROWS_AS(draw_subset(5, 0, rng), ConfigError);
}

TEST_CASE("draw_subset inclusion frequency is b/n") {
    for (std::size_t b : {3, 7}) {  // Floyd and partial shuffle paths
        RngStream rng(2, StreamTag::test, {b});
        std::vector<int> hits(10, 0);
        const int trials = 100000;
        for (int t = 0; t < trials; ++t) {
            const IndexSubset s = draw_subset(10, b, rng);
            for (auto i : s.indices()) ++hits[i];
        }
        const double p = b / 10.0;
        const double sigma = std::sqrt(p * (1 - p) / trials);
        for (int h : hits) {
            CHECK(std::abs(h / double(trials) - p) < std::min(0.01, 3 * sigma) + 1e-12);
        }
    }
}

TEST_CASE("draw_partition") {
    RngStream rng(3, StreamTag::test);
    auto six = draw_partition(6, 2, rng);
    CHECK(six.size() == 3);
    std::set<std::size_t> seen;
    for (const auto& s : six) seen.insert(s.indices().begin(), s.indices().end());
    CHECK(seen.size() == 6);

    auto seven = draw_partition(7, 2, rng);
    CHECK(seven.size() == 3);
    seen.clear();
    for (const auto& s : seven) seen.insert(s.indices().begin(), s.indices().end());
    CHECK(seen.size() == 6);

    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng.below(200);
        const std::size_t b = 1 + rng.below(n);
        auto parts = draw_partition(n, b, rng);
        CHECK(parts.size() == n / b);
        std::size_t total = 0;
        seen.clear();
        for (const auto& s : parts) {
            CHECK(s.b() == b);
            total += s.b();
            seen.insert(s.indices().begin(), s.indices().end());
        }
        CHECK(seen.size() == total);
    }
}

TEST_CASE("multinomial counts") {
    RngStream rng(4, StreamTag::test);
    CHECK(draw_multinomial_counts(100, 1, rng) == std::vector<std::uint64_t>{100});
    for (int t = 0; t < 20; ++t) {
        auto c = draw_multinomial_counts(20000, 1024, rng);
        CHECK(c.size() == 1024);
        CHECK(std::accumulate(c.begin(), c.end(), std::uint64_t{0}) == 20000);
    }
    double sum = 0, sq = 0;
    const int draws = 50000;
    for (int t = 0; t < draws; ++t) {
        auto c = draw_multinomial_counts(100, 4, rng);
        CHECK(std::accumulate(c.begin(), c.end(), std::uint64_t{0}) == 100);
        sum += c[0];
        sq += double(c[0]) * c[0];
    }
    const double mean = sum / draws;
    CHECK(std::abs(mean - 25.0) < 0.5);
    CHECK(std::abs(sq / draws - mean * mean - 18.75) < 1.0);
}

TEST_CASE("poisson counts") {
    RngStream rng(5, StreamTag::test);
    const int draws = 50000;
    std::size_t zeros = 0, total = 0;
    for (int t = 0; t < draws / 10; ++t) {
        for (auto c : draw_poisson_counts(10, 10, rng)) {
            zeros += c == 0;
            ++total;
        }
    }
    // 5,000 draws of 10 counts = 50,000 rate-1 counts.
    CHECK(std::abs(double(zeros) / double(total) - std::exp(-1.0)) < 0.005);

    std::vector<double> means(4, 0.0);
    for (int t = 0; t < draws; ++t) {
        auto c = draw_poisson_counts(100, 4, rng);
        for (int i = 0; i < 4; ++i) means[i] += double(c[i]) / draws;
    }
    for (double m : means) CHECK(std::abs(m - 25.0) < 0.5);
}

TEST_CASE("resample_weighted over a subset") {
    const DataMatrix data = DataMatrix::from_rows({{1}, {2}, {3}, {4}, {5}});
    RngStream rng(6, StreamTag::test);
    const IndexSubset single({3}, 5);
    const WeightedSample w = resample_weighted(data, single, 50, ResampleFlavor::multinomial, rng);
    CHECK(w.distinct_rows() == 1);
    CHECK(w.rows()[0] == 3);
    CHECK(w.weights()[0] == 50);

    const DataMatrix big = DataMatrix::from_rows(std::vector<std::vector<double>>(20000, {1.0}));
    RngStream sub_rng(7, StreamTag::test);
    for (int t = 0; t < 1000; ++t) {
        const IndexSubset s = draw_subset(20000, 1024, sub_rng);
        const WeightedSample r = resample_weighted(big, s, 20000, ResampleFlavor::multinomial, rng);
        CHECK(r.distinct_rows() <= 1024);
        const auto ws = r.weights();
        CHECK(std::accumulate(ws.begin(), ws.end(), std::uint64_t{0}) == 20000);
        for (auto row : r.rows()) CHECK(std::binary_search(s.indices().begin(), s.indices().end(), row));
    }
}

TEST_CASE("classical bootstrap resample") {
    const DataMatrix one = DataMatrix::from_rows({{7.0}});
    RngStream rng(8, StreamTag::test);
    const WeightedSample w = resample_classical(one, rng);
    CHECK(w.distinct_rows() == 1);
    CHECK(w.weights()[0] == 1);

    const DataMatrix data = DataMatrix::from_rows(std::vector<std::vector<double>>(10000, {0.0}));
    double fraction = 0.0;
    for (int t = 0; t < 200; ++t) {
        const WeightedSample r = resample_classical(data, rng);
        const auto ws = r.weights();
        CHECK(std::accumulate(ws.begin(), ws.end(), std::uint64_t{0}) == 10000);
        fraction += double(r.distinct_rows()) / 10000.0 / 200.0;
    }
    CHECK(std::abs(fraction - (1.0 - std::exp(-1.0))) < 0.01);
}

TEST_CASE("draws are reproducible from the stream labels") {
    const DataMatrix data = DataMatrix::from_rows(std::vector<std::vector<double>>(500, {0.0}));
    auto draw = [&] {
        RngStream a(42, StreamTag::subsample, {3});
        RngStream b(42, StreamTag::resample, {0, 3, 9});
        const IndexSubset s = draw_subset(500, 40, a);
        const WeightedSample w = resample_weighted(data, s, 500, ResampleFlavor::multinomial, b);
        return std::pair(std::vector<std::size_t>(w.rows().begin(), w.rows().end()),
                         std::vector<std::uint64_t>(w.weights().begin(), w.weights().end()));
    };
    CHECK(draw() == draw());
}
