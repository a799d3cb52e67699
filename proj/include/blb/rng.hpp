// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace blb {

/// Philox4x32-10 block function (Salmon et al., SC 2011).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key) noexcept;

/// Labels that keep the random streams of different consumers apart.
enum class StreamTag : std::uint64_t {
    subsample = 1,
    partition = 2,
    resample = 3,
    dataset = 4,
    truth = 5,
    experiment = 6,
    test = 99,
};

/// A counter-based random stream.
///
/// The key is the master seed and the high half of the counter is a hash of the
/// stream labels, so equal (seed, labels) reproduce the same sequence on any host
/// and in any execution order. Each stream is owned by exactly one task.
///
/// All variate generators are implemented here rather than taken from <random>,
/// whose distributions are implementation-defined.
class RngStream {
  public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, StreamTag tag, std::initializer_list<std::uint64_t> labels = {});

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform on (0, 1).
    double uniform_open() noexcept;
    /// Uniform integer in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept;

    double normal() noexcept;
    double gamma(double shape, double scale = 1.0) noexcept;
    double student_t(double df) noexcept;
    bool bernoulli(double p) noexcept;

    std::uint64_t binomial(std::uint64_t trials, double p) noexcept;
    std::uint64_t poisson(double mean) noexcept;

  private:
    void refill() noexcept;
    std::uint64_t binomial_inversion(std::uint64_t trials, double p) noexcept;
    std::uint64_t binomial_btrs(std::uint64_t trials, double p) noexcept;
    std::uint64_t poisson_ptrs(double mean) noexcept;

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    unsigned used_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// log(k!) for any k.
double log_factorial(std::uint64_t k) noexcept;

}  // namespace blb
