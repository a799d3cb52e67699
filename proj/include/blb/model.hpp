// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Domain types shared across the toolkit. Every type checks its invariants in
// its constructor and is immutable afterwards, so values can be shared freely
// between worker threads.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "blb/error.hpp"

namespace blb {

enum class Task { regression, classification };

std::string_view to_string(Task task);
Task parse_task(std::string_view text);

/// The observed sample: n rows of p real features with an optional response.
class DataMatrix {
  public:
    using Features = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    explicit DataMatrix(Features features, std::optional<Eigen::VectorXd> response = std::nullopt);

    /// Builds from ragged input, rejecting rows whose dimension differs from the first.
    static DataMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                std::optional<std::vector<double>> response = std::nullopt);

    std::size_t n() const noexcept { return static_cast<std::size_t>(features_.rows()); }
    std::size_t p() const noexcept { return static_cast<std::size_t>(features_.cols()); }
    bool has_response() const noexcept { return response_.has_value(); }

    const Features& features() const noexcept { return features_; }
    const Eigen::VectorXd& response() const;

    /// Copies the given rows (in the given order) into a new matrix.
    DataMatrix select(std::span<const std::size_t> rows) const;

  private:
    Features features_;
    std::optional<Eigen::VectorXd> response_;
};

/// Throws DataError unless `data` is usable for `task`.
void validate(const DataMatrix& data, Task task);

/// Validates raw rows before a DataMatrix is built from them.
void validate(const std::vector<std::vector<double>>& rows,
              const std::vector<double>* response,
              Task task);

/// b distinct row indices into a dataset of n rows, stored in ascending order.
class IndexSubset {
  public:
    IndexSubset(std::vector<std::size_t> indices, std::size_t n);

    std::span<const std::size_t> indices() const noexcept { return indices_; }
    std::size_t b() const noexcept { return indices_.size(); }
    std::size_t n() const noexcept { return n_; }

  private:
    std::vector<std::size_t> indices_;
    std::size_t n_;
};

enum class WeightKind {
    multinomial,  ///< counts sum to the nominal size exactly
    poisson,      ///< independent counts; nominal size is their realized sum
    unit,         ///< every row once; nominal size is the row count
};

/// A resample stored as distinct rows of a source matrix plus integer counts.
/// Rows with zero count are not stored. The source matrix must outlive the sample.
class WeightedSample {
  public:
    WeightedSample(const DataMatrix& source,
                   std::vector<std::size_t> rows,
                   std::vector<std::uint64_t> weights,
                   std::uint64_t nominal_size,
                   WeightKind kind);

    /// Every row of `source` with weight 1.
    static WeightedSample unit(const DataMatrix& source);

    const DataMatrix& source() const noexcept { return *source_; }
    std::span<const std::size_t> rows() const noexcept { return rows_; }
    std::span<const std::uint64_t> weights() const noexcept { return weights_; }
    std::size_t distinct_rows() const noexcept { return rows_.size(); }
    std::uint64_t nominal_size() const noexcept { return nominal_size_; }
    WeightKind kind() const noexcept { return kind_; }

  private:
    const DataMatrix* source_;
    std::vector<std::size_t> rows_;
    std::vector<std::uint64_t> weights_;
    std::uint64_t nominal_size_;
    WeightKind kind_;
};

/// A finite real vector produced by an estimator.
class EstimateVector {
  public:
    explicit EstimateVector(Eigen::VectorXd values);

    const Eigen::VectorXd& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
    double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

  private:
    Eigen::VectorXd values_;
};

/// r >= 1 estimates of one common dimension.
class EstimateEnsemble {
  public:
    explicit EstimateEnsemble(std::vector<EstimateVector> estimates);

    std::size_t r() const noexcept { return estimates_.size(); }
    std::size_t dim() const noexcept { return estimates_.front().size(); }
    const std::vector<EstimateVector>& estimates() const noexcept { return estimates_; }

    /// The i-th coordinate of every estimate.
    std::vector<double> coordinate(std::size_t i) const;

  private:
    std::vector<EstimateVector> estimates_;
};

enum class SummaryKind { interval_set, scalar_per_dim };

/// Output of the quality functional: per-dimension intervals or scalars.
class QualitySummary {
  public:
    static constexpr double default_coverage = 0.95;

    static QualitySummary intervals(std::vector<double> lower,
                                    std::vector<double> upper,
                                    double coverage = default_coverage);
    static QualitySummary scalars(std::vector<double> values);

    SummaryKind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return first_.size(); }

    /// Interval lower bounds; throws ShapeError for scalar summaries.
    const std::vector<double>& lower() const;
    const std::vector<double>& upper() const;
    double coverage() const;
    const std::vector<double>& values() const;

    /// Same kind, dimension and (for intervals) coverage.
    bool same_shape(const QualitySummary& other) const noexcept;

    /// Lower bounds then upper bounds for intervals; the values for scalars.
    std::vector<double> flatten() const;

    bool operator==(const QualitySummary& other) const = default;

  private:
    QualitySummary(SummaryKind kind, std::vector<double> first, std::vector<double> second,
                   double coverage);

    SummaryKind kind_;
    std::vector<double> first_;
    std::vector<double> second_;
    double coverage_;
};

enum class ResampleFlavor { multinomial, poisson };
enum class SubsampleMode { uniform_without_replacement, disjoint_partition };

std::string_view to_string(ResampleFlavor flavor);
std::string_view to_string(SubsampleMode mode);

/// Stopping thresholds for adaptive selection of r and s.
struct AdaptiveParams {
    double epsilon_r = 0.05;
    std::size_t window_r = 20;
    double epsilon_s = 0.05;
    std::size_t window_s = 3;
    std::size_t r_max = 500;
    std::size_t s_max = 50;

    /// Throws ConfigError. A zero epsilon is accepted and means "exactly stable".
    void validate() const;
};

struct ProcedureConfig {
    /// Subset size as an exponent, b = floor(n^gamma). Ignored when `b` is set.
    std::optional<double> gamma = 0.7;
    std::optional<std::size_t> b;
    std::size_t s = 5;
    std::size_t r = 100;
    std::uint64_t seed = 0;
    ResampleFlavor flavor = ResampleFlavor::multinomial;
    SubsampleMode subsample_mode = SubsampleMode::uniform_without_replacement;
    std::optional<AdaptiveParams> adaptive;
    double rate_exponent = 0.5;
    /// Parallel workers; 0 picks the hardware concurrency. Never affects results.
    unsigned workers = 1;

    /// Resolved subset size for a dataset of n rows; throws ConfigError if out of range.
    std::size_t subset_size(std::size_t n) const;

    /// Checks everything that does not depend on n.
    void validate() const;
    void validate(std::size_t n) const;
};

/// floor(n^gamma) clamped to [1, n].
std::size_t subset_size_for(std::size_t n, double gamma);

}  // namespace blb
