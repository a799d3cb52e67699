// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
#include "blb/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace blb {

std::string_view to_string(Task task) {
    return task == Task::regression ? "regression" : "classification";
}

Task parse_task(std::string_view text) {
    if (text == "regression") return Task::regression;
    if (text == "classification") return Task::classification;
    throw ConfigError("unknown task '" + std::string(text) + "'");
}

std::string_view to_string(ResampleFlavor flavor) {
    return flavor == ResampleFlavor::multinomial ? "multinomial" : "poisson";
}

std::string_view to_string(SubsampleMode mode) {
    return mode == SubsampleMode::uniform_without_replacement ? "uniform" : "partition";
}

// ---------------------------------------------------------------------------
// DataMatrix

DataMatrix::DataMatrix(Features features, std::optional<Eigen::VectorXd> response)
    : features_(std::move(features)), response_(std::move(response)) {
    if (features_.rows() < 1 || features_.cols() < 1) {
        throw DataError(DataError::Kind::empty, "data must have at least one row and one column");
    }
    if (!features_.allFinite()) {
        throw DataError(DataError::Kind::non_finite, "features contain NaN or infinity");
    }
    if (response_) {
        if (response_->size() != features_.rows()) {
            throw DataError(DataError::Kind::dimension_mismatch,
                            "response length " + std::to_string(response_->size()) +
                                " differs from row count " + std::to_string(features_.rows()));
        }
        if (!response_->allFinite()) {
            throw DataError(DataError::Kind::non_finite, "response contains NaN or infinity");
        }
    }
}

DataMatrix DataMatrix::from_rows(const std::vector<std::vector<double>>& rows,
                                 std::optional<std::vector<double>> response) {
    if (rows.empty() || rows.front().empty()) {
        throw DataError(DataError::Kind::empty, "data must have at least one row and one column");
    }
    const std::size_t p = rows.front().size();
    Features x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != p) {
            throw DataError(DataError::Kind::dimension_mismatch,
                            "row " + std::to_string(i) + " has dimension " +
                                std::to_string(rows[i].size()) + ", expected " + std::to_string(p));
        }
        for (std::size_t c = 0; c < p; ++c) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
        }
    }
    std::optional<Eigen::VectorXd> y;
    if (response) {
        y = Eigen::Map<const Eigen::VectorXd>(response->data(),
                                              static_cast<Eigen::Index>(response->size()));
    }
    return DataMatrix(std::move(x), std::move(y));
}

const Eigen::VectorXd& DataMatrix::response() const {
    if (!response_) throw DataError(DataError::Kind::missing_response, "data has no response column");
    return *response_;
}

DataMatrix DataMatrix::select(std::span<const std::size_t> rows) const {
    Features x(static_cast<Eigen::Index>(rows.size()), features_.cols());
    std::optional<Eigen::VectorXd> y;
    if (response_) y.emplace(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t a = 0; a < rows.size(); ++a) {
        const auto src = static_cast<Eigen::Index>(rows[a]);
        const auto dst = static_cast<Eigen::Index>(a);
        x.row(dst) = features_.row(src);
        if (y) (*y)[dst] = (*response_)[src];
    }
    return DataMatrix(std::move(x), std::move(y));
}

void validate(const DataMatrix& data, Task task) {
    if (!data.has_response()) return;
    if (task == Task::classification) {
        const auto& y = data.response();
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            if (y[i] != 0.0 && y[i] != 1.0) {
                throw DataError(DataError::Kind::non_binary_response,
                                "row " + std::to_string(i) + ": response " + std::to_string(y[i]) +
                                    " is not 0 or 1");
            }
        }
    }
}

void validate(const std::vector<std::vector<double>>& rows,
              const std::vector<double>* response,
              Task task) {
    std::optional<std::vector<double>> y;
    if (response) y = *response;
    validate(DataMatrix::from_rows(rows, std::move(y)), task);
}

// ---------------------------------------------------------------------------
// IndexSubset / WeightedSample

IndexSubset::IndexSubset(std::vector<std::size_t> indices, std::size_t n)
    : indices_(std::move(indices)), n_(n) {
    if (indices_.empty()) throw ConfigError("index subset must be nonempty");
    if (indices_.size() > n_) throw ConfigError("index subset larger than the dataset");
    std::sort(indices_.begin(), indices_.end());
    if (indices_.back() >= n_) {
        throw ConfigError("index " + std::to_string(indices_.back()) + " out of range for n = " +
                          std::to_string(n_));
    }
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
        throw ConfigError("index subset contains duplicates");
    }
}

WeightedSample::WeightedSample(const DataMatrix& source,
                               std::vector<std::size_t> rows,
                               std::vector<std::uint64_t> weights,
                               std::uint64_t nominal_size,
                               WeightKind kind)
    : source_(&source),
      rows_(std::move(rows)),
      weights_(std::move(weights)),
      nominal_size_(nominal_size),
      kind_(kind) {
    if (rows_.size() != weights_.size()) {
        throw ConfigError("weighted sample: row and weight counts differ");
    }
    if (rows_.empty()) throw ConfigError("weighted sample has no rows");
    for (std::size_t a = 0; a < rows_.size(); ++a) {
        if (rows_[a] >= source.n()) throw ConfigError("weighted sample row out of range");
        if (a > 0 && rows_[a] <= rows_[a - 1]) {
            throw ConfigError("weighted sample rows must be strictly increasing");
        }
        if (weights_[a] == 0) throw ConfigError("weighted sample stores a zero weight");
    }
    const std::uint64_t total = std::accumulate(weights_.begin(), weights_.end(), std::uint64_t{0});
    switch (kind_) {
        case WeightKind::multinomial:
        case WeightKind::poisson:
            if (total != nominal_size_) {
                throw ConfigError("weighted sample: weights sum to " + std::to_string(total) +
                                  ", nominal size is " + std::to_string(nominal_size_));
            }
            break;
        case WeightKind::unit:
            if (total != rows_.size() || nominal_size_ != rows_.size()) {
                throw ConfigError("unit-weight sample must have every weight equal to 1");
            }
            break;
    }
}

WeightedSample WeightedSample::unit(const DataMatrix& source) {
    std::vector<std::size_t> rows(source.n());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::vector<std::uint64_t> weights(source.n(), 1);
    return WeightedSample(source, std::move(rows), std::move(weights), source.n(), WeightKind::unit);
}

// ---------------------------------------------------------------------------
// Estimates

EstimateVector::EstimateVector(Eigen::VectorXd values) : values_(std::move(values)) {
    if (values_.size() == 0) throw ConfigError("estimate vector must be nonempty");
    if (!values_.allFinite()) {
        throw EstimationError(EstimationError::Reason::non_finite, "estimate contains NaN or infinity");
    }
}

EstimateEnsemble::EstimateEnsemble(std::vector<EstimateVector> estimates)
    : estimates_(std::move(estimates)) {
    if (estimates_.empty()) throw ConfigError("estimate ensemble must contain at least one estimate");
    const std::size_t d = estimates_.front().size();
    for (const auto& e : estimates_) {
        if (e.size() != d) throw ShapeError("estimate ensemble has mixed dimensions");
    }
}

std::vector<double> EstimateEnsemble::coordinate(std::size_t i) const {
    if (i >= dim()) throw ShapeError("coordinate out of range");
    std::vector<double> out;
    out.reserve(estimates_.size());
    for (const auto& e : estimates_) out.push_back(e[i]);
    return out;
}

// ---------------------------------------------------------------------------
// QualitySummary

QualitySummary::QualitySummary(SummaryKind kind,
                               std::vector<double> first,
                               std::vector<double> second,
                               double coverage)
    : kind_(kind), first_(std::move(first)), second_(std::move(second)), coverage_(coverage) {}

QualitySummary QualitySummary::intervals(std::vector<double> lower,
                                         std::vector<double> upper,
                                         double coverage) {
    if (lower.empty() || lower.size() != upper.size()) {
        throw ShapeError("interval bounds must be nonempty and of equal length");
    }
    if (!(coverage > 0.0 && coverage < 1.0)) throw ConfigError("coverage must lie in (0, 1)");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i])) {
            throw ConfigError("interval bounds must be finite");
        }
        if (lower[i] > upper[i]) {
            throw ConfigError("interval " + std::to_string(i) + " has lower > upper");
        }
    }
    return QualitySummary(SummaryKind::interval_set, std::move(lower), std::move(upper), coverage);
}

QualitySummary QualitySummary::scalars(std::vector<double> values) {
    if (values.empty()) throw ShapeError("scalar summary must be nonempty");
    for (double v : values) {
        if (!std::isfinite(v)) throw ConfigError("summary scalars must be finite");
    }
    return QualitySummary(SummaryKind::scalar_per_dim, std::move(values), {}, 0.0);
}

const std::vector<double>& QualitySummary::lower() const {
    if (kind_ != SummaryKind::interval_set) throw ShapeError("summary holds no intervals");
    return first_;
}

const std::vector<double>& QualitySummary::upper() const {
    if (kind_ != SummaryKind::interval_set) throw ShapeError("summary holds no intervals");
    return second_;
}

double QualitySummary::coverage() const {
    if (kind_ != SummaryKind::interval_set) throw ShapeError("summary holds no intervals");
    return coverage_;
}

const std::vector<double>& QualitySummary::values() const {
    if (kind_ != SummaryKind::scalar_per_dim) throw ShapeError("summary holds no scalars");
    return first_;
}

bool QualitySummary::same_shape(const QualitySummary& other) const noexcept {
    return kind_ == other.kind_ && first_.size() == other.first_.size() &&
           coverage_ == other.coverage_;
}

std::vector<double> QualitySummary::flatten() const {
    std::vector<double> out = first_;
    out.insert(out.end(), second_.begin(), second_.end());
    return out;
}

// ---------------------------------------------------------------------------
// Configuration

std::size_t subset_size_for(std::size_t n, double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw ConfigError("gamma must lie in (0, 1], got " + std::to_string(gamma));
    }
    // The relative nudge keeps exact powers such as 10000^0.5 from flooring to 99.
    const double raw = std::pow(static_cast<double>(n), gamma) * (1.0 + 1e-12);
    const auto b = static_cast<std::size_t>(std::floor(raw));
    return std::clamp<std::size_t>(b, 1, n);
}

void AdaptiveParams::validate() const {
    if (!(epsilon_r >= 0.0) || !(epsilon_s >= 0.0)) {
        throw ConfigError("adaptive epsilons must be nonnegative");
    }
    if (window_r < 1 || window_s < 1) throw ConfigError("adaptive windows must be at least 1");
    if (window_r >= r_max) throw ConfigError("window_r must be smaller than r_max");
    if (window_s >= s_max) throw ConfigError("window_s must be smaller than s_max");
}

void ProcedureConfig::validate() const {
    if (b) {
        if (*b < 1) throw ConfigError("b must be at least 1");
    } else if (gamma) {
        if (!(*gamma > 0.0 && *gamma <= 1.0)) {
            throw ConfigError("gamma must lie in (0, 1], got " + std::to_string(*gamma));
        }
    } else {
        throw ConfigError("either gamma or b must be given");
    }
    if (s < 1) throw ConfigError("s must be at least 1");
    if (r < 1) throw ConfigError("r must be at least 1");
    if (!(rate_exponent > 0.0)) throw ConfigError("rate exponent must be positive");
    if (adaptive) adaptive->validate();
}

void ProcedureConfig::validate(std::size_t n) const {
    validate();
    (void)subset_size(n);
}

std::size_t ProcedureConfig::subset_size(std::size_t n) const {
    if (n < 1) throw ConfigError("dataset is empty");
    if (b) {
        if (*b < 1 || *b > n) {
            throw ConfigError("b = " + std::to_string(*b) + " must lie in [1, " + std::to_string(n) + "]");
        }
        return *b;
    }
    if (!gamma) throw ConfigError("either gamma or b must be given");
    return subset_size_for(n, *gamma);
}

}  // namespace blb
