// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace blb {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;

    /// Short machine-readable category, used in CLI error records.
    virtual const char* category() const noexcept { return "error"; }
};

class DataError : public Error {
  public:
    enum class Kind {
        empty,
        dimension_mismatch,
        non_binary_response,
        non_finite,
        missing_response,
    };

    DataError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }
    const char* category() const noexcept override { return "data"; }

  private:
    Kind kind_;
};

/// An invariant violation in a configuration or domain value.
class ConfigError : public Error {
  public:
    using Error::Error;
    const char* category() const noexcept override { return "config"; }
};

/// Summaries or vectors of incompatible kind or dimension.
class ShapeError : public Error {
  public:
    using Error::Error;
    const char* category() const noexcept override { return "shape"; }
};

class EstimationError : public Error {
  public:
    enum class Reason {
        zero_weight,
        missing_response,
        singular_system,
        non_convergence,
        non_finite,
    };

    EstimationError(Reason reason, const std::string& what)
        : Error(what), reason_(reason) {}

    Reason reason() const noexcept { return reason_; }
    const char* category() const noexcept override { return "estimation"; }

  private:
    Reason reason_;
};

/// Wraps a failure inside a resampling driver with the work unit it came from.
class ProcedureError : public Error {
  public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    ProcedureError(std::size_t subsample, std::size_t resample, const std::string& cause)
        : Error(describe(subsample, resample, cause)),
          subsample_(subsample),
          resample_(resample) {}

    std::size_t subsample() const noexcept { return subsample_; }
    std::size_t resample() const noexcept { return resample_; }
    const char* category() const noexcept override { return "procedure"; }

  private:
    static std::string describe(std::size_t j, std::size_t k, const std::string& cause) {
        std::string where;
        if (j != npos) where += "subsample " + std::to_string(j);
        if (k != npos) {
            if (!where.empty()) where += ", ";
            where += "resample " + std::to_string(k);
        }
        return where.empty() ? cause : where + ": " + cause;
    }

    std::size_t subsample_;
    std::size_t resample_;
};

class ParseError : public Error {
  public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }
    const char* category() const noexcept override { return "parse"; }

  private:
    std::size_t line_;
};

}  // namespace blb
