// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dataset ingestion and the result file formats written by the command-line tool.
//
// Result tables are tab-separated text with a versioned header:
//
//   #blb-<format> v1
//   #manifest<TAB>manifest.json
//   #<key><TAB><value>          (zero or more metadata lines)
//   col_a<TAB>col_b...
//   rows...
//
// Reals are printed with %.17g, so parsing a file and writing it back yields
// the same bytes.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "blb/adaptive.hpp"
#include "blb/simbench.hpp"

namespace blb::io {

struct CsvSchema {
    /// Response column by header name, 0-based index, or the last column; none
    /// of these means no response.
    std::optional<std::string> response_name;
    std::optional<std::size_t> response_index;
    bool response_last = false;
    Task task = Task::regression;
};

/// Reads comma-separated numeric text. A first line that is not entirely numeric
/// is taken as a header. Under classification, responses in {-1, 1} are mapped
/// to {0, 1}. Throws ParseError (with the line) or DataError.
DataMatrix ingest_csv(const std::filesystem::path& path, const CsvSchema& schema);
DataMatrix parse_csv(std::string_view text, const CsvSchema& schema);

/// A synthetic dataset definition: generator fields plus the row count.
struct SyntheticSpec {
    DataGeneratingSpec generator;
    std::size_t n = 10000;
};

/// Parses "key=value,key=value". Keys: task, features, df, shape, scale, d,
/// beta (values separated by ';'), link, noise_sd, nonlinearity, seed, n.
SyntheticSpec parse_synthetic(std::string_view text);
/// Canonical form with every field spelled out; parse_synthetic inverts it.
std::string format_synthetic(const SyntheticSpec& spec);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t state = 0xcbf29ce484222325ull);
std::string hex64(std::uint64_t value);
std::string file_digest(const std::filesystem::path& path);

std::string format_real(double value);

/// Generic versioned tab-separated table.
struct Table {
    std::string format;
    int version = 1;
    std::string manifest = "manifest.json";
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    const std::string& meta_value(std::string_view key) const;
    std::size_t column(std::string_view name) const;
};

std::string serialize(const Table& table);
Table parse_table(std::string_view text, std::string_view expected_format);

struct SummaryFile {
    std::string method;
    QualitySummary summary = QualitySummary::scalars({0.0});
};

struct TrajectoryFile {
    std::vector<TrajectoryStep> steps;
};

struct GridFile {
    std::size_t n = 0;
    std::vector<GridCell> cells;
};

struct TruthFile {
    std::string spec_digest;
    GroundTruth truth{QualitySummary::scalars({0.0}), 0, 0};
};

struct ReportFile {
    ExperimentReport report;
};

Table to_table(const SummaryFile& file);
Table to_table(const TrajectoryFile& file);
Table to_table(const GridFile& file);
Table to_table(const TruthFile& file);
Table to_table(const ReportFile& file);

SummaryFile summary_from(const Table& table);
TrajectoryFile trajectory_from(const Table& table);
GridFile grid_from(const Table& table);
TruthFile truth_from(const Table& table);
ReportFile report_from(const Table& table);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary file and a rename.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace blb::io
