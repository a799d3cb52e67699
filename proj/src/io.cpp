// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
#include "blb/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace blb::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> lines = split(text, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    for (auto& l : lines) {
        if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    }
    return lines;
}

std::optional<double> to_real(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

std::uint64_t to_u64(std::string_view s, std::string_view what) {
    s = trim(s);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw ConfigError(std::string(what) + ": expected a nonnegative integer, got '" + std::string(s) + "'");
    }
    return value;
}

double real_or_throw(std::string_view s, std::string_view what) {
    const auto v = to_real(s);
    if (!v) throw ConfigError(std::string(what) + ": expected a number, got '" + std::string(trim(s)) + "'");
    return *v;
}

}  // namespace

DataMatrix parse_csv(std::string_view text, const CsvSchema& schema) {
    const auto lines = lines_of(text);
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    bool first = true;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        const auto cells = split(lines[ln], ',');
        std::vector<double> row;
        row.reserve(cells.size());
        bool numeric = true;
        for (auto c : cells) {
            const auto v = to_real(c);
            if (!v) {
                numeric = false;
                break;
            }
            row.push_back(*v);
        }
        if (first) {
            first = false;
            width = cells.size();
            if (!numeric) {
                for (auto c : cells) header.emplace_back(trim(c));
                continue;
            }
        }
        if (cells.size() != width) {
            throw ParseError(ln + 1, "expected " + std::to_string(width) + " cells, found " +
                                         std::to_string(cells.size()));
        }
        if (!numeric) {
            for (std::size_t k = 0; k < cells.size(); ++k) {
                if (!to_real(cells[k])) {
                    const auto cell = trim(cells[k]);
                    throw ParseError(ln + 1, cell.empty() ? "empty cell in column " + std::to_string(k)
                                                          : "non-numeric cell '" + std::string(cell) +
                                                                "' in column " + std::to_string(k));
                }
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(DataError::Kind::empty, "no data rows");

    std::optional<std::size_t> response;
    if (schema.response_name) {
        const auto it = std::find(header.begin(), header.end(), *schema.response_name);
        if (it == header.end()) {
            throw DataError(DataError::Kind::missing_response,
                            "no column named '" + *schema.response_name + "'");
        }
        response = static_cast<std::size_t>(it - header.begin());
    } else if (schema.response_index) {
        if (*schema.response_index >= width) {
            throw DataError(DataError::Kind::missing_response,
                            "response column " + std::to_string(*schema.response_index) + " out of range");
        }
        response = schema.response_index;
    } else if (schema.response_last) {
        response = width - 1;
    }

    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto p = static_cast<Eigen::Index>(width - (response ? 1 : 0));
    if (p < 1) throw DataError(DataError::Kind::empty, "no feature columns");
    DataMatrix::Features x(n, p);
    Eigen::VectorXd y(response ? n : 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        Eigen::Index c = 0;
        for (std::size_t k = 0; k < width; ++k) {
            if (response && k == *response) {
                y[i] = row[k];
            } else {
                x(i, c++) = row[k];
            }
        }
    }
    if (!response) return DataMatrix(std::move(x));
    if (schema.task == Task::classification) {
        const bool signed_labels = (y.array() == -1.0 || y.array() == 1.0).all();
        if (signed_labels) y = (y.array() + 1.0) / 2.0;
    }
    DataMatrix data(std::move(x), std::move(y));
    validate(data, schema.task);
    return data;
}

DataMatrix ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    return parse_csv(read_file(path), schema);
}

namespace {

FeatureDist parse_feature_dist(std::string_view s) {
    if (s == "normal") return FeatureDist::normal;
    if (s == "student_t") return FeatureDist::student_t;
    if (s == "gamma") return FeatureDist::gamma;
    throw ConfigError("unknown feature distribution '" + std::string(s) + "'");
}

Link parse_link(std::string_view s) {
    if (s == "linear") return Link::linear;
    if (s == "linear_scaled") return Link::linear_scaled_by_sqrt_d;
    if (s == "nonlinear_noisy") return Link::nonlinear_noisy;
    throw ConfigError("unknown link '" + std::string(s) + "'");
}

}  // namespace

SyntheticSpec parse_synthetic(std::string_view text) {
    SyntheticSpec out;
    DataGeneratingSpec& g = out.generator;
    for (auto item : split(text, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw ConfigError("synthetic spec item '" + std::string(item) + "' lacks '='");
        const auto key = trim(item.substr(0, eq));
        const auto value = trim(item.substr(eq + 1));
        if (key == "task") g.task = parse_task(value);
        else if (key == "features") g.features = parse_feature_dist(value);
        else if (key == "df") g.df = real_or_throw(value, "df");
        else if (key == "shape") g.gamma_shape = real_or_throw(value, "shape");
        else if (key == "scale") g.gamma_scale = real_or_throw(value, "scale");
        else if (key == "d") g.d = to_u64(value, "d");
        else if (key == "beta") {
            g.coefficients.clear();
            if (!value.empty()) {
                for (auto v : split(value, ';')) g.coefficients.push_back(real_or_throw(v, "beta"));
            }
        } else if (key == "link") g.link = parse_link(value);
        else if (key == "noise_sd") g.noise_sd = real_or_throw(value, "noise_sd");
        else if (key == "nonlinearity") g.nonlinearity = real_or_throw(value, "nonlinearity");
        else if (key == "seed") g.seed = to_u64(value, "seed");
        else if (key == "n") out.n = to_u64(value, "n");
        else throw ConfigError("unknown synthetic spec key '" + std::string(key) + "'");
    }
    g.validate();
    if (out.n < 1) throw ConfigError("synthetic n must be at least 1");
    return out;
}

std::string format_synthetic(const SyntheticSpec& spec) {
    const DataGeneratingSpec& g = spec.generator;
    std::string beta;
    for (std::size_t i = 0; i < g.coefficients.size(); ++i) {
        if (i) beta += ';';
        beta += format_real(g.coefficients[i]);
    }
    return "task=" + std::string(to_string(g.task)) + ",features=" + std::string(to_string(g.features)) +
           ",df=" + format_real(g.df) + ",shape=" + format_real(g.gamma_shape) +
           ",scale=" + format_real(g.gamma_scale) + ",d=" + std::to_string(g.d) + ",beta=" + beta +
           ",link=" + std::string(to_string(g.link)) + ",noise_sd=" + format_real(g.noise_sd) +
           ",nonlinearity=" + format_real(g.nonlinearity) + ",seed=" + std::to_string(g.seed) +
           ",n=" + std::to_string(spec.n);
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t state) {
    for (unsigned char c : bytes) {
        state ^= c;
        state *= 0x100000001b3ull;
    }
    return state;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string file_digest(const std::filesystem::path& path) { return "fnv1a64:" + hex64(fnv1a(read_file(path))); }

std::string format_real(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

const std::string& Table::meta_value(std::string_view key) const {
    for (const auto& [k, v] : meta) {
        if (k == key) return v;
    }
    throw ParseError(0, "missing header field '" + std::string(key) + "'");
}

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw ParseError(0, "missing column '" + std::string(name) + "'");
}

std::string serialize(const Table& table) {
    std::string out = "#blb-" + table.format + " v" + std::to_string(table.version) + "\n";
    out += "#manifest\t" + table.manifest + "\n";
    for (const auto& [k, v] : table.meta) out += "#" + k + "\t" + v + "\n";
    auto join = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += '\t';
            out += cells[i];
        }
        out += '\n';
    };
    join(table.columns);
    for (const auto& row : table.rows) join(row);
    return out;
}

Table parse_table(std::string_view text, std::string_view expected_format) {
    const auto lines = lines_of(text);
    Table t;
    const std::string magic = "#blb-" + std::string(expected_format) + " v";
    if (lines.empty() || lines[0].substr(0, magic.size()) != magic) {
        throw ParseError(1, "not a blb-" + std::string(expected_format) + " file");
    }
    t.format = std::string(expected_format);
    t.version = static_cast<int>(to_u64(lines[0].substr(magic.size()), "version"));
    if (t.version != 1) throw ParseError(1, "unsupported version " + std::to_string(t.version));
    std::size_t ln = 1;
    bool manifest_seen = false;
    for (; ln < lines.size() && !lines[ln].empty() && lines[ln][0] == '#'; ++ln) {
        const auto tab = lines[ln].find('\t');
        if (tab == std::string_view::npos) throw ParseError(ln + 1, "header line lacks a tab");
        std::string key(lines[ln].substr(1, tab - 1));
        std::string value(lines[ln].substr(tab + 1));
        if (!manifest_seen && key == "manifest") {
            t.manifest = std::move(value);
            manifest_seen = true;
        } else {
            t.meta.emplace_back(std::move(key), std::move(value));
        }
    }
    if (!manifest_seen) throw ParseError(2, "missing manifest reference");
    if (ln == lines.size()) throw ParseError(ln + 1, "missing column header");
    for (auto c : split(lines[ln], '\t')) t.columns.emplace_back(c);
    for (++ln; ln < lines.size(); ++ln) {
        auto cells = split(lines[ln], '\t');
        if (cells.size() != t.columns.size()) {
            throw ParseError(ln + 1, "expected " + std::to_string(t.columns.size()) + " cells, found " +
                                         std::to_string(cells.size()));
        }
        t.rows.emplace_back(cells.begin(), cells.end());
    }
    return t;
}

namespace {

double mean_dispersion(const QualitySummary& s) {
    const auto d = dispersion(s);
    return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
}

void put_summary_meta(Table& t, const QualitySummary& s) {
    const bool intervals = s.kind() == SummaryKind::interval_set;
    t.meta.emplace_back("kind", intervals ? "interval_set" : "scalar_per_dim");
    if (intervals) t.meta.emplace_back("coverage", format_real(s.coverage()));
    t.meta.emplace_back("dim", std::to_string(s.dim()));
}

void put_summary_rows(Table& t, const QualitySummary& s) {
    if (s.kind() == SummaryKind::interval_set) {
        t.columns = {"dim", "lower", "upper", "width"};
        for (std::size_t i = 0; i < s.dim(); ++i) {
            t.rows.push_back({std::to_string(i), format_real(s.lower()[i]), format_real(s.upper()[i]),
                              format_real(s.upper()[i] - s.lower()[i])});
        }
    } else {
        t.columns = {"dim", "value"};
        for (std::size_t i = 0; i < s.dim(); ++i) t.rows.push_back({std::to_string(i), format_real(s.values()[i])});
    }
}

double cell_real(const std::string& cell) {
    const auto v = to_real(cell);
    if (!v) throw ParseError(0, "expected a number, got '" + cell + "'");
    return *v;
}

std::size_t cell_count(const std::string& cell) {
    try {
        return to_u64(cell, "count");
    } catch (const ConfigError& e) {
        throw ParseError(0, e.what());
    }
}

QualitySummary summary_from_rows(const Table& t) {
    const std::string& kind = t.meta_value("kind");
    const std::size_t dim = cell_count(t.meta_value("dim"));
    if (t.rows.size() != dim) throw ParseError(0, "row count does not match dim");
    if (kind == "interval_set") {
        std::vector<double> lo, hi;
        const std::size_t cl = t.column("lower"), cu = t.column("upper");
        for (const auto& row : t.rows) {
            lo.push_back(cell_real(row[cl]));
            hi.push_back(cell_real(row[cu]));
        }
        return QualitySummary::intervals(std::move(lo), std::move(hi), cell_real(t.meta_value("coverage")));
    }
    if (kind == "scalar_per_dim") {
        std::vector<double> v;
        const std::size_t cv = t.column("value");
        for (const auto& row : t.rows) v.push_back(cell_real(row[cv]));
        return QualitySummary::scalars(std::move(v));
    }
    throw ParseError(0, "unknown summary kind '" + kind + "'");
}

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

}  // namespace

Table to_table(const SummaryFile& file) {
    Table t;
    t.format = "summary";
    t.meta.emplace_back("method", file.method);
    put_summary_meta(t, file.summary);
    t.meta.emplace_back("mean_width", format_real(mean_dispersion(file.summary)));
    put_summary_rows(t, file.summary);
    return t;
}

SummaryFile summary_from(const Table& t) {
    return {t.meta_value("method"), summary_from_rows(t)};
}

Table to_table(const TrajectoryFile& file) {
    Table t;
    t.format = "trajectory";
    if (file.steps.empty()) {
        t.meta.emplace_back("kind", "empty");
        t.columns = {"step", "elapsed_seconds", "work_unit", "mean_width"};
        return t;
    }
    const QualitySummary& first = file.steps.front().summary;
    put_summary_meta(t, first);
    t.columns = {"step", "elapsed_seconds", "work_unit", "mean_width"};
    const bool intervals = first.kind() == SummaryKind::interval_set;
    for (const char* prefix : intervals ? std::vector<const char*>{"lower_", "upper_"}
                                        : std::vector<const char*>{"value_"}) {
        for (std::size_t i = 0; i < first.dim(); ++i) t.columns.push_back(prefix + std::to_string(i));
    }
    for (std::size_t k = 0; k < file.steps.size(); ++k) {
        const auto& step = file.steps[k];
        std::vector<std::string> row{std::to_string(k), format_real(step.elapsed_seconds),
                                     sanitize(step.work_unit), format_real(mean_dispersion(step.summary))};
        for (double v : step.summary.flatten()) row.push_back(format_real(v));
        t.rows.push_back(std::move(row));
    }
    return t;
}

TrajectoryFile trajectory_from(const Table& t) {
    TrajectoryFile file;
    const std::string& kind = t.meta_value("kind");
    if (kind == "empty") return file;
    const std::size_t dim = cell_count(t.meta_value("dim"));
    const bool intervals = kind == "interval_set";
    if (!intervals && kind != "scalar_per_dim") throw ParseError(0, "unknown summary kind '" + kind + "'");
    const double coverage = intervals ? cell_real(t.meta_value("coverage")) : 0.0;
    const std::size_t first_value = t.column("mean_width") + 1;
    if (t.columns.size() != first_value + (intervals ? 2 : 1) * dim) throw ParseError(0, "column count does not match dim");
    for (const auto& row : t.rows) {
        std::vector<double> v;
        for (std::size_t c = first_value; c < row.size(); ++c) v.push_back(cell_real(row[c]));
        QualitySummary s = intervals ? QualitySummary::intervals({v.begin(), v.begin() + static_cast<long>(dim)},
                                                                 {v.begin() + static_cast<long>(dim), v.end()}, coverage)
                                     : QualitySummary::scalars(std::move(v));
        file.steps.push_back({cell_real(row[t.column("elapsed_seconds")]), std::move(s), row[t.column("work_unit")]});
    }
    return file;
}

Table to_table(const GridFile& file) {
    Table t;
    t.format = "grid";
    t.meta.emplace_back("n", std::to_string(file.n));
    t.columns = {"r", "s", "relative_error"};
    for (const auto& c : file.cells) {
        t.rows.push_back({std::to_string(c.r), std::to_string(c.s), format_real(c.relative_error)});
    }
    return t;
}

GridFile grid_from(const Table& t) {
    GridFile file;
    file.n = cell_count(t.meta_value("n"));
    for (const auto& row : t.rows) {
        file.cells.push_back({cell_count(row[t.column("r")]), cell_count(row[t.column("s")]),
                              cell_real(row[t.column("relative_error")])});
    }
    return file;
}

Table to_table(const TruthFile& file) {
    Table t;
    t.format = "truth";
    t.meta.emplace_back("spec_digest", file.spec_digest);
    t.meta.emplace_back("n", std::to_string(file.truth.n));
    t.meta.emplace_back("num_realizations", std::to_string(file.truth.num_realizations));
    put_summary_meta(t, file.truth.summary);
    put_summary_rows(t, file.truth.summary);
    return t;
}

TruthFile truth_from(const Table& t) {
    return {t.meta_value("spec_digest"),
            {summary_from_rows(t), cell_count(t.meta_value("num_realizations")), cell_count(t.meta_value("n"))}};
}

Table to_table(const ReportFile& file) {
    const ExperimentReport& r = file.report;
    Table t;
    t.format = "report";
    t.meta.emplace_back("n", std::to_string(r.n));
    t.meta.emplace_back("realizations", std::to_string(r.realizations));
    t.columns = {"record", "label", "index", "seconds", "value", "extra"};
    for (const auto& p : r.procedures) {
        const std::string label = sanitize(p.label);
        t.rows.push_back({"final", label, "-", format_real(p.mean_total_seconds), format_real(p.final_relative_error),
                          format_real(p.final_error_stderr)});
        for (std::size_t k = 0; k < p.trajectory.size(); ++k) {
            const auto& pt = p.trajectory[k];
            t.rows.push_back({"point", label, std::to_string(k), format_real(pt.elapsed_seconds),
                              format_real(pt.relative_error), std::to_string(pt.count)});
        }
        for (std::size_t k = 0; k < p.final_errors.size(); ++k) {
            t.rows.push_back({"error", label, std::to_string(k), "-", format_real(p.final_errors[k]), "-"});
        }
        for (const auto& f : p.failures) t.rows.push_back({"failure", label, "-", "-", "-", sanitize(f)});
    }
    return t;
}

ReportFile report_from(const Table& t) {
    ReportFile file;
    ExperimentReport& r = file.report;
    r.n = cell_count(t.meta_value("n"));
    r.realizations = cell_count(t.meta_value("realizations"));
    const std::size_t c_rec = t.column("record"), c_label = t.column("label"), c_sec = t.column("seconds"),
                      c_val = t.column("value"), c_extra = t.column("extra");
    for (const auto& row : t.rows) {
        const std::string& rec = row[c_rec];
        if (rec == "final") {
            ProcedureOutcome p;
            p.label = row[c_label];
            p.mean_total_seconds = cell_real(row[c_sec]);
            p.final_relative_error = cell_real(row[c_val]);
            p.final_error_stderr = cell_real(row[c_extra]);
            r.procedures.push_back(std::move(p));
            continue;
        }
        if (r.procedures.empty() || r.procedures.back().label != row[c_label]) {
            throw ParseError(0, "record for '" + row[c_label] + "' precedes its final row");
        }
        ProcedureOutcome& p = r.procedures.back();
        if (rec == "point") {
            p.trajectory.push_back({cell_real(row[c_sec]), cell_real(row[c_val]), cell_count(row[c_extra])});
        } else if (rec == "error") {
            p.final_errors.push_back(cell_real(row[c_val]));
        } else if (rec == "failure") {
            p.failures.push_back(row[c_extra]);
        } else {
            throw ParseError(0, "unknown record type '" + rec + "'");
        }
    }
    return file;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw ConfigError("write to '" + tmp.string() + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace blb::io
