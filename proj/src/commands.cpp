// Copyright 2026 The blb-toolkit Authors
// SPDX-License-Identifier: Apache-2.0
#include "blb/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "blb/io.hpp"
#include "json.hpp"

namespace blb::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = BLB_VERSION;
constexpr double kLogisticRidge = 1e-3;

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string default_out_dir() {
    const char* env = std::getenv(kOutputDirEnv);
    return env && *env ? env : "blb-out";
}

ordered_json to_json(const EstimatorSpec& e) {
    return {{"kind", to_string(e.kind)},
            {"max_iterations", e.max_iterations},
            {"gradient_tolerance", e.gradient_tolerance},
            {"ridge_lambda", e.ridge_lambda}};
}

ordered_json to_json(const MetricSpec& m) { return {{"kind", to_string(m.kind)}, {"coverage", m.coverage}}; }

ordered_json to_json(const ProcedureConfig& c, std::size_t n) {
    ordered_json j;
    j["gamma"] = c.b ? ordered_json(nullptr) : ordered_json(*c.gamma);
    j["b"] = c.subset_size(n);
    j["s"] = c.s;
    j["r"] = c.r;
    j["seed"] = c.seed;
    j["flavor"] = to_string(c.flavor);
    j["subsample_mode"] = to_string(c.subsample_mode);
    j["rate_exponent"] = c.rate_exponent;
    j["workers"] = c.workers;
    if (c.adaptive) {
        const AdaptiveParams& a = *c.adaptive;
        j["adaptive"] = {{"epsilon_r", a.epsilon_r}, {"window_r", a.window_r}, {"epsilon_s", a.epsilon_s},
                         {"window_s", a.window_s},   {"r_max", a.r_max},       {"s_max", a.s_max}};
    } else {
        j["adaptive"] = nullptr;
    }
    return j;
}

ordered_json to_json(const SelectionReport& s) {
    ordered_json stops = ordered_json::array();
    for (auto r : s.r_stop) stops.push_back(to_string(r));
    return {{"r_per_subsample", s.r_per_subsample},
            {"r_stop", stops},
            {"s", s.s},
            {"s_stop", to_string(s.s_stop)},
            {"resamples_used", s.resamples_used()},
            {"resamples_computed", s.resamples_computed}};
}

ordered_json error_record(const std::exception& e, const char* category) {
    ordered_json j{{"status", "error"}, {"category", category}, {"message", e.what()}};
    if (const auto* pe = dynamic_cast<const ProcedureError*>(&e)) {
        if (pe->subsample() != ProcedureError::npos) j["subsample"] = pe->subsample();
        if (pe->resample() != ProcedureError::npos) j["resample"] = pe->resample();
    }
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) j["line"] = pe->line();
    return j;
}

struct Output {
    fs::path dir;
    ordered_json manifest;
    std::vector<std::string> files;

    void write(const std::string& name, const std::string& contents) {
        io::write_file(dir / name, contents);
        files.push_back(name);
    }
    void write_table(const std::string& name, const io::Table& table) { write(name, io::serialize(table)); }
    void finish() {
        manifest["finished_at"] = utc_now();
        manifest["outputs"] = files;
        io::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    }
};

Output start_output(const std::string& dir, const std::string& command, const std::vector<std::string>& argv) {
    Output o;
    o.dir = dir;
    o.manifest["tool"] = "blb";
    o.manifest["version"] = kVersion;
    o.manifest["command"] = command;
    std::vector<std::string> replayable;
    for (std::size_t i = 0; i < argv.size(); ++i) {
        if (argv[i] == "--out") {
            ++i;
        } else if (argv[i].rfind("--out=", 0) != 0) {
            replayable.push_back(argv[i]);
        }
    }
    o.manifest["argv"] = replayable;
    o.manifest["started_at"] = utc_now();
    fs::create_directories(o.dir);
    fs::remove(o.dir / "error.json");
    return o;
}

struct AssessArgs {
    std::string data;
    std::string response = "last";
    std::string task;
    std::string synthetic;
    std::string estimator = "logreg";
    double ridge = 0.0;
    std::string metric = "ci";
    double coverage = 0.95;
    std::string method = "blb";
    std::optional<double> gamma;
    std::optional<std::size_t> b;
    std::size_t s = 5;
    std::size_t r = 100;
    bool adaptive = false;
    AdaptiveParams params;
    std::string flavor = "multinomial";
    bool partition = false;
    double rate = 0.5;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::string out;
};

io::CsvSchema schema_for(const std::string& response, Task task) {
    io::CsvSchema schema;
    schema.task = task;
    if (response == "last") {
        schema.response_last = true;
    } else if (response != "none") {
        if (!response.empty() && response.find_first_not_of("0123456789") == std::string::npos) {
            schema.response_index = std::stoul(response);
        } else {
            schema.response_name = response;
        }
    }
    return schema;
}

int cmd_assess(const AssessArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
    if (a.data.empty() == a.synthetic.empty()) throw ConfigError("give exactly one of --data and --synthetic");

    EstimatorSpec estimator;
    estimator.kind = parse_estimator_kind(a.estimator);
    estimator.ridge_lambda = a.ridge;
    estimator.validate();
    MetricSpec metric{parse_metric_kind(a.metric), a.coverage};
    metric.validate();
    const Method method = parse_method(a.method);

    ProcedureConfig config;
    if (a.b) {
        config.b = a.b;
        config.gamma.reset();
    } else if (a.gamma) {
        config.gamma = a.gamma;
    }
    config.s = a.s;
    config.r = a.r;
    config.seed = a.seed;
    if (a.flavor == "multinomial") config.flavor = ResampleFlavor::multinomial;
    else if (a.flavor == "poisson") config.flavor = ResampleFlavor::poisson;
    else throw ConfigError("unknown resampling flavor '" + a.flavor + "'");
    if (a.partition) config.subsample_mode = SubsampleMode::disjoint_partition;
    config.rate_exponent = a.rate;
    config.workers = a.workers;
    if (a.adaptive) {
        if (method != Method::blb) throw ConfigError("--adaptive applies to --method blb only");
        config.adaptive = a.params;
    }
    config.validate();

    Output o = start_output(a.out, "assess", argv);
    ordered_json input;
    std::optional<DataMatrix> data;
    if (!a.synthetic.empty()) {
        const io::SyntheticSpec spec = io::parse_synthetic(a.synthetic);
        const std::string canonical = io::format_synthetic(spec);
        input = {{"kind", "synthetic"}, {"spec", canonical}, {"digest", "fnv1a64:" + io::hex64(io::fnv1a(canonical))}};
        data = generate_realization(spec.generator, spec.n, StreamTag::dataset, 0);
    } else {
        const Task task = a.task.empty() ? (estimator.kind == EstimatorKind::logistic_newton ? Task::classification
                                                                                             : Task::regression)
                                         : parse_task(a.task);
        data = io::ingest_csv(a.data, schema_for(a.response, task));
        input = {{"kind", "csv"},
                 {"path", fs::absolute(a.data).string()},
                 {"response", a.response},
                 {"task", to_string(task)},
                 {"digest", io::file_digest(a.data)}};
    }
    input["n"] = data->n();
    input["p"] = data->p();
    o.manifest["input"] = input;
    o.manifest["seed"] = config.seed;
    o.manifest["config"] = {{"method", to_string(method)},
                            {"estimator", to_json(estimator)},
                            {"metric", to_json(metric)},
                            {"procedure", to_json(config, data->n())}};

    io::SummaryFile summary{std::string(to_string(method)), QualitySummary::scalars({0.0})};
    io::TrajectoryFile trajectory;
    if (config.adaptive) {
        AdaptiveResult res = run_blb_adaptive(*data, estimator, metric, config);
        summary.summary = res.summary;
        trajectory.steps = res.trajectory.steps();
        o.write("selection.json", to_json(res.selection).dump(2) + "\n");
    } else {
        ProcedureResult res = run_procedure(method, *data, estimator, metric, config);
        summary.summary = res.summary;
        trajectory.steps = res.trajectory.steps();
    }
    o.write_table("summary.tsv", io::to_table(summary));
    o.write_table("trajectory.tsv", io::to_table(trajectory));
    o.finish();
    out << "wrote " << o.files.size() + 1 << " files to " << o.dir.string() << "\n";
    return 0;
}

struct BenchmarkArgs {
    std::string preset;
    std::string synthetic;
    std::optional<std::size_t> n;
    std::size_t truth_realizations = 2000;
    std::size_t dataset_realizations = 5;
    std::optional<double> ridge;
    std::string metric = "ci";
    std::optional<std::size_t> s;
    std::uint64_t seed = 7;
    unsigned workers = 1;
    std::string data;
    std::string response = "last";
    std::string out;
    std::string cache_dir;
};

std::string truth_digest(const io::SyntheticSpec& spec, const EstimatorSpec& est, const MetricSpec& metric,
                         std::size_t realizations) {
    const std::string key = io::format_synthetic(spec) + "|" + to_json(est).dump() + "|" + to_json(metric).dump() +
                            "|" + std::to_string(realizations);
    return io::hex64(io::fnv1a(key));
}

GroundTruth cached_truth(const io::SyntheticSpec& spec, const EstimatorSpec& est, const MetricSpec& metric,
                         std::size_t realizations, unsigned workers, const fs::path& cache_dir, Output& o,
                         std::ostream& out, std::ostream& err) {
    if (realizations < 100) {
        err << "warning: ground truth from " << realizations
            << " realizations is low fidelity; use at least a few hundred\n";
    }
    const std::string digest = truth_digest(spec, est, metric, realizations);
    const fs::path cached = cache_dir / ("truth-" + digest + ".tsv");
    io::TruthFile file;
    bool hit = false;
    if (fs::exists(cached)) {
        try {
            file = io::truth_from(io::parse_table(io::read_file(cached), "truth"));
            hit = file.spec_digest == digest;
        } catch (const Error&) {
            hit = false;
        }
    }
    if (hit) {
        out << "using cached ground truth " << cached.string() << "\n";
    } else {
        file = {digest, compute_ground_truth(spec.generator, spec.n, realizations, est, metric, workers)};
        io::write_file(cached, io::serialize(io::to_table(file)));
    }
    o.manifest["truth"] = {{"digest", digest}, {"cache_file", fs::absolute(cached).string()}, {"cache_hit", hit}};
    o.write_table("truth.tsv", io::to_table(file));
    return file.truth;
}

std::vector<ProcedureCell> fig1_cells(std::size_t s, std::uint64_t seed, unsigned workers) {
    std::vector<ProcedureCell> cells;
    const double gammas[] = {0.5, 0.6, 0.7, 0.8, 0.9};
    for (Method m : {Method::blb, Method::bofn, Method::subsampling}) {
        for (double g : gammas) {
            ProcedureConfig c;
            c.gamma = g;
            c.s = s;
            c.r = 100;
            c.seed = seed;
            c.workers = workers;
            char label[32];
            std::snprintf(label, sizeof label, "%s-g%.1f", std::string(to_string(m)).c_str(), g);
            cells.push_back({label, m, false, c});
        }
    }
    ProcedureConfig boot;
    boot.r = 100;
    boot.seed = seed;
    boot.workers = workers;
    cells.push_back({"boot", Method::bootstrap, false, boot});
    return cells;
}

int cmd_benchmark(const BenchmarkArgs& a, const std::vector<std::string>& argv, std::ostream& out,
                  std::ostream& err) {
    MetricSpec metric{parse_metric_kind(a.metric), 0.95};
    Output o = start_output(a.out, "benchmark", argv);
    o.manifest["preset"] = a.preset;
    o.manifest["seed"] = a.seed;
    const fs::path cache_dir = a.cache_dir.empty() ? o.dir / "truth-cache" : fs::path(a.cache_dir);

    if (a.preset == "real-data") {
        if (a.data.empty()) throw ConfigError("preset real-data needs --data");
        const DataMatrix data = io::ingest_csv(a.data, schema_for(a.response, Task::classification));
        EstimatorSpec est{EstimatorKind::logistic_newton};
        est.ridge_lambda = a.ridge.value_or(kLogisticRidge);
        o.manifest["input"] = {{"kind", "csv"},
                               {"path", fs::absolute(a.data).string()},
                               {"digest", io::file_digest(a.data)},
                               {"n", data.n()},
                               {"p", data.p()}};
        o.manifest["config"] = {{"estimator", to_json(est)}, {"metric", to_json(metric)}};
        for (double g : {0.5, 0.6, 0.7, 0.8, 0.9}) {
            ProcedureConfig c;
            c.gamma = g;
            c.seed = a.seed;
            c.workers = a.workers;
            char tag[16];
            std::snprintf(tag, sizeof tag, "g%.1f", g);
            c.adaptive = AdaptiveParams{};
            const AdaptiveResult res = run_blb_adaptive(data, est, metric, c);
            o.write_table(std::string("blb-") + tag + ".trajectory.tsv", io::to_table(io::TrajectoryFile{res.trajectory.steps()}));
            o.write("blb-" + std::string(tag) + ".selection.json", to_json(res.selection).dump(2) + "\n");
            c.adaptive.reset();
            const ProcedureResult bofn = run_bofn(data, est, metric, c);
            o.write_table(std::string("bofn-") + tag + ".trajectory.tsv", io::to_table(io::TrajectoryFile{bofn.trajectory.steps()}));
        }
        ProcedureConfig boot;
        boot.seed = a.seed;
        boot.workers = a.workers;
        const ProcedureResult res = run_bootstrap(data, est, metric, boot);
        o.write_table("boot.trajectory.tsv", io::to_table(io::TrajectoryFile{res.trajectory.steps()}));
        o.finish();
        out << "wrote " << o.files.size() + 1 << " files to " << o.dir.string() << "\n";
        return 0;
    }

    io::SyntheticSpec spec;
    EstimatorSpec est;
    if (a.preset == "fig1-classification" || a.preset == "fig3-grid") {
        est.kind = EstimatorKind::logistic_newton;
        est.ridge_lambda = kLogisticRidge;
        spec.n = a.preset == "fig3-grid" ? 2000 : 20000;
    } else if (a.preset == "fig1-regression") {
        spec.generator.task = Task::regression;
        spec.generator.d = 100;
        est.kind = EstimatorKind::least_squares;
        spec.n = 20000;
    } else {
        throw ConfigError("unknown preset '" + a.preset + "'");
    }
    if (!a.synthetic.empty()) spec = io::parse_synthetic(a.synthetic);
    if (a.n) spec.n = *a.n;
    if (a.ridge) est.ridge_lambda = *a.ridge;
    if (est.kind == EstimatorKind::logistic_newton && spec.generator.task != Task::classification) {
        throw ConfigError("logistic presets need a classification generator");
    }
    est.validate();
    metric.validate();
    if (a.dataset_realizations < 1) throw ConfigError("--dataset-realizations must be at least 1");

    o.manifest["config"] = {{"generator", io::format_synthetic(spec)},
                            {"estimator", to_json(est)},
                            {"metric", to_json(metric)},
                            {"truth_realizations", a.truth_realizations},
                            {"dataset_realizations", a.dataset_realizations}};
    const GroundTruth truth =
        cached_truth(spec, est, metric, a.truth_realizations, a.workers, cache_dir, o, out, err);

    if (a.preset == "fig3-grid") {
        ProcedureConfig c;
        c.gamma = 0.7;
        c.seed = a.seed;
        c.workers = a.workers;
        const std::vector<std::size_t> r_values{2, 5, 10, 20, 50, 100};
        const std::vector<std::size_t> s_values{1, 2, 3, 5, 10, 20};
        o.manifest["config"]["procedure"] = to_json(c, spec.n);
        o.manifest["config"]["r_values"] = r_values;
        o.manifest["config"]["s_values"] = s_values;
        io::GridFile grid{spec.n, blb_grid(spec.generator, spec.n, est, metric, truth, c, r_values, s_values,
                                           a.dataset_realizations)};
        o.write_table("grid.tsv", io::to_table(grid));
    } else {
        const auto cells = fig1_cells(a.s.value_or(10), a.seed, a.workers);
        ordered_json jc = ordered_json::array();
        for (const auto& c : cells) {
            jc.push_back({{"label", c.label}, {"method", to_string(c.method)}, {"config", to_json(c.config, spec.n)}});
        }
        o.manifest["config"]["procedures"] = jc;
        const ExperimentReport report =
            run_experiment(spec.generator, spec.n, cells, est, metric, truth, a.dataset_realizations);
        o.write_table("report.tsv", io::to_table(io::ReportFile{report}));
        for (const auto& p : report.procedures) {
            out << p.label << "\tfinal relative error " << p.final_relative_error << " +- " << p.final_error_stderr;
            if (!p.failures.empty()) out << "\t(" << p.failures.size() << " failed realizations)";
            out << "\n";
        }
    }
    o.finish();
    out << "wrote " << o.files.size() + 1 << " files to " << o.dir.string() << "\n";
    return 0;
}

void emit_error(const ordered_json& record, const std::string& out_dir, std::ostream& err) {
    err << record.dump() << "\n";
    if (out_dir.empty()) return;
    try {
        io::write_file(fs::path(out_dir) / "error.json", record.dump(2) + "\n");
    } catch (const std::exception&) {
        // The record already went to the error stream.
    }
}

int run_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth);

int cmd_replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& out,
               std::ostream& err, int depth) {
    if (depth > 0) throw ConfigError("a replayed manifest cannot itself be a replay");
    const auto manifest = nlohmann::json::parse(io::read_file(manifest_path), nullptr, false);
    if (manifest.is_discarded() || !manifest.contains("argv")) {
        throw ConfigError("'" + manifest_path + "' is not a run manifest");
    }
    std::vector<std::string> argv = manifest["argv"].get<std::vector<std::string>>();
    argv.push_back("--out");
    argv.push_back(out_dir);
    return run_args(argv, out, err, depth + 1);
}

int run_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth) {
    CLI::App app{"Quality assessment of estimators with the Bag of Little Bootstraps", "blb"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    AssessArgs as;
    as.out = default_out_dir();
    auto* assess = app.add_subcommand("assess", "Assess an estimator on one dataset");
    auto* data_opt = assess->add_option("--data", as.data, "CSV file of numeric columns");
    assess->add_option("--response", as.response, "Response column: name, 0-based index, 'last' or 'none'")
        ->capture_default_str();
    assess->add_option("--task", as.task, "regression or classification (default follows the estimator)");
    assess->add_option("--synthetic", as.synthetic, "Synthetic dataset, e.g. 'task=regression,d=5,n=2000'")
        ->excludes(data_opt);
    assess->add_option("--estimator", as.estimator, "mean, linreg or logreg")->capture_default_str();
    assess->add_option("--ridge", as.ridge, "Ridge penalty per unit weight")->capture_default_str();
    assess->add_option("--metric", as.metric, "ci or stderr")->capture_default_str();
    assess->add_option("--coverage", as.coverage, "Interval coverage for --metric ci")->capture_default_str();
    assess->add_option("--method", as.method, "blb, boot, bofn or subsampling")->capture_default_str();
    auto* gamma_opt = assess->add_option("--gamma", as.gamma, "Subset size exponent, b = floor(n^gamma) (default 0.7)");
    assess->add_option("--b", as.b, "Explicit subset size")->excludes(gamma_opt);
    assess->add_option("--s", as.s, "Number of BLB subsamples")->capture_default_str();
    assess->add_option("--r", as.r, "Resamples per subsample, or total resamples")->capture_default_str();
    assess->add_flag("--adaptive", as.adaptive, "Choose r and s by the convergence check");
    assess->add_option("--epsilon-r", as.params.epsilon_r)->capture_default_str();
    assess->add_option("--window-r", as.params.window_r)->capture_default_str();
    assess->add_option("--epsilon-s", as.params.epsilon_s)->capture_default_str();
    assess->add_option("--window-s", as.params.window_s)->capture_default_str();
    assess->add_option("--r-max", as.params.r_max)->capture_default_str();
    assess->add_option("--s-max", as.params.s_max)->capture_default_str();
    assess->add_option("--flavor", as.flavor, "multinomial or poisson resampling")->capture_default_str();
    assess->add_flag("--partition", as.partition, "Draw BLB subsets from one disjoint partition");
    assess->add_option("--rate", as.rate, "Convergence rate exponent for size correction")->capture_default_str();
    assess->add_option("--seed", as.seed)->capture_default_str();
    assess->add_option("--workers", as.workers, "Worker threads (0: all cores)")->capture_default_str();
    assess->add_option("--out", as.out, std::string("Output directory (default $") + kOutputDirEnv + " or blb-out)");

    BenchmarkArgs bs;
    bs.out = default_out_dir();
    auto* bench = app.add_subcommand("benchmark", "Simulation experiments against a Monte Carlo ground truth");
    bench->add_option("--preset", bs.preset, "fig1-classification, fig1-regression, fig3-grid or real-data")
        ->required()
        ->check(CLI::IsMember({"fig1-classification", "fig1-regression", "fig3-grid", "real-data"}));
    bench->add_option("--synthetic", bs.synthetic, "Override the preset's generator");
    bench->add_option("--n", bs.n, "Dataset size");
    bench->add_option("--truth-realizations", bs.truth_realizations)->capture_default_str();
    bench->add_option("--dataset-realizations", bs.dataset_realizations)->capture_default_str();
    bench->add_option("--ridge", bs.ridge, "Override the estimator's ridge penalty");
    bench->add_option("--metric", bs.metric, "ci or stderr")->capture_default_str();
    bench->add_option("--s", bs.s, "BLB subsamples for the fig1 presets (default 10)");
    bench->add_option("--seed", bs.seed)->capture_default_str();
    bench->add_option("--workers", bs.workers)->capture_default_str();
    bench->add_option("--data", bs.data, "CSV file for the real-data preset");
    bench->add_option("--response", bs.response)->capture_default_str();
    bench->add_option("--out", bs.out);
    bench->add_option("--cache-dir", bs.cache_dir, "Ground-truth cache (default <out>/truth-cache)");

    std::string manifest_path, replay_out = default_out_dir();
    auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    replay->add_option("manifest", manifest_path)->required();
    replay->add_option("--out", replay_out);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        emit_error({{"status", "error"}, {"category", "usage"}, {"message", e.what()}}, "", err);
        return 2;
    }

    std::string out_dir;
    try {
        if (assess->parsed()) {
            out_dir = as.out;
            return cmd_assess(as, args, out);
        }
        if (bench->parsed()) {
            out_dir = bs.out;
            return cmd_benchmark(bs, args, out, err);
        }
        out_dir = replay_out;
        return cmd_replay(manifest_path, replay_out, out, err, depth);
    } catch (const Error& e) {
        emit_error(error_record(e, e.category()), out_dir, err);
    } catch (const fs::filesystem_error& e) {
        emit_error(error_record(e, "io"), "", err);
    }
    return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    return run_args(args, out, err, 0);
}

}  // namespace blb::cli
