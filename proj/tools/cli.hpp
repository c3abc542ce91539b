#pragma once

// Command-line front end: `schedule`, `bench` and `trace`.
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include "hpsogwo/harness.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace hpsogwo::cli {

inline constexpr const char *tool_version = "1.0.0";
inline constexpr const char *out_dir_env = "HPSOGWO_OUT_DIR";

enum ExitCode : int
{
    exit_ok = 0,
    exit_runtime = 1,
    exit_usage = 2,
};

/// Thrown for bad flag values or config keys; maps to exit 2.
class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Every tunable, flat, with built-in defaults. Mirrors the config-file and
/// manifest `config` object key for key.
struct Settings
{
    // workload / fleet
    std::size_t tasks = 800;
    std::size_t vms = 4;
    double vm_mips = 1000.0;
    double min_length_mi = 100.0;
    double max_length_mi = 1000.0;
    std::optional<std::string> trace;
    std::size_t limit = 800;
    double mi_per_core_second = 1000.0;

    // experiment
    std::vector<std::string> algos{"hybrid", "pso", "gwo", "minmin", "rr"};
    std::string algo = "hybrid";
    std::size_t replicates = 30;
    std::uint64_t seed = 42;
    std::size_t jobs = 1;
    bool wall_time = true;
    double weight_makespan = 1.0 / 3.0;
    double weight_throughput = 1.0 / 3.0;
    double weight_cv = 1.0 / 3.0;
    double weight_speed = 0.0;

    // optimizer
    std::size_t swarm_size = 20;
    std::size_t max_iterations = 50;
    double lambda_max = 0.9;
    double lambda_min = 0.4;
    double inertia = 0.7;
    double c1 = 1.5;
    double c2 = 1.5;
    std::optional<double> v_max;
    std::optional<double> d_min;
    std::optional<double> mutation_sigma_scale;
    std::optional<double> beta;
    std::optional<double> init_span;
    double headroom_theta = 1.2;
    bool diversity_control = true;
    std::string ordering = "gwo-weighted";
};

namespace detail {

template <class T>
void read_key(const nlohmann::json &j, const char *key, T &out)
{
    if (!j.contains(key))
        return;
    try {
        if constexpr (requires { out.reset(); }) {
            if (j.at(key).is_null())
                out.reset();
            else
                out = j.at(key).get<typename T::value_type>();
        } else {
            out = j.at(key).get<T>();
        }
    } catch (const nlohmann::json::exception &e) {
        throw UsageError(std::string("config key '") + key + "': " + e.what());
    }
}

} // namespace detail

#define HPSOGWO_SETTINGS_KEYS(X)                                                                  \
    X(tasks) X(vms) X(vm_mips) X(min_length_mi) X(max_length_mi) X(trace) X(limit)                \
    X(mi_per_core_second) X(algos) X(algo) X(replicates) X(seed) X(jobs) X(wall_time)           \
    X(weight_makespan) X(weight_throughput) X(weight_cv) X(weight_speed) X(swarm_size)           \
    X(max_iterations) X(lambda_max) X(lambda_min) X(inertia) X(c1) X(c2) X(v_max) X(d_min)       \
    X(mutation_sigma_scale) X(beta) X(init_span) X(headroom_theta) X(diversity_control)          \
    X(ordering)

/// Applies a flat config document, or the `config` object of a manifest.
inline void apply_config(Settings &s, const nlohmann::json &doc)
{
    const nlohmann::json &j = doc.contains("config") && doc.at("config").is_object() ? doc.at("config") : doc;
    if (!j.is_object())
        throw UsageError("config file must hold a JSON object");
    static const std::vector<std::string> known = {
#define X(name) #name,
        HPSOGWO_SETTINGS_KEYS(X)
#undef X
    };
    for (const auto &[key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw UsageError("unknown config key '" + key + "'");
#define X(name) detail::read_key(j, #name, s.name);
    HPSOGWO_SETTINGS_KEYS(X)
#undef X
}

inline void load_config_file(Settings &s, const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open config file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception &e) {
        throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    apply_config(s, doc);
}

namespace detail {

template <class T>
nlohmann::json key_value(const T &v)
{
    return v;
}

template <class T>
nlohmann::json key_value(const std::optional<T> &v)
{
    return v ? nlohmann::json(*v) : nlohmann::json();
}

} // namespace detail

inline nlohmann::json to_json(const Settings &s)
{
    nlohmann::json j;
#define X(name) j[#name] = detail::key_value(s.name);
    HPSOGWO_SETTINGS_KEYS(X)
#undef X
    return j;
}

inline SchedulerKind scheduler_or_throw(const std::string &name)
{
    if (auto k = parse_scheduler(name))
        return *k;
    std::string valid;
    for (const std::string &n : scheduler_names())
        valid += (valid.empty() ? "" : ", ") + n;
    throw UsageError("unknown algorithm '" + name + "'; valid algorithms: " + valid);
}

inline OptimizerConfig optimizer_config(const Settings &s)
{
    OptimizerConfig c;
    c.swarm_size = s.swarm_size;
    c.max_iterations = s.max_iterations;
    c.lambda_max = s.lambda_max;
    c.lambda_min = s.lambda_min;
    c.inertia = s.inertia;
    c.c1 = s.c1;
    c.c2 = s.c2;
    c.v_max = s.v_max;
    c.d_min = s.d_min;
    c.mutation_sigma_scale = s.mutation_sigma_scale;
    c.beta = s.beta;
    c.init_span = s.init_span;
    c.capacity.headroom_theta = s.headroom_theta;
    c.diversity_control = s.diversity_control;
    if (s.ordering == "gwo-weighted")
        c.ordering = BlendOrdering::GwoWeighted;
    else if (s.ordering == "pso-weighted")
        c.ordering = BlendOrdering::PsoWeighted;
    else
        throw UsageError("ordering must be 'gwo-weighted' or 'pso-weighted'");
    try {
        validate(c);
    } catch (const InvalidInput &e) {
        throw UsageError(e.what());
    }
    return c;
}

/// Fills every instance-derived default that is known before the run, so
/// the manifest replays exactly. beta stays null when it is derived per
/// workload (it depends on the mean ETC).
inline void materialize(Settings &s, std::size_t task_count)
{
    const double m = static_cast<double>(s.vms);
    const double x_max = position_bound(s.vms);
    if (!s.v_max)
        s.v_max = x_max;
    if (!s.d_min)
        s.d_min = 0.05 * m * std::sqrt(static_cast<double>(task_count));
    if (!s.mutation_sigma_scale)
        s.mutation_sigma_scale = 0.1 * m;
    if (!s.init_span)
        s.init_span = x_max;
}

inline nlohmann::json manifest(const Settings &s, const std::string &command)
{
    return {{"tool", "hpsogwo"},
            {"version", tool_version},
            {"command", command},
            {"root_seed", s.seed},
            {"beta_rule", s.beta ? "fixed" : "0.5 * mean_etc * n / m per workload"},
            {"config", to_json(s)}};
}

inline void write_text(const std::filesystem::path &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out)
        throw IoError("write failed for '" + path.string() + "'");
}

inline std::string default_out_dir()
{
    if (const char *env = std::getenv(out_dir_env); env && *env)
        return env;
    return "hpsogwo-out";
}

/// Registers the flags shared by every command. Flags land in `flags`
/// only when given, so they override the config file.
struct CommonFlags
{
    std::optional<std::string> config;
    std::optional<std::size_t> tasks, vms, limit, swarm, iterations;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> trace;
    std::optional<double> beta, theta, vm_mips;

    void add(CLI::App &app)
    {
        app.add_option("--config", config, "Flat JSON config file or run manifest");
        app.add_option("--tasks", tasks, "Synthetic task count")->check(CLI::PositiveNumber);
        app.add_option("--vms", vms, "VM count (1000 MIPS each by default)")->check(CLI::PositiveNumber);
        app.add_option("--vm-mips", vm_mips, "Capacity of every VM")->check(CLI::PositiveNumber);
        app.add_option("--seed", seed, "Root seed");
        app.add_option("--trace", trace, "Schedule a trace CSV instead of a synthetic workload");
        app.add_option("--limit", limit, "Tasks taken from the trace")->check(CLI::PositiveNumber);
        app.add_option("--swarm", swarm, "Swarm size")->check(CLI::Range(2, 1 << 20));
        app.add_option("--iterations", iterations, "Iterations")->check(CLI::PositiveNumber);
        app.add_option("--beta", beta, "Imbalance penalty weight (default: derived)")->check(CLI::NonNegativeNumber);
        app.add_option("--theta", theta, "Capacity headroom")->check(CLI::Range(1.0, 1e9));
    }

    void apply(Settings &s) const
    {
        if (config)
            load_config_file(s, *config);
        if (tasks) s.tasks = *tasks;
        if (vms) s.vms = *vms;
        if (vm_mips) s.vm_mips = *vm_mips;
        if (seed) s.seed = *seed;
        if (trace) s.trace = *trace;
        if (limit) s.limit = *limit;
        if (swarm) s.swarm_size = *swarm;
        if (iterations) s.max_iterations = *iterations;
        if (beta) s.beta = *beta;
        if (theta) s.headroom_theta = *theta;
    }
};

inline Workload load_workload(const Settings &s, std::uint64_t seed)
{
    if (s.trace)
        return ingest_trace(std::filesystem::path(*s.trace), {s.limit, s.mi_per_core_second});
    return generate_synthetic({s.tasks, s.min_length_mi, s.max_length_mi, seed});
}

// --------------------------------------------------------------------------

inline int cmd_schedule(const Settings &base, const std::optional<std::string> &algo_flag,
                        const std::optional<std::string> &convergence_csv,
                        const std::optional<std::string> &manifest_path, std::ostream &out)
{
    Settings s = base;
    if (algo_flag)
        s.algo = *algo_flag;
    const SchedulerKind kind = scheduler_or_throw(s.algo);
    OptimizerConfig cfg = optimizer_config(s);

    const Workload workload = load_workload(s, workload_seed(s.seed, 0));
    materialize(s, workload.size());
    cfg = optimizer_config(s);
    cfg.seed = run_seed(s.seed, 0, 0);
    const std::vector<VmSpec> fleet = standard_fleet(s.vms, s.vm_mips);
    const ScheduleOutcome o = run_scheduler(kind, workload, fleet, cfg);

    std::vector<std::size_t> per_vm(fleet.size(), 0);
    for (std::size_t j : o.assignment.vm_of)
        ++per_vm[j];
    nlohmann::json report = to_json(o.metrics);
    report["algorithm"] = std::string(scheduler_info(kind).name);
    report["label"] = std::string(scheduler_info(kind).label);
    report["tasks"] = workload.size();
    report["vms"] = fleet.size();
    report["seed"] = s.seed;
    report["source"] = workload.source_label;
    report["tasks_per_vm"] = per_vm;
    out << report.dump(2) << '\n';

    if (convergence_csv) {
        std::ostringstream csv;
        write_convergence_csv(csv, o.log);
        write_text(*convergence_csv, csv.str());
    }
    if (manifest_path)
        write_text(*manifest_path, manifest(s, "schedule").dump(2) + "\n");
    return exit_ok;
}

inline int cmd_bench(const Settings &base, const std::string &out_dir, bool write_logs, std::ostream &out)
{
    Settings s = base;
    ExperimentPlan plan;
    for (const std::string &a : s.algos)
        plan.schedulers.push_back(scheduler_or_throw(a));
    if (plan.schedulers.empty())
        throw UsageError("--algos must name at least one algorithm");
    if (s.replicates < 1)
        throw UsageError("--replicates must be >= 1");

    std::size_t n = s.tasks;
    if (s.trace) {
        plan.workload.trace_path = *s.trace;
        plan.workload.trace = {s.limit, s.mi_per_core_second};
        n = ingest_trace(std::filesystem::path(*s.trace), plan.workload.trace).size();
    }
    materialize(s, n);
    plan.workload.synthetic = {s.tasks, s.min_length_mi, s.max_length_mi, 0};
    plan.vm_count = s.vms;
    plan.vm_mips = s.vm_mips;
    plan.replicates = s.replicates;
    plan.root_seed = s.seed;
    plan.optimizer = optimizer_config(s);
    plan.weights = {s.weight_makespan, s.weight_throughput, s.weight_cv, s.weight_speed};
    plan.jobs = s.jobs;
    plan.record_wall_time = s.wall_time;

    namespace fs = std::filesystem;
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError("cannot create output directory '" + out_dir + "'" + (ec ? ": " + ec.message() : ""));

    const ExperimentResult result = run_experiment(plan);

    std::ostringstream raw;
    write_raw_csv(raw, result.records);
    write_text(dir / "raw.csv", raw.str());
    write_text(dir / "aggregates.json", aggregates_json(plan, result).dump(2) + "\n");
    write_text(dir / "ttests.json", ttests_json(result).dump(2) + "\n");
    write_text(dir / "manifest.json", manifest(s, "bench").dump(2) + "\n");
    if (write_logs) {
        fs::create_directories(dir / "convergence", ec);
        if (ec)
            throw IoError("cannot create '" + (dir / "convergence").string() + "': " + ec.message());
        for (const RunRecord &r : result.records) {
            if (r.log.empty())
                continue;
            std::ostringstream csv;
            write_convergence_csv(csv, r.log);
            write_text(dir / "convergence" / (r.scheduler + "_r" + std::to_string(r.replicate) + ".csv"), csv.str());
        }
    }

    out << "scheduler        makespan_med  makespan_mean  cv_mean     score\n";
    for (const SchedulerAggregate &a : result.aggregates) {
        char line[160];
        std::snprintf(line, sizeof line, "%-16s %12.4f  %13.4f  %9.6f  %6.3f\n", a.scheduler.c_str(),
                      a.makespan_s.median, a.makespan_s.mean, a.cv.mean, a.overall_score);
        out << line;
    }
    out << result.records.size() << " runs written to " << dir.string() << '\n';
    return exit_ok;
}

inline int cmd_trace(const std::string &input, std::size_t limit, double scale,
                     const std::optional<std::string> &export_path, std::ostream &out)
{
    const Workload w = ingest_trace(std::filesystem::path(input), {limit, scale});
    double lo = w.tasks[0].length_mi, hi = lo, sum = 0.0;
    for (const Task &t : w.tasks) {
        lo = std::min(lo, t.length_mi);
        hi = std::max(hi, t.length_mi);
        sum += t.length_mi;
    }
    const nlohmann::json summary = {{"tasks", w.size()},
                                    {"min_mi", lo},
                                    {"mean_mi", sum / static_cast<double>(w.size())},
                                    {"max_mi", hi},
                                    {"source", w.source_label}};
    out << summary.dump(2) << '\n';
    if (export_path) {
        std::ostringstream csv;
        export_trace(csv, w, scale);
        write_text(*export_path, csv.str());
    }
    return exit_ok;
}

// --------------------------------------------------------------------------

/// Entry point; streams are injectable for tests.
inline int run(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr)
{
    CLI::App app{"HybridPSOGWO cloud task scheduler and benchmark harness", "hpsogwo"};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1);

    CLI::App *schedule = app.add_subcommand("schedule", "Run one scheduler on one workload");
    CommonFlags schedule_flags;
    schedule_flags.add(*schedule);
    std::optional<std::string> algo, convergence_csv, schedule_manifest;
    schedule->add_option("--algo", algo, "Algorithm: " + [] {
        std::string s;
        for (const std::string &n : scheduler_names())
            s += (s.empty() ? "" : ", ") + n;
        return s;
    }());
    schedule->add_option("--convergence-csv", convergence_csv, "Write the convergence log here");
    schedule->add_option("--manifest", schedule_manifest, "Write the run manifest here");

    CLI::App *bench = app.add_subcommand("bench", "Replicated experiment across schedulers");
    CommonFlags bench_flags;
    bench_flags.add(*bench);
    std::optional<std::vector<std::string>> algos;
    std::optional<std::size_t> replicates, jobs;
    std::string out_dir = default_out_dir();
    bool no_wall_time = false;
    bool no_logs = false;
    bench->add_option("--algos", algos, "Comma-separated algorithms; the first is the t-test reference")
        ->delimiter(',');
    bench->add_option("--replicates", replicates, "Independent runs per scheduler")->check(CLI::PositiveNumber);
    bench->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    bench->add_option("--out", out_dir, std::string("Output directory (default $") + out_dir_env + " or ./hpsogwo-out)");
    bench->add_flag("--no-wall-time", no_wall_time, "Write wall_ms as 0 so raw.csv is bit-reproducible");
    bench->add_flag("--no-convergence", no_logs, "Skip per-run convergence CSVs");

    CLI::App *trace = app.add_subcommand("trace", "Ingest a trace CSV and summarize it");
    std::string input;
    std::size_t limit = 800;
    double scale = 1000.0;
    std::optional<std::string> export_path;
    trace->add_option("--input", input, "Trace CSV (task_id,cpu_request,duration_s)")->required();
    trace->add_option("--limit", limit, "Maximum tasks to take")->check(CLI::PositiveNumber);
    trace->add_option("--scale", scale, "MI per core-second")->check(CLI::PositiveNumber);
    trace->add_option("--export", export_path, "Re-export the normalized workload as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return exit_usage;
    }

    try {
        if (schedule->parsed()) {
            Settings s;
            schedule_flags.apply(s);
            return cmd_schedule(s, algo, convergence_csv, schedule_manifest, out);
        }
        if (bench->parsed()) {
            Settings s;
            bench_flags.apply(s);
            if (algos) s.algos = *algos;
            if (replicates) s.replicates = *replicates;
            if (jobs) s.jobs = *jobs;
            if (no_wall_time) s.wall_time = false;
            return cmd_bench(s, out_dir, !no_logs, out);
        }
        return cmd_trace(input, limit, scale, export_path, out);
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime;
    }
}

} // namespace hpsogwo::cli
