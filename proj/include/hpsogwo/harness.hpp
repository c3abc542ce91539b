#pragma once

#include "hpsogwo/baselines.hpp"
#include "hpsogwo/domain.hpp"
#include "hpsogwo/metrics.hpp"
#include "hpsogwo/optimizer.hpp"
#include "hpsogwo/rng.hpp"
#include "hpsogwo/stats.hpp"
#include "hpsogwo/workload.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace hpsogwo {

// --------------------------------------------------------------------------
// schedulers

enum class SchedulerKind
{
    Hybrid,
    PurePso,
    PureGwo,
    MinMin,
    RoundRobin,
    Random,
    MinMinHybrid,
};

struct SchedulerInfo
{
    SchedulerKind kind;
    std::string_view name;  ///< command-line / CSV key
    std::string_view label; ///< human-readable, marks in-house baselines
};

inline constexpr SchedulerInfo scheduler_table[] = {
    {SchedulerKind::Hybrid, "hybrid", "HybridPSOGWO"},
    {SchedulerKind::PurePso, "pso", "PSO (lambda pinned 0, in-house)"},
    {SchedulerKind::PureGwo, "gwo", "GWO (lambda pinned 1, in-house)"},
    {SchedulerKind::MinMin, "minmin", "Min-Min (in-house)"},
    {SchedulerKind::RoundRobin, "rr", "Round-robin (in-house)"},
    {SchedulerKind::Random, "random", "Seeded random (in-house)"},
    {SchedulerKind::MinMinHybrid, "minmin-hybrid", "Min-Min seeded hybrid (in-house)"},
};

inline const SchedulerInfo &scheduler_info(SchedulerKind kind)
{
    for (const SchedulerInfo &s : scheduler_table)
        if (s.kind == kind)
            return s;
    throw InvalidInput("unknown scheduler kind");
}

inline std::optional<SchedulerKind> parse_scheduler(std::string_view name)
{
    for (const SchedulerInfo &s : scheduler_table)
        if (s.name == name)
            return s.kind;
    return std::nullopt;
}

inline std::vector<std::string> scheduler_names()
{
    std::vector<std::string> names;
    for (const SchedulerInfo &s : scheduler_table)
        names.emplace_back(s.name);
    return names;
}

struct ScheduleOutcome
{
    Assignment assignment;
    MetricsReport metrics;
    ConvergenceLog log; ///< empty for non-iterative schedulers
};

/// Runs one scheduler. Non-iterative schedulers are scored with the same
/// fitness weight the optimizer would use, so fitness values compare.
inline ScheduleOutcome run_scheduler(SchedulerKind kind,
                                     const Workload &workload,
                                     std::span<const VmSpec> vms,
                                     const OptimizerConfig &config)
{
    const EtcMatrix etc = build_etc(workload, vms);
    const double beta = config.beta.value_or(default_beta(etc));
    auto score = [&](Assignment a) {
        ScheduleOutcome o;
        o.metrics = evaluate(a, etc, beta);
        o.assignment = std::move(a);
        return o;
    };
    auto from_run = [](RunResult r) {
        return ScheduleOutcome{std::move(r.assignment), r.metrics, std::move(r.log)};
    };
    switch (kind) {
    case SchedulerKind::Hybrid:
        return from_run(run_on(etc, config));
    case SchedulerKind::PurePso:
        return from_run(run_on(etc, pure_pso_config(config)));
    case SchedulerKind::PureGwo:
        return from_run(run_on(etc, pure_gwo_config(config)));
    case SchedulerKind::MinMinHybrid:
        return from_run(minmin_seeded_hybrid(etc, config));
    case SchedulerKind::MinMin:
        return score(min_min(etc));
    case SchedulerKind::RoundRobin:
        return score(round_robin(workload, vms));
    case SchedulerKind::Random:
        return score(seeded_random(workload, vms, config.seed));
    }
    throw InvalidInput("unknown scheduler kind");
}

// --------------------------------------------------------------------------
// plan

struct WorkloadSource
{
    /// When set, every replicate schedules this trace; otherwise each
    /// replicate draws a fresh synthetic workload.
    std::optional<std::filesystem::path> trace_path;
    TraceOptions trace;
    SyntheticSpec synthetic; ///< seed is ignored, replicates derive their own
};

struct ScoreWeights
{
    double makespan = 1.0 / 3.0;
    double throughput = 1.0 / 3.0;
    double cv = 1.0 / 3.0;
    double speed = 0.0; ///< mean wall time; excluded by default
};

struct ExperimentPlan
{
    WorkloadSource workload;
    std::size_t vm_count = 4;
    double vm_mips = 1000.0;
    std::vector<SchedulerKind> schedulers;
    std::size_t replicates = 30;
    std::uint64_t root_seed = 0;
    OptimizerConfig optimizer; ///< seed is overwritten per run
    ScoreWeights weights;
    std::size_t jobs = 1;
    bool record_wall_time = true;
};

inline void validate(const ExperimentPlan &plan)
{
    if (plan.replicates < 1)
        throw InvalidInput("plan: replicates must be >= 1");
    if (plan.schedulers.empty())
        throw InvalidInput("plan: at least one scheduler required");
    if (plan.schedulers.size() >= 0xffffffffULL || plan.replicates > 0xffffffffULL)
        throw InvalidInput("plan: too many schedulers or replicates");
    if (plan.vm_count < 1)
        throw InvalidInput("plan: vm_count must be >= 1");
    validate(plan.optimizer);
}

/// Seed for replicate r of the s-th scheduler in the plan. The key
/// (s << 32 | r) is unique per pair and substream_seed is injective in it.
constexpr std::uint64_t run_seed(std::uint64_t root, std::uint64_t scheduler_index, std::uint64_t replicate)
{
    return substream_seed(root, (scheduler_index << 32) | replicate);
}

/// Workload seed for replicate r; shares no key with any run_seed.
constexpr std::uint64_t workload_seed(std::uint64_t root, std::uint64_t replicate)
{
    return substream_seed(root, (0xffffffffULL << 32) | replicate);
}

// --------------------------------------------------------------------------
// results

struct RunRecord
{
    std::string scheduler;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    MetricsReport metrics;
    double wall_ms = 0.0;
    ConvergenceLog log;
};

struct SchedulerAggregate
{
    std::string scheduler;
    std::string label;
    Summary makespan_s;
    Summary throughput_tps;
    Summary cv;
    Summary boi;
    double mean_wall_ms = 0.0;
    double overall_score = 0.0;
};

struct Comparison
{
    std::string scheduler;
    std::string metric;
    TTestResult test;
};

struct ExperimentResult
{
    std::vector<RunRecord> records; ///< ordered by (scheduler, replicate)
    std::vector<SchedulerAggregate> aggregates;
    std::string reference; ///< scheduler the t-tests compare against
    std::vector<Comparison> ttests;
};

struct MetricMeans
{
    double makespan_s = 0.0;
    double throughput_tps = 0.0;
    double cv = 0.0;
    double wall_ms = 0.0;
};

/// Min-max normalizes each metric across schedulers and combines them:
/// lower makespan, CV and wall time are better, higher throughput is
/// better. A metric that is equal for every scheduler credits its full
/// weight to all of them. Scores are divided by the weight total so they
/// stay in [0, 1].
inline std::vector<double> overall_score(std::span<const MetricMeans> metrics, const ScoreWeights &w = {})
{
    if (metrics.size() < 2)
        throw InvalidInput("normalization undefined: need at least two schedulers");
    if (w.makespan < 0 || w.throughput < 0 || w.cv < 0 || w.speed < 0)
        throw InvalidInput("score weights must be non-negative");
    const double total = w.makespan + w.throughput + w.cv + w.speed;
    if (!(total > 0.0))
        throw InvalidInput("score weights must not all be zero");

    auto normalized = [&](auto field, bool higher_is_better) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const MetricMeans &m : metrics) {
            lo = std::min(lo, field(m));
            hi = std::max(hi, field(m));
        }
        std::vector<double> out;
        for (const MetricMeans &m : metrics) {
            if (hi == lo) {
                out.push_back(1.0);
                continue;
            }
            const double norm = (field(m) - lo) / (hi - lo);
            out.push_back(higher_is_better ? norm : 1.0 - norm);
        }
        return out;
    };
    const auto mk = normalized([](const MetricMeans &m) { return m.makespan_s; }, false);
    const auto tp = normalized([](const MetricMeans &m) { return m.throughput_tps; }, true);
    const auto cv = normalized([](const MetricMeans &m) { return m.cv; }, false);
    const auto sp = normalized([](const MetricMeans &m) { return m.wall_ms; }, false);

    std::vector<double> scores(metrics.size());
    for (std::size_t i = 0; i < metrics.size(); ++i)
        scores[i] = std::clamp((w.makespan * mk[i] + w.throughput * tp[i] + w.cv * cv[i] + w.speed * sp[i]) / total,
                               0.0, 1.0);
    return scores;
}

inline std::vector<SchedulerAggregate> aggregate(const ExperimentPlan &plan,
                                                 std::span<const RunRecord> records)
{
    const std::size_t R = plan.replicates;
    std::vector<SchedulerAggregate> out;
    std::vector<MetricMeans> means;
    for (std::size_t s = 0; s < plan.schedulers.size(); ++s) {
        const auto runs = records.subspan(s * R, R);
        std::vector<double> mk, tp, cv, boi;
        double wall = 0.0;
        for (const RunRecord &r : runs) {
            mk.push_back(r.metrics.makespan_s);
            tp.push_back(r.metrics.throughput_tps);
            cv.push_back(r.metrics.cv);
            boi.push_back(r.metrics.boi);
            wall += r.wall_ms;
        }
        SchedulerAggregate a;
        const SchedulerInfo &info = scheduler_info(plan.schedulers[s]);
        a.scheduler = std::string(info.name);
        a.label = std::string(info.label);
        a.makespan_s = summarize(mk);
        a.throughput_tps = summarize(tp);
        a.cv = summarize(cv);
        a.boi = summarize(boi);
        a.mean_wall_ms = wall / static_cast<double>(R);
        out.push_back(a);
        means.push_back({a.makespan_s.mean, a.throughput_tps.mean, a.cv.mean, a.mean_wall_ms});
    }
    if (out.size() >= 2) {
        const std::vector<double> scores = overall_score(means, plan.weights);
        for (std::size_t s = 0; s < out.size(); ++s)
            out[s].overall_score = scores[s];
    } else {
        out[0].overall_score = 1.0;
    }
    return out;
}

/// Paired t-tests of the first scheduler against each other one on
/// makespan, throughput and CV. Needs R >= 2.
inline std::vector<Comparison> compare_to_reference(const ExperimentPlan &plan,
                                                    std::span<const RunRecord> records)
{
    std::vector<Comparison> out;
    const std::size_t R = plan.replicates;
    if (R < 2 || plan.schedulers.size() < 2)
        return out;
    auto column = [&](std::size_t s, double MetricsReport::*field) {
        std::vector<double> v;
        for (const RunRecord &r : records.subspan(s * R, R))
            v.push_back(r.metrics.*field);
        return v;
    };
    const std::pair<const char *, double MetricsReport::*> metrics[] = {
        {"makespan_s", &MetricsReport::makespan_s},
        {"throughput_tps", &MetricsReport::throughput_tps},
        {"cv", &MetricsReport::cv},
    };
    for (std::size_t s = 1; s < plan.schedulers.size(); ++s)
        for (const auto &[name, field] : metrics)
            out.push_back({std::string(scheduler_info(plan.schedulers[s]).name), name,
                           paired_t_test(column(0, field), column(s, field))});
    return out;
}

/// Executes every (scheduler, replicate) run, on up to `plan.jobs` threads.
/// Records are stored by index, so the output does not depend on the
/// completion order.
inline ExperimentResult run_experiment(const ExperimentPlan &plan)
{
    validate(plan);
    const std::size_t S = plan.schedulers.size();
    const std::size_t R = plan.replicates;
    const std::vector<VmSpec> fleet = standard_fleet(plan.vm_count, plan.vm_mips);

    std::vector<Workload> workloads;
    if (plan.workload.trace_path) {
        workloads.push_back(ingest_trace(*plan.workload.trace_path, plan.workload.trace));
    } else {
        for (std::size_t r = 0; r < R; ++r) {
            SyntheticSpec spec = plan.workload.synthetic;
            spec.seed = workload_seed(plan.root_seed, r);
            workloads.push_back(generate_synthetic(spec));
        }
    }
    auto workload_for = [&](std::size_t r) -> const Workload & {
        return workloads.size() == 1 ? workloads[0] : workloads[r];
    };

    std::vector<RunRecord> records(S * R);
    auto execute = [&](std::size_t index) {
        const std::size_t s = index / R;
        const std::size_t r = index % R;
        OptimizerConfig cfg = plan.optimizer;
        cfg.seed = run_seed(plan.root_seed, s, r);
        const auto start = std::chrono::steady_clock::now();
        ScheduleOutcome o = run_scheduler(plan.schedulers[s], workload_for(r), fleet, cfg);
        const auto stop = std::chrono::steady_clock::now();
        RunRecord &rec = records[index];
        rec.scheduler = std::string(scheduler_info(plan.schedulers[s]).name);
        rec.replicate = r;
        rec.seed = cfg.seed;
        rec.metrics = o.metrics;
        rec.wall_ms = plan.record_wall_time
                          ? std::chrono::duration<double, std::milli>(stop - start).count()
                          : 0.0;
        rec.log = std::move(o.log);
    };

    const std::size_t jobs = std::clamp<std::size_t>(plan.jobs, 1, S * R);
    if (jobs == 1) {
        for (std::size_t i = 0; i < S * R; ++i)
            execute(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        {
            std::vector<std::jthread> workers;
            for (std::size_t w = 0; w < jobs; ++w)
                workers.emplace_back([&] {
                    for (std::size_t i = next++; i < S * R; i = next++) {
                        try {
                            execute(i);
                        } catch (...) {
                            std::lock_guard lock(failure_mutex);
                            if (!failure)
                                failure = std::current_exception();
                        }
                    }
                });
        }
        if (failure)
            std::rethrow_exception(failure);
    }

    ExperimentResult result;
    result.aggregates = aggregate(plan, records);
    result.reference = std::string(scheduler_info(plan.schedulers[0]).name);
    result.ttests = compare_to_reference(plan, records);
    result.records = std::move(records);
    return result;
}

// --------------------------------------------------------------------------
// reports

inline void write_raw_csv(std::ostream &out, std::span<const RunRecord> records)
{
    out << "scheduler,replicate,seed,makespan_s,throughput_tps,cv,boi,fitness,wall_ms\n";
    const auto old_precision = out.precision(17);
    for (const RunRecord &r : records)
        out << r.scheduler << ',' << r.replicate << ',' << r.seed << ',' << r.metrics.makespan_s << ','
            << r.metrics.throughput_tps << ',' << r.metrics.cv << ',' << r.metrics.boi << ','
            << r.metrics.fitness << ',' << r.wall_ms << '\n';
    out.precision(old_precision);
}

inline nlohmann::json to_json(const Summary &s)
{
    return {{"mean", s.mean}, {"std", s.std}, {"median", s.median}};
}

inline nlohmann::json to_json(const MetricsReport &m)
{
    return {{"makespan_s", m.makespan_s}, {"throughput_tps", m.throughput_tps},
            {"cv", m.cv}, {"boi", m.boi}, {"fitness", m.fitness}};
}

inline nlohmann::json to_json(const TTestResult &t)
{
    // JSON has no infinity; degenerate tests report t as null.
    nlohmann::json tstat = std::isfinite(t.t_statistic) ? nlohmann::json(t.t_statistic) : nlohmann::json();
    return {{"mean_difference", t.mean_difference}, {"t_statistic", tstat},
            {"degrees_of_freedom", t.degrees_of_freedom}, {"p_value", t.p_value},
            {"significant_at_005", t.significant_at_005}};
}

/// Stable schema "hpsogwo.aggregates/1".
inline nlohmann::json aggregates_json(const ExperimentPlan &plan, const ExperimentResult &result)
{
    nlohmann::json schedulers = nlohmann::json::array();
    for (const SchedulerAggregate &a : result.aggregates)
        schedulers.push_back({{"scheduler", a.scheduler}, {"label", a.label},
                              {"makespan_s", to_json(a.makespan_s)},
                              {"throughput_tps", to_json(a.throughput_tps)},
                              {"cv", to_json(a.cv)}, {"boi", to_json(a.boi)},
                              {"mean_wall_ms", a.mean_wall_ms}, {"overall_score", a.overall_score}});
    return {{"schema", "hpsogwo.aggregates/1"},
            {"replicates", plan.replicates},
            {"score_weights", {{"makespan", plan.weights.makespan}, {"throughput", plan.weights.throughput},
                               {"cv", plan.weights.cv}, {"speed", plan.weights.speed}}},
            {"schedulers", schedulers}};
}

/// Stable schema "hpsogwo.ttests/1".
inline nlohmann::json ttests_json(const ExperimentResult &result)
{
    nlohmann::json comparisons = nlohmann::json::array();
    for (const Comparison &c : result.ttests) {
        nlohmann::json j = to_json(c.test);
        j["scheduler"] = c.scheduler;
        j["metric"] = c.metric;
        comparisons.push_back(j);
    }
    return {{"schema", "hpsogwo.ttests/1"},
            {"reference", result.reference},
            {"alpha", 0.05},
            {"sided", "two"},
            {"comparisons", comparisons}};
}

} // namespace hpsogwo
