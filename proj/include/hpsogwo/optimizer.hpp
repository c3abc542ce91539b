#pragma once

#include "hpsogwo/domain.hpp"
#include "hpsogwo/encoding.hpp"
#include "hpsogwo/metrics.hpp"
#include "hpsogwo/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hpsogwo {

/// Which side of the combined update the blend weight multiplies.
enum class BlendOrdering
{
    /// lambda * X_gwo + (1 - lambda) * (X + V); GWO dominates early.
    GwoWeighted,
    /// lambda * (X + V) + (1 - lambda) * X_gwo; kept for ablation.
    PsoWeighted,
};

struct OptimizerConfig
{
    std::size_t swarm_size = 20;
    std::size_t max_iterations = 50;
    double lambda_max = 0.9;
    double lambda_min = 0.4;
    double inertia = 0.7;
    double c1 = 1.5;
    double c2 = 1.5;

    // Unset values are derived from the instance, see resolve().
    std::optional<double> v_max;
    std::optional<double> d_min;
    std::optional<double> mutation_sigma_scale;
    std::optional<double> beta;
    /// Initial positions are drawn from [0, init_span); default x_max.
    std::optional<double> init_span;

    /// Fixes the blend weight for every iteration (pure PSO / pure GWO).
    std::optional<double> lambda_pinned;
    bool diversity_control = true;
    BlendOrdering ordering = BlendOrdering::GwoWeighted;
    CapacityPolicy capacity;
    std::uint64_t seed = 0;
};

inline void validate(const OptimizerConfig &cfg)
{
    if (cfg.swarm_size < 2)
        throw InvalidInput("optimizer: swarm_size must be >= 2");
    if (cfg.max_iterations < 1)
        throw InvalidInput("optimizer: max_iterations must be >= 1");
    if (!(0.0 <= cfg.lambda_min && cfg.lambda_min <= cfg.lambda_max && cfg.lambda_max <= 1.0))
        throw InvalidInput("optimizer: require 0 <= lambda_min <= lambda_max <= 1");
    if (cfg.lambda_pinned && !(*cfg.lambda_pinned >= 0.0 && *cfg.lambda_pinned <= 1.0))
        throw InvalidInput("optimizer: pinned lambda must lie in [0, 1]");
    if (cfg.v_max && !(*cfg.v_max > 0.0))
        throw InvalidInput("optimizer: v_max must be > 0");
    if (cfg.d_min && !(*cfg.d_min >= 0.0))
        throw InvalidInput("optimizer: d_min must be >= 0");
    if (cfg.mutation_sigma_scale && !(*cfg.mutation_sigma_scale > 0.0))
        throw InvalidInput("optimizer: mutation_sigma_scale must be > 0");
    if (cfg.beta && !(*cfg.beta >= 0.0))
        throw InvalidInput("optimizer: beta must be >= 0");
    if (cfg.init_span && !(*cfg.init_span > 0.0))
        throw InvalidInput("optimizer: init_span must be > 0");
    if (!(cfg.capacity.headroom_theta >= 1.0))
        throw InvalidInput("optimizer: headroom_theta must be >= 1");
}

/// Instance-dependent parameters with every default materialized.
struct ResolvedParameters
{
    double x_max = 0.0;
    double v_max = 0.0;
    double d_min = 0.0;
    double mutation_sigma_scale = 0.0;
    double beta = 0.0;
    double init_span = 0.0;
};

inline ResolvedParameters resolve(const OptimizerConfig &cfg, const EtcMatrix &etc)
{
    const auto n = static_cast<double>(etc.tasks());
    const auto m = static_cast<double>(etc.vms());
    ResolvedParameters p;
    p.x_max = position_bound(etc.vms());
    p.v_max = cfg.v_max.value_or(p.x_max); // half the position range
    p.d_min = cfg.d_min.value_or(0.05 * m * std::sqrt(n));
    p.mutation_sigma_scale = cfg.mutation_sigma_scale.value_or(0.1 * m);
    p.beta = cfg.beta.value_or(default_beta(etc));
    p.init_span = std::min(cfg.init_span.value_or(p.x_max), p.x_max);
    return p;
}

// --------------------------------------------------------------------------
// schedules

/// Linear blend weight from lambda_max at t = 0 to lambda_min at t = I.
inline double blend_weight(std::size_t t, const OptimizerConfig &cfg)
{
    if (cfg.lambda_pinned)
        return *cfg.lambda_pinned;
    const double frac = static_cast<double>(t) / static_cast<double>(cfg.max_iterations);
    return cfg.lambda_max - (cfg.lambda_max - cfg.lambda_min) * frac;
}

/// GWO coefficient a, linear from 2 at t = 0 to 0 at t = I.
inline double gwo_coefficient_a(std::size_t t, const OptimizerConfig &cfg)
{
    return 2.0 * (1.0 - static_cast<double>(t) / static_cast<double>(cfg.max_iterations));
}

// --------------------------------------------------------------------------
// swarm types

struct Particle
{
    Position position;
    std::vector<double> velocity;
    Position best_position;
    double best_fitness = 0.0;
    double fitness = 0.0;
};

struct IterationRecord
{
    std::size_t iteration = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    double diversity = 0.0;
    double lambda = 0.0;
    double a = 0.0;
    bool mutated = false;

    bool operator==(const IterationRecord &) const = default;
};

using ConvergenceLog = std::vector<IterationRecord>;

/// CSV with header `iteration,best_fitness,mean_fitness,diversity,lambda,a,mutated`.
/// Reals are written with 17 significant digits so files compare bit-exactly.
inline void write_convergence_csv(std::ostream &out, const ConvergenceLog &log)
{
    out << "iteration,best_fitness,mean_fitness,diversity,lambda,a,mutated\n";
    const auto old_precision = out.precision(17);
    for (const IterationRecord &r : log)
        out << r.iteration << ',' << r.best_fitness << ',' << r.mean_fitness << ','
            << r.diversity << ',' << r.lambda << ',' << r.a << ',' << (r.mutated ? 1 : 0) << '\n';
    out.precision(old_precision);
}

struct SwarmState
{
    std::vector<Particle> particles;
    Position global_best_position;
    double global_best_fitness = 0.0;
    Assignment global_best_assignment;
    MetricsReport global_best_metrics;

    /// Indices of the alpha, beta and delta wolves: the particles with the
    /// three lowest personal-best fitnesses (ties to the lower index).
    std::array<std::size_t, 3> leaders{};

    std::size_t iteration = 0;
    ConvergenceLog log;

    /// One generator per particle plus one for mutation; fixed at
    /// initialization so replays are independent of evaluation order.
    std::vector<Rng> particle_rngs;
    Rng mutation_rng;

    const Position &alpha() const { return particles[leaders[0]].best_position; }
    const Position &beta_wolf() const { return particles[leaders[1]].best_position; }
    const Position &delta() const { return particles[leaders[2]].best_position; }
};

/// Everything a step needs about the instance, computed once per run.
struct SearchContext
{
    SearchContext(const EtcMatrix &etc_in, OptimizerConfig cfg)
        : etc(&etc_in), config(std::move(cfg))
    {
        validate(config);
        params = resolve(config, *etc);
        thresholds = capacity_thresholds(*etc, config.capacity);
    }

    const EtcMatrix *etc;
    OptimizerConfig config;
    ResolvedParameters params;
    std::vector<double> thresholds;
};

// --------------------------------------------------------------------------
// update rules
//
// The stochastic rules take a nullary callable returning Uniform[0, 1)
// draws so that tests can pin r1 / r2.

inline auto uniform_source(Rng &rng)
{
    return [&rng] { return uniform01(rng); };
}

/// w*V + c1*r1*(P - X) + c2*r2*(G - X) with fresh r1, r2 per component,
/// clamped to [-v_max, v_max].
template <class Uniform>
std::vector<double> velocity_update(const Particle &particle,
                                    std::span<const double> global_best,
                                    const OptimizerConfig &cfg,
                                    double v_max,
                                    Uniform &&draw)
{
    const std::size_t n = particle.position.size();
    if (particle.velocity.size() != n || particle.best_position.size() != n || global_best.size() != n)
        throw InvalidInput("velocity_update: vector lengths differ");
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double r1 = draw();
        const double r2 = draw();
        const double x = particle.position[k];
        const double raw = cfg.inertia * particle.velocity[k] +
                           cfg.c1 * r1 * (particle.best_position[k] - x) +
                           cfg.c2 * r2 * (global_best[k] - x);
        v[k] = std::clamp(raw, -v_max, v_max);
    }
    return v;
}

/// Mean of the three leader-guided points. Each leader gets its own
/// A = 2a*r1 - a and C = 2*r2 per component.
template <class Uniform>
Position gwo_guidance(std::span<const double> position,
                      std::span<const double> alpha,
                      std::span<const double> beta_wolf,
                      std::span<const double> delta,
                      double a,
                      Uniform &&draw)
{
    const std::size_t n = position.size();
    if (alpha.size() != n || beta_wolf.size() != n || delta.size() != n)
        throw InvalidInput("gwo_guidance: vector lengths differ");
    const std::array<std::span<const double>, 3> leaders{alpha, beta_wolf, delta};
    Position out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double sum = 0.0;
        for (const auto &leader : leaders) {
            const double A = 2.0 * a * draw() - a;
            const double C = 2.0 * draw();
            const double dist = std::fabs(C * leader[k] - position[k]);
            sum += leader[k] - A * dist;
        }
        out[k] = sum / 3.0;
    }
    return out;
}

/// Blends the GWO point with the PSO point X + V', then clamps to
/// [-x_max, x_max].
inline Position combined_update(std::span<const double> position,
                                std::span<const double> gwo_position,
                                double lambda,
                                std::span<const double> new_velocity,
                                double x_max,
                                BlendOrdering ordering = BlendOrdering::GwoWeighted)
{
    const std::size_t n = position.size();
    if (gwo_position.size() != n || new_velocity.size() != n)
        throw InvalidInput("combined_update: vector lengths differ");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw InvalidInput("combined_update: lambda must lie in [0, 1]");
    const double w_gwo = ordering == BlendOrdering::GwoWeighted ? lambda : 1.0 - lambda;
    const double w_pso = 1.0 - w_gwo;
    Position out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double pso = position[k] + new_velocity[k];
        // Pure endpoints return their operand exactly.
        if (w_gwo == 1.0)
            out[k] = gwo_position[k];
        else if (w_gwo == 0.0)
            out[k] = pso;
        else
            out[k] = w_gwo * gwo_position[k] + w_pso * pso;
    }
    clamp_position(out, x_max);
    return out;
}

/// Mean Euclidean distance over all unordered pairs of positions.
inline double swarm_diversity(std::span<const Position> positions)
{
    const std::size_t N = positions.size();
    if (N < 2)
        throw InvalidInput("diversity undefined: fewer than two particles");
    double total = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) {
            double ss = 0.0;
            for (std::size_t k = 0; k < positions[i].size(); ++k) {
                const double d = positions[i][k] - positions[j][k];
                ss += d * d;
            }
            total += std::sqrt(ss);
        }
    return 2.0 * total / (static_cast<double>(N) * static_cast<double>(N - 1));
}

inline double swarm_diversity(std::span<const Particle> particles)
{
    std::vector<Position> positions;
    positions.reserve(particles.size());
    for (const Particle &p : particles)
        positions.push_back(p.position);
    return swarm_diversity(std::span<const Position>(positions));
}

/// Mutation strength for diversity `d` under threshold `d_min`: grows as
/// the swarm collapses, never below 0.01 * m.
inline double mutation_sigma(double d, double d_min, double sigma_scale, std::size_t vm_count)
{
    const double depth = d_min > 0.0 ? std::clamp(1.0 - d / d_min, 0.0, 1.0) : 0.0;
    return std::max(sigma_scale * depth, 0.01 * static_cast<double>(vm_count));
}

/// Adds an independent N(0, sigma^2) draw to every coordinate, then clamps.
inline void inject_mutation(std::span<Particle> particles, double sigma, double x_max, Rng &rng)
{
    if (!(sigma > 0.0))
        throw InvalidInput("inject_mutation: sigma must be > 0");
    std::normal_distribution<double> noise(0.0, sigma);
    for (Particle &p : particles) {
        for (double &x : p.position)
            x += noise(rng);
        clamp_position(p.position, x_max);
    }
}

// --------------------------------------------------------------------------
// evaluation and the main loop

struct Evaluation
{
    Assignment assignment;
    MetricsReport metrics;
};

inline Evaluation evaluate_position(std::span<const double> position, const SearchContext &ctx)
{
    Evaluation e;
    e.assignment = vm_aware_map(position, *ctx.etc, ctx.thresholds);
    e.metrics = evaluate(e.assignment, *ctx.etc, ctx.params.beta);
    return e;
}

/// Plain decode without capacity rerouting.
inline Evaluation evaluate_decoded(std::span<const double> position, const SearchContext &ctx)
{
    Evaluation e;
    e.assignment = decode_position(position, ctx.etc->vms());
    e.metrics = evaluate(e.assignment, *ctx.etc, ctx.params.beta);
    return e;
}

inline void rank_leaders(SwarmState &state)
{
    std::vector<std::size_t> order(state.particles.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return state.particles[a].best_fitness < state.particles[b].best_fitness;
    });
    // With only two particles the delta wolf repeats the beta wolf.
    state.leaders = {order[0], order[1], order[std::min<std::size_t>(2, order.size() - 1)]};
}

/// Positions uniform in [0, init_span), zero velocities, personal bests at the
/// starting points. `seeded` positions, if any, replace the first particles
/// and are scored by plain decoding.
///
/// The default span x_max covers 10 full periods of the decode. Starting inside a
/// single period [0, m) makes the GWO leader average land mostly in the
/// middle VMs, which skews every guided particle.
inline SwarmState initialize_swarm(const SearchContext &ctx, std::span<const Position> seeded = {})
{
    const OptimizerConfig &cfg = ctx.config;
    const std::size_t n = ctx.etc->tasks();
    const double span = ctx.params.init_span;
    if (seeded.size() > cfg.swarm_size)
        throw InvalidInput("initialize_swarm: more seeded positions than particles");

    SwarmState s;
    s.particle_rngs.reserve(cfg.swarm_size);
    for (std::size_t i = 0; i < cfg.swarm_size; ++i)
        s.particle_rngs.push_back(make_substream(cfg.seed, i));
    s.mutation_rng = make_substream(cfg.seed, cfg.swarm_size);

    s.particles.resize(cfg.swarm_size);
    for (std::size_t i = 0; i < cfg.swarm_size; ++i) {
        Particle &p = s.particles[i];
        Rng &rng = s.particle_rngs[i];
        p.position.resize(n);
        for (double &x : p.position)
            x = span * uniform01(rng);
        if (i < seeded.size()) {
            if (seeded[i].size() != n)
                throw InvalidInput("initialize_swarm: seeded position has wrong length");
            p.position = seeded[i];
            clamp_position(p.position, ctx.params.x_max);
        }
        p.velocity.assign(n, 0.0);
        p.best_position = p.position;
        // A seeded position encodes a complete schedule; score it as given
        // so the global best can never be worse than the seed.
        Evaluation e = i < seeded.size() ? evaluate_decoded(p.position, ctx) : evaluate_position(p.position, ctx);
        p.fitness = e.metrics.fitness;
        p.best_fitness = p.fitness;
        if (i == 0 || p.fitness < s.global_best_fitness) {
            s.global_best_fitness = p.fitness;
            s.global_best_position = p.position;
            s.global_best_assignment = std::move(e.assignment);
            s.global_best_metrics = e.metrics;
        }
    }
    rank_leaders(s);
    return s;
}

/// One iteration: diversity check and optional mutation, then for each
/// particle GWO guidance, PSO velocity, blended move, VM-aware decoding,
/// evaluation and best updates; finally the leaders are re-ranked and a
/// log record is appended.
inline void step(SwarmState &state, const SearchContext &ctx)
{
    const OptimizerConfig &cfg = ctx.config;
    const ResolvedParameters &par = ctx.params;
    const std::size_t t = ++state.iteration;

    IterationRecord rec;
    rec.iteration = t;
    rec.diversity = swarm_diversity(std::span<const Particle>(state.particles));
    if (cfg.diversity_control && rec.diversity < par.d_min) {
        const double sigma = mutation_sigma(rec.diversity, par.d_min, par.mutation_sigma_scale, ctx.etc->vms());
        inject_mutation(state.particles, sigma, par.x_max, state.mutation_rng);
        rec.mutated = true;
    }

    const double a = gwo_coefficient_a(t, cfg);
    const double lambda = blend_weight(t, cfg);
    rec.a = a;
    rec.lambda = lambda;

    // Leaders are fixed for the whole sweep; the global best is not.
    const Position alpha = state.alpha();
    const Position beta_wolf = state.beta_wolf();
    const Position delta = state.delta();

    double fitness_sum = 0.0;
    for (std::size_t i = 0; i < state.particles.size(); ++i) {
        Particle &p = state.particles[i];
        auto draw = uniform_source(state.particle_rngs[i]);
        const Position guide = gwo_guidance(p.position, alpha, beta_wolf, delta, a, draw);
        std::vector<double> v = velocity_update(p, state.global_best_position, cfg, par.v_max, draw);
        p.position = combined_update(p.position, guide, lambda, v, par.x_max, cfg.ordering);
        p.velocity = std::move(v);

        Evaluation e = evaluate_position(p.position, ctx);
        p.fitness = e.metrics.fitness;
        fitness_sum += p.fitness;
        if (p.fitness < p.best_fitness) {
            p.best_fitness = p.fitness;
            p.best_position = p.position;
        }
        if (p.fitness < state.global_best_fitness) {
            state.global_best_fitness = p.fitness;
            state.global_best_position = p.position;
            state.global_best_assignment = std::move(e.assignment);
            state.global_best_metrics = e.metrics;
        }
    }
    rank_leaders(state);

    rec.best_fitness = state.global_best_fitness;
    rec.mean_fitness = fitness_sum / static_cast<double>(state.particles.size());
    state.log.push_back(rec);
}

struct RunResult
{
    Assignment assignment;
    MetricsReport metrics;
    ConvergenceLog log;
};

/// Full search on a prebuilt ETC matrix. `seeded` positions replace the
/// first random particles.
inline RunResult run_on(const EtcMatrix &etc, const OptimizerConfig &config,
                        std::span<const Position> seeded = {})
{
    const SearchContext ctx(etc, config);
    SwarmState state = initialize_swarm(ctx, seeded);
    for (std::size_t t = 0; t < config.max_iterations; ++t)
        step(state, ctx);
    return {std::move(state.global_best_assignment), state.global_best_metrics, std::move(state.log)};
}

inline RunResult run(const Workload &workload, std::span<const VmSpec> vms, const OptimizerConfig &config)
{
    return run_on(build_etc(workload, vms), config);
}

/// Pure PSO: blend weight pinned so positions move by X + V only.
inline OptimizerConfig pure_pso_config(OptimizerConfig config)
{
    config.lambda_pinned = config.ordering == BlendOrdering::GwoWeighted ? 0.0 : 1.0;
    config.diversity_control = false;
    return config;
}

/// Pure GWO: blend weight pinned so positions follow the leaders only.
inline OptimizerConfig pure_gwo_config(OptimizerConfig config)
{
    config.lambda_pinned = config.ordering == BlendOrdering::GwoWeighted ? 1.0 : 0.0;
    config.diversity_control = false;
    return config;
}

inline RunResult run_pure_pso(const Workload &workload, std::span<const VmSpec> vms, const OptimizerConfig &config)
{
    return run(workload, vms, pure_pso_config(config));
}

inline RunResult run_pure_gwo(const Workload &workload, std::span<const VmSpec> vms, const OptimizerConfig &config)
{
    return run(workload, vms, pure_gwo_config(config));
}

} // namespace hpsogwo
