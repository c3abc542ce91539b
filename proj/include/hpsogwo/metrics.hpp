#pragma once

#include "hpsogwo/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hpsogwo {

/// Per-VM load in seconds: the sum of ETC over the tasks mapped to each VM.
using LoadVector = std::vector<double>;

struct MetricsReport
{
    double makespan_s = 0.0;
    double throughput_tps = 0.0;
    double cv = 0.0;
    double boi = 0.0;
    double fitness = 0.0;
};

inline double makespan(const Timeline &timeline)
{
    if (timeline.empty())
        throw InvalidInput("empty schedule: makespan undefined");
    return *std::max_element(timeline.exit_s.begin(), timeline.exit_s.end());
}

inline double throughput(std::size_t task_count, double makespan_s)
{
    if (makespan_s == 0.0)
        throw InvalidInput("division by zero makespan");
    if (!(makespan_s > 0.0))
        throw InvalidInput("makespan must be positive");
    return static_cast<double>(task_count) / makespan_s;
}

inline LoadVector load_vector(const Assignment &assignment, const EtcMatrix &etc)
{
    if (assignment.size() == 0)
        throw InvalidInput("invalid assignment: empty");
    check_assignment(assignment, etc);
    LoadVector loads(etc.vms(), 0.0);
    for (std::size_t i = 0; i < assignment.size(); ++i)
        loads[assignment.vm_of[i]] += etc(i, assignment.vm_of[i]);
    return loads;
}

/// Population standard deviation of the loads over their mean.
inline double coefficient_of_variation(std::span<const double> loads)
{
    if (loads.empty())
        throw InvalidInput("undefined CV: no loads");
    double sum = 0.0;
    for (double l : loads)
        sum += l;
    const double mean = sum / static_cast<double>(loads.size());
    if (!(mean > 0.0))
        throw InvalidInput("undefined CV: mean load is zero");
    double ss = 0.0;
    for (double l : loads)
        ss += (l - mean) * (l - mean);
    return std::sqrt(ss / static_cast<double>(loads.size())) / mean;
}

inline double balance_optimality_index(double cv)
{
    if (!(cv >= 0.0))
        throw InvalidInput("balance index requires cv >= 0");
    return 1.0 / (1.0 + cv);
}

/// Makespan penalized by load imbalance: makespan + beta * (1 - boi).
inline double fitness(double makespan_s, double boi, double beta)
{
    if (!(makespan_s > 0.0))
        throw InvalidInput("fitness requires makespan > 0");
    if (!(boi > 0.0 && boi <= 1.0))
        throw InvalidInput("fitness requires 0 < boi <= 1");
    if (!(beta >= 0.0))
        throw InvalidInput("fitness requires beta >= 0");
    return makespan_s + beta * (1.0 - boi);
}

/// Default imbalance penalty weight: half the makespan of a perfectly
/// even split of the mean task, so the penalty is on the makespan's scale.
inline double default_beta(const EtcMatrix &etc)
{
    return 0.5 * etc.mean() * static_cast<double>(etc.tasks()) /
           static_cast<double>(etc.vms());
}

/// All metrics for a complete assignment. Makespan is taken as the largest
/// per-VM load, which equals the timeline's last exit time.
inline MetricsReport evaluate(const Assignment &assignment, const EtcMatrix &etc, double beta)
{
    const LoadVector loads = load_vector(assignment, etc);
    MetricsReport r;
    r.makespan_s = *std::max_element(loads.begin(), loads.end());
    r.throughput_tps = throughput(etc.tasks(), r.makespan_s);
    r.cv = coefficient_of_variation(loads);
    r.boi = balance_optimality_index(r.cv);
    r.fitness = fitness(r.makespan_s, r.boi, beta);
    return r;
}

} // namespace hpsogwo
