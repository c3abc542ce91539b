#pragma once

#include "hpsogwo/domain.hpp"
#include "hpsogwo/optimizer.hpp"
#include "hpsogwo/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace hpsogwo {

/// vm_of[i] = i mod m.
inline Assignment round_robin(const Workload &workload, std::span<const VmSpec> vms)
{
    check_workload(workload);
    check_fleet(vms);
    Assignment a;
    a.vm_of.resize(workload.size());
    for (std::size_t i = 0; i < workload.size(); ++i)
        a.vm_of[i] = i % vms.size();
    return a;
}

/// Each task to a uniformly drawn VM.
inline Assignment seeded_random(const Workload &workload, std::span<const VmSpec> vms, std::uint64_t seed)
{
    check_workload(workload);
    check_fleet(vms);
    Rng rng(mix64(seed));
    std::uniform_int_distribution<std::size_t> pick(0, vms.size() - 1);
    Assignment a;
    a.vm_of.resize(workload.size());
    for (std::size_t &j : a.vm_of)
        j = pick(rng);
    return a;
}

/// Classical Min-Min on completion time (VM ready time + ETC). Each round
/// finds every unscheduled task's best VM, then commits the task whose best
/// completion time is smallest. Ties go to the lower task id, then the
/// lower VM id.
inline Assignment min_min(const EtcMatrix &etc)
{
    const std::size_t n = etc.tasks();
    const std::size_t m = etc.vms();
    std::vector<double> ready(m, 0.0);
    std::vector<bool> done(n, false);
    Assignment a;
    a.vm_of.assign(n, 0);

    for (std::size_t round = 0; round < n; ++round) {
        std::size_t best_task = n;
        std::size_t best_vm = 0;
        double best_ct = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i])
                continue;
            std::size_t vm = 0;
            double ct = ready[0] + etc(i, 0);
            for (std::size_t j = 1; j < m; ++j) {
                const double c = ready[j] + etc(i, j);
                if (c < ct) {
                    ct = c;
                    vm = j;
                }
            }
            if (ct < best_ct) {
                best_ct = ct;
                best_task = i;
                best_vm = vm;
            }
        }
        done[best_task] = true;
        a.vm_of[best_task] = best_vm;
        ready[best_vm] = best_ct;
    }
    return a;
}

inline Assignment min_min(const Workload &workload, std::span<const VmSpec> vms)
{
    return min_min(build_etc(workload, vms));
}

/// Position whose plain decode reproduces `assignment`: x_i = vm_of[i] + 0.5.
inline Position encode_assignment(const Assignment &assignment)
{
    Position x(assignment.size());
    for (std::size_t i = 0; i < assignment.size(); ++i)
        x[i] = static_cast<double>(assignment.vm_of[i]) + 0.5;
    return x;
}

/// Hybrid search with particle 0 started on the Min-Min schedule.
inline RunResult minmin_seeded_hybrid(const EtcMatrix &etc, const OptimizerConfig &config)
{
    const Position seed = encode_assignment(min_min(etc));
    return run_on(etc, config, std::span<const Position>(&seed, 1));
}

inline RunResult minmin_seeded_hybrid(const Workload &workload,
                                      std::span<const VmSpec> vms,
                                      const OptimizerConfig &config)
{
    return minmin_seeded_hybrid(build_etc(workload, vms), config);
}

} // namespace hpsogwo
