#pragma once

#include "hpsogwo/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace hpsogwo {

/// Continuous particle coordinates, one per task.
using Position = std::vector<double>;

/// Coordinate bound for an m-VM problem; positions live in [-x_max, x_max].
inline double position_bound(std::size_t vm_count) noexcept
{
    return 10.0 * static_cast<double>(vm_count);
}

inline void clamp_position(std::span<double> position, double x_max) noexcept
{
    for (double &x : position)
        x = std::clamp(x, -x_max, x_max);
}

/// Headroom applied to each VM's proportional share of the total load.
struct CapacityPolicy
{
    double headroom_theta = 1.2;
};

/// floor(|x|) mod m.
inline std::size_t decode_coordinate(double x, std::size_t vm_count)
{
    if (!std::isfinite(x))
        throw InvalidInput("decode: non-finite coordinate");
    const double f = std::floor(std::fabs(x));
    // fmod keeps huge coordinates exact before the integer conversion
    return static_cast<std::size_t>(std::fmod(f, static_cast<double>(vm_count)));
}

inline Assignment decode_position(std::span<const double> position, std::size_t vm_count)
{
    if (vm_count == 0)
        throw InvalidInput("decode: vm count must be >= 1");
    Assignment a;
    a.vm_of.resize(position.size());
    for (std::size_t i = 0; i < position.size(); ++i)
        a.vm_of[i] = decode_coordinate(position[i], vm_count);
    return a;
}

/// Per-VM load ceilings: theta times VM j's share of the total work when
/// the work is split in proportion to speed. For ETC = length / mips that
/// share is total_mi / sum(mips) seconds on every VM; it is recovered from
/// the column sums as 1 / sum_j (1 / column_sum_j).
inline std::vector<double> capacity_thresholds(const EtcMatrix &etc, const CapacityPolicy &policy)
{
    if (!(policy.headroom_theta >= 1.0))
        throw InvalidInput("capacity policy: headroom_theta must be >= 1");
    const std::size_t m = etc.vms();
    std::vector<double> thresholds(m, std::numeric_limits<double>::infinity());
    if (etc.tasks() == 0)
        return thresholds;
    std::vector<double> column_sum(m, 0.0);
    for (std::size_t i = 0; i < etc.tasks(); ++i)
        for (std::size_t j = 0; j < m; ++j)
            column_sum[j] += etc(i, j);
    double inv_sum = 0.0;
    for (double c : column_sum)
        inv_sum += 1.0 / c;
    const double share = 1.0 / inv_sum;
    for (double &t : thresholds)
        t = policy.headroom_theta * share;
    return thresholds;
}

/// Decodes a position, then walks tasks in id order and reroutes any task
/// whose raw VM would exceed its threshold to the currently least-loaded VM
/// (ties to the lowest index). The reroute target is used even when it is
/// itself over threshold, so every task is always placed.
inline Assignment vm_aware_map(std::span<const double> position,
                               const EtcMatrix &etc,
                               std::span<const double> thresholds)
{
    const std::size_t m = etc.vms();
    if (position.size() != etc.tasks())
        throw InvalidInput("vm_aware_map: position length does not match task count");
    if (thresholds.size() != m)
        throw InvalidInput("vm_aware_map: threshold count does not match VM count");
    Assignment a = decode_position(position, m);
    std::vector<double> load(m, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::size_t j = a.vm_of[i];
        if (load[j] + etc(i, j) > thresholds[j]) {
            j = static_cast<std::size_t>(std::min_element(load.begin(), load.end()) - load.begin());
            a.vm_of[i] = j;
        }
        load[j] += etc(i, j);
    }
    return a;
}

inline Assignment vm_aware_map(std::span<const double> position,
                               const EtcMatrix &etc,
                               const CapacityPolicy &policy = {})
{
    const std::vector<double> thresholds = capacity_thresholds(etc, policy);
    return vm_aware_map(position, etc, thresholds);
}

} // namespace hpsogwo
