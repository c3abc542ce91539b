#pragma once

#include "hpsogwo/error.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hpsogwo {

/// One unit of work; length in million instructions (MI).
struct Task
{
    std::size_t id = 0;
    double length_mi = 0.0;
};

/// A virtual machine; capacity in million instructions per second.
struct VmSpec
{
    std::size_t id = 0;
    double mips = 0.0;
};

struct Workload
{
    std::vector<Task> tasks;
    std::string source_label = "synthetic";

    std::size_t size() const noexcept { return tasks.size(); }
    bool empty() const noexcept { return tasks.empty(); }
};

/// Builds a workload from raw lengths, assigning contiguous ids from 0.
inline Workload make_workload(std::span<const double> lengths_mi,
                              std::string source_label = "synthetic")
{
    Workload w;
    w.source_label = std::move(source_label);
    w.tasks.reserve(lengths_mi.size());
    for (std::size_t i = 0; i < lengths_mi.size(); ++i) {
        if (!(lengths_mi[i] > 0.0) || !std::isfinite(lengths_mi[i]))
            throw InvalidInput("task " + std::to_string(i) + ": length_mi must be positive and finite");
        w.tasks.push_back({i, lengths_mi[i]});
    }
    return w;
}

inline std::vector<VmSpec> make_fleet(std::span<const double> mips)
{
    std::vector<VmSpec> fleet;
    fleet.reserve(mips.size());
    for (std::size_t j = 0; j < mips.size(); ++j) {
        if (!(mips[j] > 0.0) || !std::isfinite(mips[j]))
            throw InvalidInput("vm " + std::to_string(j) + ": mips must be positive and finite");
        fleet.push_back({j, mips[j]});
    }
    return fleet;
}

/// Expected time to compute, in seconds, for every (task, VM) pair.
/// Stored row-major: one row per task.
class EtcMatrix
{
public:
    EtcMatrix() = default;

    EtcMatrix(std::size_t tasks, std::size_t vms, std::vector<double> entries)
        : n_(tasks), m_(vms), entries_(std::move(entries))
    {
        if (entries_.size() != n_ * m_)
            throw InvalidInput("etc: entry count does not match dimensions");
        for (double e : entries_)
            if (!(e > 0.0) || !std::isfinite(e))
                throw InvalidInput("etc: entries must be positive and finite");
    }

    std::size_t tasks() const noexcept { return n_; }
    std::size_t vms() const noexcept { return m_; }

    double operator()(std::size_t task, std::size_t vm) const noexcept
    {
        return entries_[task * m_ + vm];
    }

    std::span<const double> row(std::size_t task) const noexcept
    {
        return {entries_.data() + task * m_, m_};
    }

    /// Mean over all n*m entries.
    double mean() const noexcept
    {
        double s = 0.0;
        for (double e : entries_)
            s += e;
        return entries_.empty() ? 0.0 : s / static_cast<double>(entries_.size());
    }

private:
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    std::vector<double> entries_;
};

inline void check_fleet(std::span<const VmSpec> vms)
{
    if (vms.empty())
        throw InvalidInput("empty input: fleet has no VMs");
    for (std::size_t j = 0; j < vms.size(); ++j) {
        if (vms[j].id != j)
            throw InvalidInput("fleet ids must be contiguous from 0");
        if (!(vms[j].mips > 0.0) || !std::isfinite(vms[j].mips))
            throw InvalidInput("vm " + std::to_string(j) + ": mips must be positive");
    }
}

inline void check_workload(const Workload &workload)
{
    if (workload.empty())
        throw InvalidInput("empty input: workload has no tasks");
    for (std::size_t i = 0; i < workload.size(); ++i) {
        const Task &t = workload.tasks[i];
        if (t.id != i)
            throw InvalidInput("task ids must be contiguous from 0");
        if (!(t.length_mi > 0.0) || !std::isfinite(t.length_mi))
            throw InvalidInput("task " + std::to_string(i) + ": length_mi must be positive");
    }
}

inline EtcMatrix build_etc(const Workload &workload, std::span<const VmSpec> vms)
{
    check_workload(workload);
    check_fleet(vms);
    const std::size_t n = workload.size();
    const std::size_t m = vms.size();
    std::vector<double> entries(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            entries[i * m + j] = workload.tasks[i].length_mi / vms[j].mips;
    return EtcMatrix(n, m, std::move(entries));
}

/// Task-to-VM mapping: vm_of[i] is the VM index of task i.
struct Assignment
{
    std::vector<std::size_t> vm_of;

    std::size_t size() const noexcept { return vm_of.size(); }
    bool operator==(const Assignment &) const = default;
};

inline void check_assignment(const Assignment &assignment, const EtcMatrix &etc)
{
    if (assignment.size() != etc.tasks())
        throw InvalidInput("invalid assignment: length " + std::to_string(assignment.size()) +
                           " does not match task count " + std::to_string(etc.tasks()));
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment.vm_of[i] >= etc.vms())
            throw InvalidInput("invalid assignment: task " + std::to_string(i) + " references VM " +
                               std::to_string(assignment.vm_of[i]) + " but only " +
                               std::to_string(etc.vms()) + " exist");
}

/// Execution timeline under the sequential per-VM model: each VM runs its
/// tasks back to back in ascending task id, starting at t = 0.
struct Timeline
{
    std::vector<double> entry_s;
    std::vector<double> exit_s;
    std::vector<std::vector<std::size_t>> tasks_on_vm;

    std::size_t size() const noexcept { return entry_s.size(); }
    bool empty() const noexcept { return entry_s.empty(); }
};

inline Timeline build_timeline(const Assignment &assignment, const EtcMatrix &etc)
{
    check_assignment(assignment, etc);
    Timeline tl;
    tl.entry_s.resize(assignment.size());
    tl.exit_s.resize(assignment.size());
    tl.tasks_on_vm.resize(etc.vms());
    std::vector<double> ready(etc.vms(), 0.0);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        const std::size_t j = assignment.vm_of[i];
        tl.entry_s[i] = ready[j];
        ready[j] += etc(i, j);
        tl.exit_s[i] = ready[j];
        tl.tasks_on_vm[j].push_back(i);
    }
    return tl;
}

} // namespace hpsogwo
