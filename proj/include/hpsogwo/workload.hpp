#pragma once

#include "hpsogwo/domain.hpp"
#include "hpsogwo/error.hpp"
#include "hpsogwo/rng.hpp"

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace hpsogwo {

struct SyntheticSpec
{
    std::size_t n = 800;
    double min_length_mi = 100.0;
    double max_length_mi = 1000.0;
    std::uint64_t seed = 0;
};

/// n task lengths drawn uniformly from [min, max].
inline Workload generate_synthetic(const SyntheticSpec &spec)
{
    if (spec.n < 1)
        throw InvalidInput("synthetic: n must be >= 1");
    if (!(spec.min_length_mi > 0.0) || !(spec.min_length_mi <= spec.max_length_mi) ||
        !std::isfinite(spec.max_length_mi))
        throw InvalidInput("synthetic: require 0 < min_length_mi <= max_length_mi");
    Rng rng(mix64(spec.seed));
    std::uniform_real_distribution<double> length(spec.min_length_mi, spec.max_length_mi);
    std::vector<double> lengths(spec.n);
    for (double &l : lengths) {
        l = spec.min_length_mi == spec.max_length_mi ? spec.min_length_mi : length(rng);
        // uniform_real_distribution may round up to the open upper end
        if (l > spec.max_length_mi)
            l = spec.max_length_mi;
    }
    return make_workload(lengths, "synthetic");
}

/// m VMs at 1000 MIPS each.
inline std::vector<VmSpec> standard_fleet(std::size_t m, double mips = 1000.0)
{
    if (m == 0)
        throw InvalidInput("standard_fleet: m must be >= 1");
    return make_fleet(std::vector<double>(m, mips));
}

// --------------------------------------------------------------------------
// Trace CSV: header `task_id,cpu_request,duration_s`, one record per line.
// cpu_request is the normalized core request in (0, 1]; length_mi is
// cpu_request * duration_s * mi_per_core_second.

struct TraceRecord
{
    std::string task_id;
    double cpu_request = 0.0;
    double duration_s = 0.0;
};

struct TraceOptions
{
    std::size_t limit = 800;
    double mi_per_core_second = 1000.0;
};

inline constexpr std::string_view trace_header = "task_id,cpu_request,duration_s";

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline bool parse_real(std::string_view s, double &out)
{
    s = trim(s);
    if (s.empty())
        return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

} // namespace detail

/// Parses one data line; throws ParseError on a malformed row.
inline TraceRecord parse_trace_row(std::string_view line, std::size_t row, std::size_t line_no)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(detail::trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    if (fields.size() != 3)
        throw ParseError(row, line_no, "expected 3 fields, found " + std::to_string(fields.size()));
    TraceRecord r;
    r.task_id = std::string(fields[0]);
    if (r.task_id.empty())
        throw ParseError(row, line_no, "empty task_id");
    if (!detail::parse_real(fields[1], r.cpu_request))
        throw ParseError(row, line_no, "cpu_request is not a number: '" + std::string(fields[1]) + "'");
    if (!detail::parse_real(fields[2], r.duration_s))
        throw ParseError(row, line_no, "duration_s is not a number: '" + std::string(fields[2]) + "'");
    return r;
}

/// Records outside cpu_request in (0, 1] or with non-positive duration are
/// skipped rather than rejected; real traces contain such rows.
inline bool usable(const TraceRecord &r)
{
    return r.cpu_request > 0.0 && r.cpu_request <= 1.0 && r.duration_s > 0.0;
}

/// Reads up to `limit` usable records. Stops at the limit, so rows past it
/// are never inspected.
inline Workload ingest_trace(std::istream &in, const TraceOptions &options = {})
{
    if (options.limit < 1)
        throw InvalidInput("trace: limit must be >= 1");
    if (!(options.mi_per_core_second > 0.0))
        throw InvalidInput("trace: mi_per_core_second must be > 0");

    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (!have_header && std::getline(in, line)) {
        ++line_no;
        const std::string_view t = detail::trim(line);
        if (t.empty())
            continue;
        if (t != trace_header)
            throw ParseError(0, line_no, "expected header '" + std::string(trace_header) + "'");
        have_header = true;
    }
    if (!have_header)
        throw InvalidInput("empty trace: no header");

    std::vector<double> lengths;
    std::size_t row = 0;
    while (lengths.size() < options.limit && std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty())
            continue;
        ++row;
        const TraceRecord r = parse_trace_row(line, row, line_no);
        if (usable(r))
            lengths.push_back(r.cpu_request * r.duration_s * options.mi_per_core_second);
    }
    if (lengths.empty())
        throw InvalidInput("empty trace: no usable records");
    return make_workload(lengths, "trace");
}

inline Workload ingest_trace(const std::filesystem::path &path, const TraceOptions &options = {})
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open trace file '" + path.string() + "'");
    return ingest_trace(in, options);
}

/// Writes a workload in trace form: cpu_request 1 and duration equal to the
/// length in core-seconds, so ingest_trace with the same scale reads it back.
inline void export_trace(std::ostream &out, const Workload &workload, double mi_per_core_second = 1000.0)
{
    out << trace_header << '\n';
    const auto old_precision = out.precision(17);
    for (const Task &t : workload.tasks)
        out << "task-" << t.id << ",1," << t.length_mi / mi_per_core_second << '\n';
    out.precision(old_precision);
}

} // namespace hpsogwo
