#pragma once

#include "hpsogwo/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace hpsogwo {

struct Summary
{
    double mean = 0.0;
    double std = 0.0; ///< sample standard deviation (n - 1), 0 for n = 1
    double median = 0.0;
};

inline Summary summarize(std::span<const double> xs)
{
    if (xs.empty())
        throw InvalidInput("summarize: empty sample");
    Summary s;
    double sum = 0.0;
    for (double x : xs)
        sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs)
            ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t h = sorted.size() / 2;
    s.median = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
    return s;
}

namespace detail {

// Continued fraction for the incomplete beta function, modified Lentz.
inline double beta_continued_fraction(double a, double b, double x)
{
    constexpr int max_iter = 500;
    constexpr double eps = 1e-16;
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny)
        d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps)
            break;
    }
    return h;
}

} // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x)
{
    if (!(a > 0.0 && b > 0.0))
        throw InvalidInput("incomplete_beta: a and b must be positive");
    if (!(x >= 0.0 && x <= 1.0))
        throw InvalidInput("incomplete_beta: x must lie in [0, 1]");
    if (x == 0.0 || x == 1.0)
        return x;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    // The fraction converges fast for x < (a + 1) / (a + b + 2); use the
    // symmetry I_x(a, b) = 1 - I_{1-x}(b, a) otherwise.
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// Two-sided tail probability P(|T| >= |t|) for Student's t with df degrees
/// of freedom.
inline double student_t_two_sided_p(double t, double df)
{
    if (!(df > 0.0))
        throw InvalidInput("student_t: df must be positive");
    if (std::isinf(t))
        return 0.0;
    return std::clamp(incomplete_beta(0.5 * df, 0.5, df / (df + t * t)), 0.0, 1.0);
}

struct TTestResult
{
    double mean_difference = 0.0;
    double t_statistic = 0.0;
    std::size_t degrees_of_freedom = 0;
    double p_value = 1.0;
    bool significant_at_005 = false;
};

/// Paired two-sided t-test on d = a - b. When every difference is equal the
/// statistic is degenerate: p = 1 if that difference is 0, else p = 0 with
/// an infinite t carrying the sign of the difference.
inline TTestResult paired_t_test(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw InvalidInput("paired_t_test: samples differ in length");
    if (a.size() < 2)
        throw InvalidInput("paired_t_test: need at least 2 pairs");
    const std::size_t R = a.size();
    std::vector<double> d(R);
    for (std::size_t i = 0; i < R; ++i)
        d[i] = a[i] - b[i];
    double sum = 0.0;
    for (double x : d)
        sum += x;
    const double mean = sum / static_cast<double>(R);
    double ss = 0.0;
    for (double x : d)
        ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(R - 1));

    TTestResult r;
    r.mean_difference = mean;
    r.degrees_of_freedom = R - 1;
    // Floating noise in ss can leave a tiny sd for constant differences.
    const bool constant = std::all_of(d.begin(), d.end(), [&](double x) { return x == d[0]; });
    if (constant || sd == 0.0) {
        if (mean == 0.0) {
            r.t_statistic = 0.0;
            r.p_value = 1.0;
        } else {
            r.t_statistic = std::copysign(std::numeric_limits<double>::infinity(), mean);
            r.p_value = 0.0;
        }
    } else {
        r.t_statistic = mean / (sd / std::sqrt(static_cast<double>(R)));
        r.p_value = student_t_two_sided_p(r.t_statistic, static_cast<double>(r.degrees_of_freedom));
    }
    r.significant_at_005 = r.p_value < 0.05;
    return r;
}

} // namespace hpsogwo
