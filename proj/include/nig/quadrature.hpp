#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
// The interval with the largest embedded error estimate is bisected until
// the summed estimate meets the tolerance or the subdivision cap is hit.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

namespace nig {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    std::size_t max_subdivisions = 1'000'000;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t intervals = 0;
    bool converged = false;
};

namespace detail {

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
Panel gauss_kronrod_15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[j] * pair;
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
    }
    return {a, b, kronrod * half, std::fabs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Seeds the work queue with one panel per consecutive pair of breakpoints.
template <class F>
QuadratureResult integrate(F&& f, const std::vector<double>& breakpoints, const QuadratureOptions& opts = {}) {
    std::priority_queue<detail::Panel> work;
    double total = 0.0;
    double total_err = 0.0;
    std::vector<detail::Panel> settled;
    std::size_t intervals = 0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const detail::Panel p = detail::gauss_kronrod_15(f, breakpoints[i], breakpoints[i + 1]);
        total += p.value;
        total_err += p.error;
        work.push(p);
        ++intervals;
    }

    auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::fabs(total)); };

    while (total_err > target() && !work.empty() && intervals < opts.max_subdivisions) {
        const detail::Panel worst = work.top();
        work.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) < 1e-14 * (std::fabs(worst.a) + std::fabs(worst.b))) {
            settled.push_back(worst);
            continue;
        }
        const detail::Panel left = detail::gauss_kronrod_15(f, worst.a, mid);
        const detail::Panel right = detail::gauss_kronrod_15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        work.push(left);
        work.push(right);
        ++intervals;
    }

    // Re-add from scratch to shed drift accumulated by the running updates.
    QuadratureResult out;
    out.intervals = intervals;
    double sum = 0.0;
    double comp = 0.0;
    double err = 0.0;
    auto add = [&](const detail::Panel& p) {
        const double y = p.value - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        err += p.error;
    };
    for (const auto& p : settled) add(p);
    while (!work.empty()) {
        add(work.top());
        work.pop();
    }
    out.value = sum;
    out.abs_error = err;
    out.converged = err <= std::max(opts.abs_tol, opts.rel_tol * std::fabs(sum));
    return out;
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    return integrate(f, std::vector<double>{a, b}, opts);
}

}  // namespace nig
