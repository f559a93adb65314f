#pragma once

// Double-exponential and Gauss-Kronrod quadrature.
//
// The double-exponential rules tolerate integrable algebraic singularities at
// the interval ends; nodes that round onto an endpoint are skipped, so the
// integrand is never evaluated exactly at a singular end.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

namespace fracheat::quad {

struct Result {
    double value = 0.0;
    double error_estimate = 0.0;
    double l1_norm = 0.0;  // integral of |f|, used for relative tolerances
    int evaluations = 0;
    bool converged = false;
};

namespace detail {

struct DeNode {
    double offset;  // tanh-sinh: distance to the endpoint as a fraction of (b-a)
                    // exp-sinh: log of the distance to the left end
    double weight;
};

struct DeTable {
    double center_weight = 0.0;
    std::vector<std::vector<DeNode>> levels;  // level k adds the odd multiples of 2^-k
};

inline constexpr int kMaxLevel = 9;

const DeTable& tanh_sinh_table();
const DeTable& exp_sinh_table();

}  // namespace detail

/// Tanh-sinh rule on the finite interval [a, b].
template <class F>
Result tanh_sinh(F&& f, double a, double b, double rel_tol = 1e-13,
                 double abs_tol = 0.0, int max_level = detail::kMaxLevel) {
    Result out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    const auto& table = detail::tanh_sinh_table();
    const double len = b - a;
    const double half = 0.5 * len;
    max_level = std::clamp(max_level, 3, detail::kMaxLevel);

    double sum = 0.0;
    double abs_sum = 0.0;
    auto accumulate = [&](const detail::DeNode& node) {
        const double d = len * node.offset;
        const double xl = a + d;
        const double xr = b - d;
        if (xl != a && xl != b) {
            const double v = f(xl) * node.weight;
            sum += v;
            abs_sum += std::abs(v);
            ++out.evaluations;
        }
        if (xr != a && xr != b) {
            const double v = f(xr) * node.weight;
            sum += v;
            abs_sum += std::abs(v);
            ++out.evaluations;
        }
    };
    {
        const double v = f(a + half) * table.center_weight;
        sum += v;
        abs_sum += std::abs(v);
        ++out.evaluations;
    }
    for (const auto& node : table.levels[0]) accumulate(node);

    double h = 1.0;
    double previous = sum * h * half;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        for (const auto& node : table.levels[level]) accumulate(node);
        const double current = sum * h * half;
        out.value = current;
        out.l1_norm = abs_sum * h * std::abs(half);
        out.error_estimate = std::abs(current - previous);
        if (level >= 3 &&
            out.error_estimate <= std::max(rel_tol * out.l1_norm, abs_tol)) {
            out.converged = true;
            return out;
        }
        previous = current;
    }
    return out;
}

/// Exp-sinh rule on [a, inf). The integrand must decay at infinity.
template <class F>
Result exp_sinh(F&& f, double a, double rel_tol = 1e-13, double abs_tol = 0.0,
                int max_level = detail::kMaxLevel) {
    Result out;
    const auto& table = detail::exp_sinh_table();
    max_level = std::clamp(max_level, 3, detail::kMaxLevel);

    double sum = 0.0;
    double abs_sum = 0.0;
    auto accumulate = [&](const detail::DeNode& node) {
        const double d = std::exp(node.offset);
        const double x = a + d;
        if (x == a || !std::isfinite(x)) return;
        const double v = f(x) * node.weight * d;
        sum += v;
        abs_sum += std::abs(v);
        ++out.evaluations;
    };
    for (const auto& node : table.levels[0]) accumulate(node);

    double h = 1.0;
    double previous = sum * h;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        for (const auto& node : table.levels[level]) accumulate(node);
        const double current = sum * h;
        out.value = current;
        out.l1_norm = abs_sum * h;
        out.error_estimate = std::abs(current - previous);
        if (level >= 3 &&
            out.error_estimate <= std::max(rel_tol * out.l1_norm, abs_tol)) {
            out.converged = true;
            return out;
        }
        previous = current;
    }
    return out;
}

namespace detail {

// 7-point Gauss / 15-point Kronrod pair.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error, abs_value;
    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double result_k = fc * kWgk[7];
    double result_g = fc * kWg[3];
    double result_abs = std::abs(result_k);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        result_k += kWgk[j] * (f1 + f2);
        result_abs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) result_g += kWg[j / 2] * (f1 + f2);
    }
    return {a, b, result_k * half, std::abs((result_k - result_g) * half),
            result_abs * std::abs(half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (G7/K15) on [a, b] for smooth integrands.
template <class F>
Result gauss_kronrod(F&& f, double a, double b, double rel_tol = 1e-12,
                     double abs_tol = 0.0, int max_segments = 2000) {
    Result out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<detail::Segment> heap;
    heap.push(detail::gk15(f, a, b));
    out.evaluations = 15;
    double total = heap.top().value;
    double total_error = heap.top().error;
    double total_abs = heap.top().abs_value;
    int segments = 1;
    while (total_error > std::max(rel_tol * total_abs, abs_tol)) {
        if (segments >= max_segments) break;
        const detail::Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            heap.push(worst);
            break;
        }
        const auto left = detail::gk15(f, worst.a, mid);
        const auto right = detail::gk15(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        total_abs += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
        ++segments;
    }
    // Re-sum to shed the rounding accumulated by the running updates.
    total = 0.0;
    total_error = 0.0;
    total_abs = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        total_error += heap.top().error;
        total_abs += heap.top().abs_value;
        heap.pop();
    }
    out.value = total;
    out.error_estimate = total_error;
    out.l1_norm = total_abs;
    out.converged = total_error <= std::max(rel_tol * total_abs, abs_tol);
    return out;
}

}  // namespace fracheat::quad
