#include "fracheat/quadrature.hpp"

namespace fracheat::quad::detail {
namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

template <class Node>
DeTable build_table(double t_min, double t_max, Node&& make_node) {
    DeTable table;
    table.levels.resize(kMaxLevel + 1);
    for (int level = 0; level <= kMaxLevel; ++level) {
        const double h = std::ldexp(1.0, -level);
        const long step = level == 0 ? 1 : 2;
        const long first = level == 0 ? 1 : 1;
        for (long j = first; j * h <= std::max(-t_min, t_max); j += step) {
            const double t = j * h;
            if (t <= t_max) table.levels[level].push_back(make_node(t));
            if (-t >= t_min) table.levels[level].push_back(make_node(-t));
        }
    }
    return table;
}

}  // namespace

const DeTable& tanh_sinh_table() {
    static const DeTable table = [] {
        // Nodes are symmetric; only t > 0 is stored and mirrored at use.
        DeTable t = build_table(0.0, 6.1, [](double s) {
            const double u = kHalfPi * std::sinh(s);
            const double e = std::exp(-2.0 * u);
            const double offset = e / (1.0 + e);
            const double weight = kHalfPi * std::cosh(s) * 4.0 * e / ((1.0 + e) * (1.0 + e));
            return DeNode{offset, weight};
        });
        t.center_weight = kHalfPi;
        return t;
    }();
    return table;
}

const DeTable& exp_sinh_table() {
    static const DeTable table = [] {
        DeTable t = build_table(-6.7, 6.5, [](double s) {
            return DeNode{kHalfPi * std::sinh(s), kHalfPi * std::cosh(s)};
        });
        // t = 0 contributes at level 0.
        t.levels[0].push_back(DeNode{0.0, kHalfPi});
        return t;
    }();
    return table;
}

}  // namespace fracheat::quad::detail
