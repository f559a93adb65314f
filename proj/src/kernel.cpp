#include "fracheat/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fracheat/errors.hpp"
#include "fracheat/specfun.hpp"

namespace fracheat::kernel {

namespace {

constexpr double kTailExponent = 20.0;
constexpr double kMinSpread = 1e-6;

void check_time(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("time must be positive");
}

double wright_tail_radius(double alpha) {
    const double nu = 0.5 * alpha;
    const double c = (1.0 - nu) * std::pow(nu, nu / (1.0 - nu));
    return std::pow(kTailExponent / c, 1.0 - nu);
}

}  // namespace

void EquationSpec::validate() const {
    if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0, 2)");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive");
    if (!std::isfinite(sigma)) throw DomainError("sigma must be finite");
    if (d < 1) throw DomainError("d must be a positive integer");
}

double lambda_kernel(const EquationSpec& spec, double t, double y_norm_sq) {
    spec.validate();
    check_time(t);
    if (!(y_norm_sq >= 0.0)) throw DomainError("|y|^2 must be non-negative");
    const double ta = std::pow(t, spec.alpha);
    return std::pow(t, spec.alpha - 1.0) *
           specfun::mittag_leffler({spec.alpha, spec.alpha}, -spec.lambda * ta * y_norm_sq);
}

double spreading_length(const EquationSpec& spec, double t) {
    spec.validate();
    check_time(t);
    return std::sqrt(spec.lambda) * std::max(std::pow(t, 0.5 * spec.alpha), std::sqrt(t));
}

double default_half_width(const EquationSpec& spec, double t) {
    return std::max(8.0, wright_tail_radius(spec.alpha)) * spreading_length(spec, t);
}

transforms::SpectralGrid default_grid(const EquationSpec& spec, double t, int points_per_axis) {
    if (points_per_axis <= 0) points_per_axis = transforms::SpectralGrid::default_points_per_axis(spec.d);
    return transforms::SpectralGrid::for_spatial_half_width(spec.d, default_half_width(spec, t),
                                                            points_per_axis);
}

double KernelField::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double KernelField::boundary_max() const {
    if (n == 0) return 0.0;
    const int d = spec.d;
    double m = 0.0;
    for (std::size_t flat = 0; flat < values.size(); ++flat) {
        std::size_t rest = flat;
        bool edge = false;
        for (int axis = 0; axis < d; ++axis) {
            const auto idx = static_cast<int>(rest % static_cast<std::size_t>(n));
            rest /= static_cast<std::size_t>(n);
            if (idx == 0 || idx == n - 1) edge = true;
        }
        if (edge) m = std::max(m, std::abs(values[flat]));
    }
    return m;
}

transforms::FourierOptions default_fourier_options() {
    transforms::FourierOptions o;
    o.taper = true;
    return o;
}

namespace {

transforms::RadialSymbol i1_symbol(const EquationSpec& spec, double t,
                                   const specfun::MittagLefflerTable& table) {
    const double scale = spec.lambda * std::pow(t, spec.alpha);
    return [&table, scale](double r) { return table(-scale * r); };
}

void check_spread(const EquationSpec& spec, double t, const transforms::SpectralGrid& grid) {
    spec.validate();
    check_time(t);
    if (grid.d != spec.d) throw DomainError("grid dimension differs from the equation dimension");
    grid.validate();
    if (spreading_length(spec, t) < kMinSpread * grid.spatial_half_width())
        throw DomainError("t = " + std::to_string(t) +
                          " is too small to resolve the initial point mass on this lattice");
}

}  // namespace

KernelField i1_field(const EquationSpec& spec, double t, const transforms::SpectralGrid& grid,
                     const transforms::FourierOptions& options) {
    check_spread(spec, t, grid);
    const specfun::MittagLefflerTable table({spec.alpha, 1.0});
    auto lattice = transforms::inverse_fourier_lattice(i1_symbol(spec, t, table), grid, options);
    KernelField out;
    out.spec = spec;
    out.t = t;
    out.n = lattice.n;
    out.dx = lattice.dx;
    out.values = std::move(lattice.values);
    out.truncation_report = lattice.diagnostics;
    return out;
}

transforms::PointValues i1_points(const EquationSpec& spec, double t,
                                  const transforms::SpectralGrid& grid,
                                  const std::vector<transforms::Point>& x_points,
                                  const transforms::FourierOptions& options) {
    check_spread(spec, t, grid);
    const specfun::MittagLefflerTable table({spec.alpha, 1.0});
    return transforms::inverse_fourier_field(i1_symbol(spec, t, table), grid, x_points, options);
}

double classical_kernel(const EquationSpec& spec, double t, const transforms::Point& x) {
    spec.validate();
    check_time(t);
    if (spec.alpha != 1.0) throw DomainError("classical kernel requires alpha = 1");
    if (static_cast<int>(x.size()) != spec.d) throw DomainError("point dimension differs from d");
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    const double a = 4.0 * spec.lambda * t;
    return std::pow(std::numbers::pi * a, -0.5 * spec.d) * std::exp(-r2 / a);
}

double mass_integral(const KernelField& field) {
    const double edge = field.boundary_max();
    if (edge > kBoundaryTolerance)
        throw DomainTooSmallError("field has not decayed at the lattice boundary (|value| = " +
                                  std::to_string(edge) + ")");
    double sum = 0.0;
    for (double v : field.values) sum += v;
    return sum * std::pow(field.dx, field.spec.d);
}

}  // namespace fracheat::kernel
