#include "fracheat/transforms.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include "fracheat/caputo.hpp"
#include "fracheat/errors.hpp"
#include "fracheat/quadrature.hpp"
#include "fftw_lock.hpp"

namespace fracheat::detail {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace fracheat::detail

namespace fracheat::transforms {
namespace {

constexpr double kPi = std::numbers::pi;

std::mutex& planner_mutex() { return detail::fftw_planner_mutex(); }

constexpr double kCaputoLaplaceTol = 1e-10;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Smooth step: 1 on [0, 1/2], 0 on [1, inf), C-infinity in between.
double taper_window(double rho_over_r) {
    const double u = 2.0 * rho_over_r - 1.0;
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    const double p = std::exp(-1.0 / u);
    const double q = std::exp(-1.0 / (1.0 - u));
    return q / (p + q);
}

// Symbol values on the integer lattice y = k dy, indexed by |k|^2. Radial
// symbols are evaluated once per distinct radius.
class RadialTable {
public:
    RadialTable(const RadialSymbol& g, const SpectralGrid& grid, const FourierOptions& options)
        : g_(g), dy_(grid.dy()), cutoff_(grid.cutoff), taper_(options.taper) {}

    double operator()(long key) {
        if (static_cast<std::size_t>(key) >= cache_.size())
            cache_.resize(static_cast<std::size_t>(key) + 1, std::numeric_limits<double>::quiet_NaN());
        double& v = cache_[static_cast<std::size_t>(key)];
        if (std::isnan(v)) v = evaluate(key);
        return v;
    }

    double evaluate(long key) const {
        const double r = static_cast<double>(key) * dy_ * dy_;
        double v = g_(r);
        if (taper_) v *= taper_window(std::sqrt(r) / cutoff_);
        if (!std::isfinite(v))
            throw DomainError("radial symbol is not finite at |y|^2=" + std::to_string(r));
        return v;
    }

private:
    const RadialSymbol& g_;
    double dy_;
    double cutoff_;
    bool taper_;
    std::vector<double> cache_;
};

FourierDiagnostics boundary_diagnostics(const RadialSymbol& g, const SpectralGrid& grid,
                                        const FourierOptions& options) {
    FourierDiagnostics diag;
    diag.boundary_symbol = std::abs(g(grid.cutoff * grid.cutoff));
    diag.truncated = diag.boundary_symbol > options.truncation_threshold;
    return diag;
}

}  // namespace

void SpectralGrid::validate(std::size_t memory_budget) const {
    if (d < 1 || d > 3) throw DomainError("spectral grid dimension must be 1, 2 or 3");
    if (!(cutoff > 0.0) || !std::isfinite(cutoff))
        throw DomainError("spectral grid cutoff must be positive");
    if (points_per_axis < 64 || !is_power_of_two(points_per_axis))
        throw DomainError("points_per_axis must be a power of two >= 64, got " +
                          std::to_string(points_per_axis));
    const double bytes = std::pow(static_cast<double>(points_per_axis), d) * sizeof(fftw_complex);
    if (bytes > static_cast<double>(memory_budget))
        throw DomainError("spectral grid needs " + std::to_string(bytes) +
                          " bytes, above the memory budget of " + std::to_string(memory_budget));
}

double SpectralGrid::dx() const { return kPi / cutoff; }

double SpectralGrid::spatial_half_width() const { return points_per_axis * kPi / (2.0 * cutoff); }

std::size_t SpectralGrid::total_points() const {
    std::size_t n = 1;
    for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(points_per_axis);
    return n;
}

int SpectralGrid::default_points_per_axis(int d) {
    switch (d) {
        case 1: return 1024;
        case 2: return 512;
        case 3: return 128;
        default: throw DomainError("spectral grid dimension must be 1, 2 or 3");
    }
}

SpectralGrid SpectralGrid::for_spatial_half_width(int d, double half_width, int points_per_axis) {
    if (!(half_width > 0.0)) throw DomainError("spatial half-width must be positive");
    SpectralGrid grid{d, points_per_axis * kPi / (2.0 * half_width), points_per_axis};
    grid.validate();
    return grid;
}

LatticeField inverse_fourier_lattice(const RadialSymbol& g, const SpectralGrid& grid,
                                     const FourierOptions& options) {
    grid.validate();
    const int n = grid.points_per_axis;
    const int d = grid.d;
    const std::size_t total = grid.total_points();

    fftw_complex* data = fftw_alloc_complex(total);
    if (!data) throw std::bad_alloc();
    std::vector<int> dims(static_cast<std::size_t>(d), n);
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft(d, dims.data(), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    // Frequency k (in units of dy) sits at array index k mod n, so output
    // index q mod n is the spatial point q dx directly.
    RadialTable table(g, grid, options);
    auto wrapped = [n](std::size_t idx) {
        const long k = static_cast<long>(idx);
        return k < n / 2 ? k : k - n;
    };
    for (std::size_t flat = 0; flat < total; ++flat) {
        long key = 0;
        std::size_t rest = flat;
        for (int axis = 0; axis < d; ++axis) {
            const long k = wrapped(rest % static_cast<std::size_t>(n));
            rest /= static_cast<std::size_t>(n);
            key += k * k;
        }
        data[flat][0] = d == 1 ? table.evaluate(key) : table(key);
        data[flat][1] = 0.0;
    }
    fftw_execute(plan);

    LatticeField field;
    field.d = d;
    field.n = n;
    field.dx = grid.dx();
    field.values.resize(total);
    field.diagnostics = boundary_diagnostics(g, grid, options);
    const double scale = std::pow(grid.dy() / (2.0 * kPi), d);
    double max_imag = 0.0;
    // Output position m (x = (m - n/2) dx) reads FFT index (m + n/2) mod n.
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t src = 0;
        std::size_t stride = 1;
        std::size_t rest = flat;
        for (int axis = 0; axis < d; ++axis) {
            const std::size_t m = rest % static_cast<std::size_t>(n);
            rest /= static_cast<std::size_t>(n);
            src += ((m + static_cast<std::size_t>(n / 2)) % static_cast<std::size_t>(n)) * stride;
            stride *= static_cast<std::size_t>(n);
        }
        field.values[flat] = scale * data[src][0];
        max_imag = std::max(max_imag, std::abs(scale * data[src][1]));
    }
    field.diagnostics.max_imag = max_imag;

    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(data);
    return field;
}

PointValues inverse_fourier_field(const RadialSymbol& g, const SpectralGrid& grid,
                                  const std::vector<Point>& x_points,
                                  const FourierOptions& options) {
    grid.validate();
    const int n = grid.points_per_axis;
    const int d = grid.d;
    const double dy = grid.dy();
    const double window = grid.spatial_half_width();
    for (const auto& x : x_points) {
        if (static_cast<int>(x.size()) != d)
            throw DomainError("evaluation point has the wrong dimension");
        for (double c : x)
            if (!(std::abs(c) <= window))
                throw AliasingError("point coordinate " + std::to_string(c) +
                                    " lies outside the periodic window of half-width " +
                                    std::to_string(window) + "; refine dy = 2R/N");
    }

    // Closed trapezoidal rule on [-R, R]: n + 1 nodes per axis, halved ends.
    const int m = n + 1;
    std::vector<double> weights(static_cast<std::size_t>(m), 1.0);
    weights.front() = weights.back() = 0.5;
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(m);
    std::vector<double> symbol(total);
    RadialTable table(g, grid, options);
    for (std::size_t flat = 0; flat < total; ++flat) {
        long key = 0;
        double w = 1.0;
        std::size_t rest = flat;
        for (int axis = 0; axis < d; ++axis) {
            const auto j = rest % static_cast<std::size_t>(m);
            rest /= static_cast<std::size_t>(m);
            const long k = static_cast<long>(j) - n / 2;
            key += k * k;
            w *= weights[j];
        }
        symbol[flat] = w * (d == 1 ? table.evaluate(key) : table(key));
    }

    PointValues out;
    out.diagnostics = boundary_diagnostics(g, grid, options);
    const double scale = std::pow(dy / (2.0 * kPi), d);
    std::vector<std::vector<std::complex<double>>> phase(static_cast<std::size_t>(d),
                                                        std::vector<std::complex<double>>(m));
    for (const auto& x : x_points) {
        for (int axis = 0; axis < d; ++axis)
            for (int j = 0; j < m; ++j)
                phase[axis][j] = std::polar(1.0, x[axis] * (j - n / 2) * dy);
        std::complex<double> sum = 0.0;
        if (d == 1) {
            for (int j = 0; j < m; ++j) sum += symbol[j] * phase[0][j];
        } else if (d == 2) {
            for (int j1 = 0; j1 < m; ++j1) {
                std::complex<double> inner = 0.0;
                const double* row = &symbol[static_cast<std::size_t>(j1) * m];
                for (int j0 = 0; j0 < m; ++j0) inner += row[j0] * phase[0][j0];
                sum += inner * phase[1][j1];
            }
        } else {
            for (int j2 = 0; j2 < m; ++j2)
                for (int j1 = 0; j1 < m; ++j1) {
                    std::complex<double> inner = 0.0;
                    const double* row =
                        &symbol[(static_cast<std::size_t>(j2) * m + j1) * m];
                    for (int j0 = 0; j0 < m; ++j0) inner += row[j0] * phase[0][j0];
                    sum += inner * phase[1][j1] * phase[2][j2];
                }
        }
        out.values.push_back(scale * sum.real());
        out.diagnostics.max_imag = std::max(out.diagnostics.max_imag, std::abs(scale * sum.imag()));
    }
    return out;
}

double decay_cutoff(const RadialSymbol& g, double threshold, double r_start) {
    if (!(threshold > 0.0)) throw DomainError("decay threshold must be positive");
    if (!(r_start > 0.0)) throw DomainError("decay_cutoff needs a positive starting radius");
    auto passes = [&](double r) { return std::abs(g(r * r)) <= threshold; };
    double lo = r_start;
    double hi = r_start;
    if (passes(r_start)) {
        while (passes(lo)) {
            hi = lo;
            lo *= 0.5;
            if (lo < 1e-150) return hi;
        }
    } else {
        while (!passes(hi)) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e150)
                throw NonConvergenceError("symbol does not decay below " +
                                          std::to_string(threshold));
        }
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (passes(mid) ? hi : lo) = mid;
    }
    return hi;
}

double gaussian_integral_closed(double a, const std::vector<double>& b_imag, int d) {
    if (!(a > 0.0)) throw DomainError("gaussian_integral_closed needs a > 0");
    if (d < 1) throw DomainError("gaussian_integral_closed needs d >= 1");
    if (!b_imag.empty() && static_cast<int>(b_imag.size()) != d)
        throw DomainError("b_imag must be empty or have d components");
    double b2 = 0.0;
    for (double b : b_imag) b2 += b * b;
    return std::pow(kPi / a, 0.5 * d) * std::exp(-b2 / a);
}

double laplace_numeric(const RealFunction& f, double s, double tail_tol, double rel_tol) {
    if (!(s > 0.0)) throw DomainError("laplace_numeric needs s > 0");
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw DomainError("tail_tol must lie in (0, 1)");
    constexpr int kMaxDoublings = 8;
    double horizon = -std::log(tail_tol) / s;
    for (int i = 0;; ++i) {
        const double tail = horizon * std::abs(std::exp(-s * horizon) * f(horizon));
        if (std::isfinite(tail) && tail <= tail_tol) break;
        if (i == kMaxDoublings)
            throw NonConvergenceError("Laplace integrand does not decay: T |e^{-sT} f(T)| = " +
                                      std::to_string(tail) + " at T=" + std::to_string(horizon));
        horizon *= 2.0;
    }
    auto h = [&](double t) { return std::exp(-s * t) * f(t); };
    // tanh-sinh near 0 absorbs algebraic singularities of f; the smooth
    // exponential tail goes to adaptive Gauss-Kronrod.
    const double split = std::min(horizon, 1.0 / s);
    const auto head = quad::tanh_sinh(h, 0.0, split, rel_tol);
    const auto tail = quad::gauss_kronrod(h, split, horizon, rel_tol);
    const double value = head.value + tail.value;
    const double err = head.error_estimate + tail.error_estimate;
    const double l1 = head.l1_norm + tail.l1_norm;
    if (!std::isfinite(value) || err > 1e4 * rel_tol * l1)
        throw QuadratureError("Laplace quadrature did not converge at s=" + std::to_string(s));
    return value;
}

double laplace_identity_residual(LaplaceIdentity kind, double alpha, double b, double s) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("Laplace identities need 0 < alpha < 2");
    if (!(b > 0.0)) throw DomainError("Laplace identities need b > 0");
    if (!(s > 0.0)) throw DomainError("Laplace identities need s > 0");
    const double sa = std::pow(s, alpha);
    specfun::EvalPolicy policy;
    policy.max_terms = 4000;

    switch (kind) {
        case LaplaceIdentity::L1: {
            const specfun::MittagLeffler e_a({alpha, 1.0}, policy);
            auto f = [&](double t) { return e_a(-b * std::pow(t, alpha)); };
            const auto order = caputo::CaputoOrder::from_alpha(alpha);
            const double beta = alpha <= 1.0 ? alpha : alpha - 1.0;
            // Several hundred Caputo integrals of f^{(n)}: tabulated evaluator.
            const specfun::MittagLefflerTable e_ab({alpha, beta}, policy);
            auto nth = [&](double u) {
                return -b * std::pow(u, beta - 1.0) * e_ab(-b * std::pow(u, alpha));
            };
            auto derivative = [&](double t) {
                return caputo::caputo_derivative(nth, order, t).value;
            };
            // The Caputo values carry ~1e-9 relative error (product integration),
            // so the outer quadrature only needs to resolve that level.
            const double lhs = laplace_numeric(derivative, s, kDefaultTailTol, kCaputoLaplaceTol);
            const double rhs = sa * laplace_numeric(f, s) - std::pow(s, alpha - 1.0) * f(0.0);
            return std::abs(lhs - rhs);
        }
        case LaplaceIdentity::L2: {
            if (!(sa > b)) throw DomainError("identity L2 needs s^alpha > b");
            const specfun::MittagLeffler e_a({alpha, 1.0}, policy);
            const double lhs =
                laplace_numeric([&](double t) { return e_a(b * std::pow(t, alpha)); }, s);
            return std::abs(lhs - std::pow(s, alpha - 1.0) / (sa - b));
        }
        case LaplaceIdentity::L3: {
            const specfun::MittagLeffler e_aa({alpha, alpha}, policy);
            const double lhs = laplace_numeric(
                [&](double t) { return std::pow(t, alpha - 1.0) * e_aa(-b * std::pow(t, alpha)); },
                s);
            return std::abs(lhs - 1.0 / (sa + b));
        }
    }
    throw DomainError("unknown Laplace identity");
}

double kernel_representation_residual(const specfun::MLOrder& order, double t) {
    order.validate();
    if (!order.in_monotone_window())
        throw DomainError("kernel representation needs 0 < alpha <= beta <= 1");
    if (order.alpha == 1.0) throw DomainError("kernel representation degenerates at alpha = 1");
    if (!(t > 0.0)) throw DomainError("kernel representation needs t > 0");
    const specfun::MittagLeffler ml(order);
    const double lhs =
        laplace_numeric([&](double sigma) { return ml.spectral_kernel_value(sigma); }, t);
    const double rhs = std::pow(t, order.beta - 1.0) * ml(-std::pow(t, order.alpha));
    return std::abs(lhs - rhs) / std::abs(rhs);
}

}  // namespace fracheat::transforms
