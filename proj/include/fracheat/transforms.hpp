#pragma once

// Laplace transform on [0, inf), the Laplace identities behind the
// Mittag-Leffler solution, the Gaussian integral, and the inverse Fourier
// transform of radial symbols.
//
// Fourier convention: F g(x) = int e^{-ixy} g(y) dy, inverse with (2 pi)^{-d}.

#include <cstddef>
#include <functional>
#include <vector>

#include "fracheat/specfun.hpp"

namespace fracheat::transforms {

using RealFunction = std::function<double(double)>;
/// A radial symbol g, called with r = |y|^2.
using RadialSymbol = std::function<double(double)>;
using Point = std::vector<double>;

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{1} << 30;  // bytes

/// Frequency box [-R, R)^d sampled with N points per axis (dy = 2R/N). The
/// dual spatial lattice has spacing pi/R and half-width N pi / (2R).
struct SpectralGrid {
    int d = 1;
    double cutoff = 1.0;  // R
    int points_per_axis = 1024;

    void validate(std::size_t memory_budget = kDefaultMemoryBudget) const;
    [[nodiscard]] double dy() const { return 2.0 * cutoff / points_per_axis; }
    [[nodiscard]] double dx() const;
    /// Half-width of the periodic spatial window, N pi / (2R).
    [[nodiscard]] double spatial_half_width() const;
    [[nodiscard]] std::size_t total_points() const;

    static int default_points_per_axis(int d);
    /// Grid whose dual lattice has the given spatial half-width.
    static SpectralGrid for_spatial_half_width(int d, double half_width, int points_per_axis);
};

struct FourierOptions {
    /// Multiply g by a smooth radial window equal to 1 on |y| <= R/2 and 0 on
    /// |y| >= R. g(0) is untouched, so the lattice mass is unchanged; the
    /// slowly decaying symbols of fractional orders then no longer leave a
    /// box-truncation ripple on the spatial field.
    bool taper = false;
    /// |g(R^2)| above this sets `truncated`.
    double truncation_threshold = 1e-10;
};

struct FourierDiagnostics {
    double max_imag = 0.0;         // largest |Im| of the raw transform
    double boundary_symbol = 0.0;  // |g(R^2)|
    bool truncated = false;
};

/// The transform sampled on the whole dual lattice x_m = (m - N/2) pi/R,
/// m in [0, N)^d, row-major with the last axis fastest.
struct LatticeField {
    int d = 1;
    int n = 0;
    double dx = 0.0;
    std::vector<double> values;
    FourierDiagnostics diagnostics;

    [[nodiscard]] double coordinate(int m) const { return (m - n / 2) * dx; }
};

struct PointValues {
    std::vector<double> values;
    FourierDiagnostics diagnostics;
};

/// (2 pi)^{-d} int_{[-R,R]^d} e^{ixy} g(|y|^2) dy on the dual lattice, by FFT.
LatticeField inverse_fourier_lattice(const RadialSymbol& g, const SpectralGrid& grid,
                                     const FourierOptions& options = {});

/// The same integral at arbitrary points (trapezoidal sum, evaluated
/// directly). Throws AliasingError for points outside the periodic window
/// |x_k| <= N pi / (2R).
PointValues inverse_fourier_field(const RadialSymbol& g, const SpectralGrid& grid,
                                  const std::vector<Point>& x_points,
                                  const FourierOptions& options = {});

/// Smallest R (to bisection accuracy) with |g(R^2)| <= threshold, assuming
/// |g| is eventually decreasing.
double decay_cutoff(const RadialSymbol& g, double threshold = 1e-10, double r_start = 1.0);

/// int_{R^d} exp(-(a|y|^2 + 2 b.y)) dy for b = i b_imag: (pi/a)^{d/2} exp(-|b_imag|^2/a).
/// An empty b_imag means b = 0.
double gaussian_integral_closed(double a, const std::vector<double>& b_imag, int d);

inline constexpr double kDefaultTailTol = 1e-12;

/// int_0^inf e^{-st} f(t) dt, truncated at T = -ln(tail_tol)/s; T is doubled
/// until T |e^{-sT} f(T)| <= tail_tol. `rel_tol` drives the quadrature on
/// [0, T]; loosen it for integrands that are themselves only known to a few
/// digits, otherwise the adaptive rule chases their noise.
double laplace_numeric(const RealFunction& f, double s, double tail_tol = kDefaultTailTol,
                       double rel_tol = 1e-13);

enum class LaplaceIdentity {
    L1,  // L[D^a f](s) = s^a L[f](s) - s^{a-1} f(0), f(t) = E_a(-b t^a)
    L2,  // L[E_a(b t^a)](s) = s^{a-1} / (s^a - b), s^a > b
    L3,  // L[t^{a-1} E_{a,a}(-b t^a)](s) = 1 / (s^a + b)
};

/// |numeric left side - right side| of the chosen identity. For L1 both sides
/// are numeric: the left from the Caputo derivative, the right from L[f].
double laplace_identity_residual(LaplaceIdentity kind, double alpha, double b, double s);

/// Relative difference between int_0^inf e^{-ts} K_{a,b}(s) ds and
/// t^{b-1} E_{a,b}(-t^a), inside the monotone window.
double kernel_representation_residual(const specfun::MLOrder& order, double t);

}  // namespace fracheat::transforms
