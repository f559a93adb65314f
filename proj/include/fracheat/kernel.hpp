#pragma once

// Deterministic part of the solution: the fractional heat kernel
//   I1(t, x) = (2 pi)^{-d} int e^{ixy} E_alpha(-lambda t^alpha |y|^2) dy,
// the convolution kernel Lambda(t, y) = t^{alpha-1} E_{alpha,alpha}(-lambda t^alpha |y|^2)
// and the classical alpha = 1 Gaussian.

#include <vector>

#include "fracheat/transforms.hpp"

namespace fracheat::kernel {

struct EquationSpec {
    double alpha = 1.0;   // time order, (0, 2)
    double lambda = 1.0;  // diffusivity
    double sigma = 1.0;   // noise amplitude
    int d = 1;

    void validate() const;
};

/// t^{alpha-1} E_{alpha,alpha}(-lambda t^alpha |y|^2).
double lambda_kernel(const EquationSpec& spec, double t, double y_norm_sq);

/// sqrt(lambda) max(t^{alpha/2}, t^{1/2}).
double spreading_length(const EquationSpec& spec, double t);

/// Spatial half-width at which I1 has decayed to about e^{-20} of its scale:
/// max(8, r(alpha)) * spreading_length, where r(alpha) solves the Wright-function
/// tail exponent (1-nu) nu^{nu/(1-nu)} r^{1/(1-nu)} = 20, nu = alpha/2.
double default_half_width(const EquationSpec& spec, double t);

/// Spectral grid whose dual lattice has default_half_width.
transforms::SpectralGrid default_grid(const EquationSpec& spec, double t, int points_per_axis = 0);

struct KernelField {
    EquationSpec spec;
    double t = 0.0;
    int n = 0;  // points per axis
    double dx = 0.0;
    /// Row-major over the lattice x_m = (m - n/2) dx, last axis fastest.
    std::vector<double> values;
    transforms::FourierDiagnostics truncation_report;

    [[nodiscard]] double coordinate(int m) const { return (m - n / 2) * dx; }
    [[nodiscard]] double max_abs() const;
    /// Largest |value| on the outermost layer of the lattice.
    [[nodiscard]] double boundary_max() const;
};

/// Options for I1 evaluation: the tapered spectral window is the default.
transforms::FourierOptions default_fourier_options();

/// I1 on the dual lattice of `grid`. Throws DomainError when t is below
/// 1e-6 of the time the kernel needs to spread over the lattice, i.e. when
/// spreading_length(t) < 1e-6 * half-width.
KernelField i1_field(const EquationSpec& spec, double t, const transforms::SpectralGrid& grid,
                     const transforms::FourierOptions& options = default_fourier_options());

/// I1 at arbitrary points of the periodic window.
transforms::PointValues i1_points(const EquationSpec& spec, double t,
                                  const transforms::SpectralGrid& grid,
                                  const std::vector<transforms::Point>& x_points,
                                  const transforms::FourierOptions& options = default_fourier_options());

/// (4 pi lambda t)^{-d/2} exp(-|x|^2 / (4 lambda t)); alpha must be 1.
double classical_kernel(const EquationSpec& spec, double t, const transforms::Point& x);

inline constexpr double kBoundaryTolerance = 1e-8;

/// Lattice Riemann sum of the field. Throws DomainTooSmallError when the
/// boundary layer exceeds kBoundaryTolerance.
double mass_integral(const KernelField& field);

}  // namespace fracheat::kernel
