#pragma once

// Caputo fractional derivative
//
//   D^a f(x) = 1/Gamma(n-a) int_0^x f^{(n)}(u) (x-u)^{n-a-1} du,   n = ceil(a),
//
// and D^a f = f^{(n)} for integer a.

#include <functional>

namespace fracheat::caputo {

struct CaputoOrder {
    double alpha = 0.5;
    int n = 1;  // ceil(alpha)

    static CaputoOrder from_alpha(double alpha);
    void validate() const;
    [[nodiscard]] bool is_integer() const { return alpha == static_cast<double>(n); }
};

enum class DerivativeSource {
    supplied,           // f^{(n)} was passed in by the caller
    finite_difference,  // f^{(n)} was approximated from f
};

struct CaputoResult {
    double value = 0.0;
    DerivativeSource source = DerivativeSource::supplied;
    int panels = 0;
    double error_estimate = 0.0;  // from the singular-end quadrature only
};

using RealFunction = std::function<double(double)>;

inline constexpr int kDefaultPanels = 2048;

/// D^alpha f(x) from the n-th derivative of f. The half [x/2, x] next to the
/// kernel singularity uses product integration (piecewise-linear f^{(n)}
/// against the exact kernel moments on `panels` panels); [0, x/2] uses
/// tanh-sinh, which also absorbs integrable singularities of f^{(n)} at 0.
/// `nth_derivative` may be called concurrently.
CaputoResult caputo_derivative(const RealFunction& nth_derivative, const CaputoOrder& order,
                               double x, int panels = kDefaultPanels);

/// Same, with f^{(n)} replaced by central differences of f (step x*1e-5,
/// one-sided within n steps of 0). The result is flagged finite_difference.
CaputoResult caputo_derivative_fd(const RealFunction& f, const CaputoOrder& order, double x,
                                  int panels = kDefaultPanels);

/// x^{1-a} / ((1-a) Gamma(1-a)) = D^a u evaluated at x, 0 < a < 1.
double caputo_linear_closed_form(double alpha, double x);

/// |D^a y(t) + c y(t)| for y(t) = E_a(-c t^a), the Fourier mode of the
/// fractional heat equation.
double ml_ode_residual(double alpha, double c, double t, int panels = kDefaultPanels);

}  // namespace fracheat::caputo
