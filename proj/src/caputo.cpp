#include "fracheat/caputo.hpp"

#include <cmath>
#include <string>

#include "fracheat/errors.hpp"
#include "fracheat/quadrature.hpp"
#include "fracheat/specfun.hpp"

namespace fracheat::caputo {
namespace {

constexpr double kLeftTol = 1e-12;
constexpr double kLeftTolFd = 1e-8;
constexpr double kFdStep = 1e-5;

CaputoResult integrate(const RealFunction& g, const CaputoOrder& order, double x, int panels,
                       double left_tol, double accept_tol) {
    const double mu = order.n - order.alpha - 1.0;  // in (-1, 0)
    const double mid = 0.5 * x;

    // [0, x/2] in the scaled variable u = x v, so that the node placement does
    // not depend on the magnitude of x. A node whose u underflows to 0 covers
    // no measure and is dropped.
    const double scale = std::pow(x, mu + 1.0);
    auto scaled = [&](double v) {
        const double u = x * v;
        return u > 0.0 ? g(u) * std::pow(1.0 - v, mu) : 0.0;
    };
    auto left = quad::tanh_sinh(scaled, 0.0, 0.5, left_tol);
    left.value *= scale;
    left.error_estimate *= scale;
    left.l1_norm *= scale;
    if (!std::isfinite(left.value) ||
        (!left.converged && left.error_estimate > accept_tol * left.l1_norm))
        throw QuadratureError("Caputo integral on [0, x/2] did not converge at x=" +
                              std::to_string(x));

    // Product integration on [x/2, x] in the same scaled variable: with
    // w = 1 - v, the distances w_j = (P - j) h are exact multiples of h.
    const double h = 0.5 / panels;
    const double p1 = mu + 1.0;
    const double p2 = mu + 2.0;
    double right = 0.0;
    double f_left = g(mid);
    double w_left = 0.5;
    double w_left_p1 = std::pow(w_left, p1);
    double w_left_p2 = w_left_p1 * w_left;
    for (int j = 0; j < panels; ++j) {
        const double w_right = static_cast<double>(panels - j - 1) * h;
        const double f_right = j + 1 == panels ? g(x) : g(x * (1.0 - w_right));
        const double w_right_p1 = w_right > 0.0 ? std::pow(w_right, p1) : 0.0;
        const double w_right_p2 = w_right_p1 * w_right;
        const double a = (w_left_p1 - w_right_p1) / p1;  // int w^mu
        const double b = (w_left_p2 - w_right_p2) / p2;  // int w^{mu+1}
        right += f_left * a + (f_right - f_left) / h * (w_left * a - b);
        f_left = f_right;
        w_left = w_right;
        w_left_p1 = w_right_p1;
        w_left_p2 = w_right_p2;
    }
    right *= scale;

    CaputoResult out;
    const double norm = 1.0 / std::tgamma(order.n - order.alpha);
    out.value = norm * (left.value + right);
    out.error_estimate = norm * left.error_estimate;
    out.panels = panels;
    return out;
}

void check_arguments(const CaputoOrder& order, double x, int panels) {
    order.validate();
    if (!(x > 0.0)) throw DomainError("Caputo derivative needs x > 0, got " + std::to_string(x));
    if (panels < 2) throw DomainError("Caputo derivative needs at least 2 panels");
}

}  // namespace

CaputoOrder CaputoOrder::from_alpha(double alpha) {
    CaputoOrder o{alpha, static_cast<int>(std::ceil(alpha))};
    o.validate();
    return o;
}

void CaputoOrder::validate() const {
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw DomainError("Caputo order must lie in (0, 2], got " + std::to_string(alpha));
    if (n != static_cast<int>(std::ceil(alpha)))
        throw DomainError("Caputo order: n must equal ceil(alpha)");
}

CaputoResult caputo_derivative(const RealFunction& nth_derivative, const CaputoOrder& order,
                               double x, int panels) {
    check_arguments(order, x, panels);
    if (order.is_integer()) return {nth_derivative(x), DerivativeSource::supplied, 0, 0.0};
    return integrate(nth_derivative, order, x, panels, kLeftTol, 1e-8);
}

CaputoResult caputo_derivative_fd(const RealFunction& f, const CaputoOrder& order, double x,
                                  int panels) {
    check_arguments(order, x, panels);
    const double h = x * kFdStep;
    const int n = order.n;
    // Central differences in the interior, second-order one-sided stencils
    // within reach of 0 or x.
    auto derivative = [&f, h, n, x](double u) {
        if (n == 1) {
            if (u - h < 0.0) return (-3.0 * f(u) + 4.0 * f(u + h) - f(u + 2.0 * h)) / (2.0 * h);
            if (u + h > x) return (3.0 * f(u) - 4.0 * f(u - h) + f(u - 2.0 * h)) / (2.0 * h);
            return (f(u + h) - f(u - h)) / (2.0 * h);
        }
        if (u - h < 0.0)
            return (2.0 * f(u) - 5.0 * f(u + h) + 4.0 * f(u + 2.0 * h) - f(u + 3.0 * h)) / (h * h);
        if (u + h > x)
            return (2.0 * f(u) - 5.0 * f(u - h) + 4.0 * f(u - 2.0 * h) - f(u - 3.0 * h)) / (h * h);
        return (f(u + h) - 2.0 * f(u) + f(u - h)) / (h * h);
    };
    CaputoResult out;
    if (order.is_integer()) {
        out.value = derivative(x);
    } else {
        out = integrate(derivative, order, x, panels, kLeftTolFd, 1e-5);
    }
    out.source = DerivativeSource::finite_difference;
    return out;
}

double caputo_linear_closed_form(double alpha, double x) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("caputo_linear_closed_form needs 0 < alpha < 1");
    if (!(x > 0.0)) throw DomainError("caputo_linear_closed_form needs x > 0");
    return std::pow(x, 1.0 - alpha) / ((1.0 - alpha) * std::tgamma(1.0 - alpha));
}

double ml_ode_residual(double alpha, double c, double t, int panels) {
    const auto order = CaputoOrder::from_alpha(alpha);
    if (!(c > 0.0)) throw DomainError("ml_ode_residual needs c > 0");
    if (!(t > 0.0)) throw DomainError("ml_ode_residual needs t > 0");

    const specfun::MittagLeffler e_a({alpha, 1.0});
    const double y = e_a(-c * std::pow(t, alpha));
    // d/du [u^{b-1} E_{a,b}(-c u^a)] = u^{b-2} E_{a,b-1}(-c u^a), applied once
    // (n = 1, b = a) or twice (n = 2, b = a - 1).
    const double beta = alpha <= 1.0 ? alpha : alpha - 1.0;
    const specfun::MittagLeffler e_ab({alpha, beta});
    const double power = beta - 1.0;
    auto nth = [&](double u) { return -c * std::pow(u, power) * e_ab(-c * std::pow(u, alpha)); };
    const auto d = caputo_derivative(nth, order, t, panels);
    return std::abs(d.value + c * y);
}

}  // namespace fracheat::caputo
