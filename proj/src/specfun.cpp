#include "fracheat/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fracheat/errors.hpp"
#include "fracheat/quadrature.hpp"

namespace fracheat::specfun {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
// Largest argument for which Gamma(x) is finite in double precision.
constexpr double kGammaOverflow = 171.62437695630271;
// Beyond this value of x^{1/alpha} the optimally truncated algebraic expansion
// has a remainder of order exp(-x^{1/alpha}), i.e. below double rounding.
constexpr double kAsymptoticScale = 50.0;
// Past this the e^{-xu} boundary layer of the alpha = 1 integral is thinner than
// the double-exponential node spacing; the series fallback reports the failure.
constexpr double kUnitOrderMaxArgument = 1e6;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// sin(pi y) with exact zeros at the integers.
double sin_pi(double y) {
    const double r = std::fmod(y, 2.0);
    if (r == std::floor(r)) return 0.0;
    return std::sin(kPi * r);
}

// 1 / Gamma(x) including the zeros at the poles, in log form:
// returns (log|1/Gamma(x)|, sign). sign == 0 marks an exact zero.
std::pair<double, int> log_rgamma(double x) {
    if (is_nonpositive_integer(x)) return {0.0, 0};
    if (x > 0.0) return {-std::lgamma(x), 1};
    // Reflection: 1/Gamma(x) = Gamma(1 - x) sin(pi x) / pi.
    const double s = sin_pi(x);
    return {std::lgamma(1.0 - x) + std::log(std::abs(s) / kPi), s > 0 ? 1 : -1};
}

}  // namespace

void MLOrder::validate() const {
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw DomainError("Mittag-Leffler order alpha must lie in (0, 2], got " +
                          std::to_string(alpha));
    if (!(beta > 0.0))
        throw DomainError("Mittag-Leffler parameter beta must be positive, got " +
                          std::to_string(beta));
}

bool MLOrder::in_monotone_window() const {
    return alpha > 0.0 && alpha <= beta && beta <= 1.0;
}

void EvalPolicy::validate() const {
    if (!(series_tol > 0.0)) throw DomainError("series_tol must be positive");
    if (max_terms < 16) throw DomainError("max_terms must be at least 16");
    if (method_switch_threshold && !(*method_switch_threshold >= 0.0))
        throw DomainError("method_switch_threshold must be non-negative");
    if (!(quad_tol > 0.0)) throw DomainError("quad_tol must be positive");
}

double EvalPolicy::switch_threshold(double alpha) const {
    if (method_switch_threshold) return *method_switch_threshold;
    return alpha >= 1.0 ? 30.0 : 10.0;
}

double gamma_fn(double x) {
    if (std::isnan(x)) throw DomainError("gamma_fn: NaN argument");
    if (is_nonpositive_integer(x))
        throw PoleError("gamma_fn: pole at non-positive integer " + std::to_string(x));
    if (x > kGammaOverflow)
        throw OverflowError("gamma_fn: Gamma(" + std::to_string(x) + ") overflows");
    return std::tgamma(x);
}

double erfc_fn(double x) { return std::erfc(x); }

// ---------------------------------------------------------------------------

MittagLeffler::MittagLeffler(const MLOrder& order, const EvalPolicy& policy)
    : order_(order), policy_(policy) {
    order_.validate();
    policy_.validate();
    const auto n = static_cast<std::size_t>(policy_.max_terms);
    log_coeff_.resize(n);
    coeff_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double arg = order_.alpha * static_cast<double>(k) + order_.beta;
        log_coeff_[k] = -std::lgamma(arg);
        coeff_[k] = arg < kGammaOverflow ? 1.0 / std::tgamma(arg) : 0.0;
    }
    sin_beta_minus_alpha_ = sin_pi(order_.beta - order_.alpha);
    sin_beta_ = sin_pi(order_.beta);
}

SeriesResult MittagLeffler::series(double z) const {
    SeriesResult out;
    if (z == 0.0) {
        out.value = coeff_[0];
        out.terms = 1;
        out.converged = true;
        return out;
    }
    const double abs_z = std::abs(z);
    const double log_abs_z = std::log(abs_z);
    const bool alternating = z < 0.0;
    double sum = 0.0;
    double abs_sum = 0.0;
    double previous = std::numeric_limits<double>::infinity();
    double largest_exponent = 0.0;
    for (int k = 0; k < policy_.max_terms; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        double magnitude = coeff_[idx] * std::pow(abs_z, k);
        if (!(std::isnormal(magnitude) && std::isfinite(magnitude))) {
            const double exponent = k * log_abs_z + log_coeff_[idx];
            largest_exponent = std::max(largest_exponent, std::abs(exponent));
            magnitude = std::exp(exponent);
        }
        sum += (alternating && (k & 1)) ? -magnitude : magnitude;
        abs_sum += magnitude;
        out.terms = k + 1;
        // Decreasing terms with ratio q leave a tail of about |term| / (1 - q).
        if (k > 0 && magnitude < previous &&
            magnitude <= (1.0 - magnitude / previous) * policy_.series_tol * std::abs(sum)) {
            out.converged = true;
            break;
        }
        previous = magnitude;
    }
    out.value = sum;
    // Each term carries a few ulps from Gamma and pow; terms formed in the log
    // domain add |exponent| ulps from exp.
    out.rounding_bound = (16.0 + largest_exponent) * kEps * abs_sum;
    return out;
}

double MittagLeffler::kernel(double s) const {
    const double a = order_.alpha;
    const double log_s = std::log(s);
    const double w = std::exp(a * log_s);
    const double prefactor = std::exp((a - order_.beta) * log_s) / kPi;
    // Denominator w^2 + 2 w cos(a pi) + 1 written without cancellation near w = 1.
    const double c = std::cos(0.5 * kPi * a);
    if (w <= 1.0) {
        const double num = sin_beta_minus_alpha_ + w * sin_beta_;
        const double den = (w - 1.0) * (w - 1.0) + 4.0 * w * c * c;
        return prefactor * num / den;
    }
    const double iw = 1.0 / w;
    const double num = sin_beta_minus_alpha_ * iw * iw + sin_beta_ * iw;
    const double den = (1.0 - iw) * (1.0 - iw) + 4.0 * iw * c * c;
    return prefactor * num / den;
}

double MittagLeffler::kernel_laplace(double t) const {
    if (sin_beta_minus_alpha_ == 0.0 && sin_beta_ == 0.0) return 0.0;
    auto integrand = [&](double s) { return std::exp(-s * t) * kernel(s); };
    const double tol = policy_.quad_tol;
    const auto inner = quad::tanh_sinh(integrand, 0.0, 1.0, tol);
    const auto outer = quad::exp_sinh(integrand, 1.0, tol);
    const double value = inner.value + outer.value;
    const double l1 = inner.l1_norm + outer.l1_norm;
    const double err = inner.error_estimate + outer.error_estimate;
    if (!std::isfinite(value) || err > std::max(1e3 * tol * l1, 1e-300))
        throw QuadratureError("Mittag-Leffler spectral quadrature failed to converge (alpha=" +
                              std::to_string(order_.alpha) + ", beta=" +
                              std::to_string(order_.beta) + ", t=" + std::to_string(t) + ")");
    return value;
}

double MittagLeffler::residues(double t) const {
    const double a = order_.alpha;
    if (a <= 1.0) return 0.0;
    // Poles of s^{a-b} / (s^a + 1) at s = exp(+-i pi / a).
    const double phase = kPi / a;
    const double decay = std::cos(phase) * t;
    return (2.0 / a) * std::exp(decay) *
           std::cos(t * std::sin(phase) + (1.0 - order_.beta) * phase);
}

bool MittagLeffler::spectral_route_available() const {
    // alpha == 1 puts the pole of the Laplace symbol on the branch cut, and
    // beta >= alpha + 1 makes the collapsed Hankel integral diverge at 0.
    return order_.alpha != 1.0 && order_.beta < order_.alpha + 1.0;
}

bool MittagLeffler::asymptotic_applies(double x) const {
    return std::pow(x, 1.0 / order_.alpha) >= kAsymptoticScale;
}

double MittagLeffler::asymptotic(double x) const {
    const double a = order_.alpha;
    const double b = order_.beta;
    const double log_x = std::log(x);
    double sum = 0.0;
    double previous = std::numeric_limits<double>::infinity();
    // Truncate on the envelope Gamma(1 - b + a k) / (pi x^k): the factor
    // sin(pi (b - a k)) in 1/Gamma(b - a k) oscillates and says nothing about
    // where the expansion starts to diverge.
    for (int k = 1; k < 4 * policy_.max_terms; ++k) {
        const double y = b - a * k;
        const double envelope = y > 0.0 ? std::exp(-std::lgamma(y) - k * log_x)
                                        : std::exp(std::lgamma(1.0 - y) - k * log_x) / kPi;
        if (envelope > previous) break;  // optimal truncation
        const auto [log_mag, sign] = log_rgamma(y);
        if (sign != 0) sum += ((k & 1) ? 1.0 : -1.0) * sign * std::exp(log_mag - k * log_x);
        if (envelope <= kEps * 1e-2 * std::abs(sum)) break;
        previous = envelope;
    }
    if (a > 1.0) {
        const double t = std::pow(x, 1.0 / a);
        sum += std::pow(t, 1.0 - b) * residues(t);
    }
    return sum;
}

double MittagLeffler::spectral(double x) const {
    if (!(x > 0.0)) throw DomainError("spectral evaluation needs x > 0");
    if (!spectral_route_available())
        throw DomainError("spectral representation unavailable for alpha=" +
                          std::to_string(order_.alpha) + ", beta=" +
                          std::to_string(order_.beta));
    const double t = std::pow(x, 1.0 / order_.alpha);
    const double scale = std::exp((1.0 - order_.beta) * std::log(t));
    return scale * (kernel_laplace(t) + residues(t));
}

double MittagLeffler::negative_axis(double x) const {
    const double tol = policy_.series_tol;
    if (x <= policy_.switch_threshold(order_.alpha)) {
        const auto s = series(-x);
        if (s.converged && s.rounding_bound <= tol * std::abs(s.value)) return s.value;
    }
    if (spectral_route_available()) {
        if (asymptotic_applies(x)) return asymptotic(x);
        return spectral(x);
    }
    if (order_.alpha == 1.0 && x <= kUnitOrderMaxArgument) return unit_order(x);
    const auto s = series(-x);
    if (!s.converged)
        throw NonConvergenceError("Mittag-Leffler series did not converge within " +
                                  std::to_string(policy_.max_terms) + " terms at z=" +
                                  std::to_string(-x));
    if (s.rounding_bound > std::sqrt(tol) * std::abs(s.value))
        throw NonConvergenceError("Mittag-Leffler series lost all precision at z=" +
                                  std::to_string(-x));
    return s.value;
}

// E_{1,b}(-x) = (1/Gamma(b-1)) int_0^1 e^{-xu} (1-u)^{b-2} du for b > 1, and
// E_{1,b}(z) = 1/Gamma(b) + z E_{1,b+1}(z) below.
double MittagLeffler::unit_order(double x) const {
    const double b = order_.beta;
    if (b < 1.0) return 1.0 / std::tgamma(b) - x * MittagLeffler({1.0, b + 1.0}, policy_)(-x);
    // v = 1 - u puts the (1-u)^{b-2} singularity at an exactly representable end.
    auto integrand = [&](double v) { return std::exp(-x * (1.0 - v)) * std::pow(v, b - 2.0); };
    const auto r = quad::tanh_sinh(integrand, 0.0, 1.0, policy_.quad_tol);
    if (!r.converged)
        throw QuadratureError("E_{1,b} integral failed to converge at x=" + std::to_string(x));
    return r.value * std::exp(-std::lgamma(b - 1.0));
}

double MittagLeffler::operator()(double z) const {
    if (std::isnan(z)) throw DomainError("Mittag-Leffler: NaN argument");
    if (z == 0.0) return coeff_[0];
    if (order_.alpha == 1.0 && order_.beta == 1.0) return std::exp(z);
    if (z < 0.0) return negative_axis(-z);
    const auto s = series(z);
    if (!s.converged)
        throw NonConvergenceError("Mittag-Leffler series did not converge within " +
                                  std::to_string(policy_.max_terms) + " terms at z=" +
                                  std::to_string(z));
    return s.value;
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kTableDegree = MittagLefflerTable::kDegree;

// Chebyshev points of the first kind on [-1, 1].
const std::array<double, kTableDegree + 1>& cheb_nodes() {
    static const auto nodes = [] {
        std::array<double, kTableDegree + 1> n{};
        for (int j = 0; j <= kTableDegree; ++j)
            n[j] = std::cos(kPi * (j + 0.5) / (kTableDegree + 1));
        return n;
    }();
    return nodes;
}

}  // namespace

MittagLefflerTable::MittagLefflerTable(const MLOrder& order, const EvalPolicy& policy,
                                       double rel_tol)
    : exact_(order, policy) {
    if (!(rel_tol > 0.0)) throw DomainError("table tolerance must be positive");
    // Past x^{1/alpha} = kAsymptoticScale the exact evaluator is already cheap.
    x_max_ = order.alpha == 1.0 && order.beta == 1.0 ? 0.0 : std::pow(kAsymptoticScale, order.alpha);
    const double u_max = std::log1p(x_max_);
    const double floor = 1e-6 * std::abs(exact_(0.0));
    const int initial = std::max(1, static_cast<int>(std::ceil(u_max / 0.5)));
    breaks_.push_back(0.0);
    if (x_max_ == 0.0) return;
    for (int i = 0; i < initial; ++i)
        build(u_max * i / initial, u_max * (i + 1) / initial, rel_tol, floor, 0);
}

void MittagLefflerTable::build(double u0, double u1, double rel_tol, double floor, int depth) {
    const auto& nodes = cheb_nodes();
    std::array<double, kTableDegree + 1> values{};
    double magnitude = floor;
    for (int j = 0; j <= kTableDegree; ++j) {
        const double u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * nodes[j];
        values[j] = exact_(-std::expm1(u));
        magnitude = std::max(magnitude, std::abs(values[j]));
    }
    std::array<double, kTableDegree + 1> c{};
    for (int k = 0; k <= kTableDegree; ++k) {
        double sum = 0.0;
        for (int j = 0; j <= kTableDegree; ++j)
            sum += values[j] * std::cos(kPi * k * (j + 0.5) / (kTableDegree + 1));
        c[k] = (k == 0 ? 1.0 : 2.0) * sum / (kTableDegree + 1);
    }
    const double tail = std::abs(c[kTableDegree]) + std::abs(c[kTableDegree - 1]) +
                        std::abs(c[kTableDegree - 2]);
    if (tail > rel_tol * magnitude && depth < 40) {
        const double mid = 0.5 * (u0 + u1);
        build(u0, mid, rel_tol, floor, depth + 1);
        build(mid, u1, rel_tol, floor, depth + 1);
        return;
    }
    breaks_.push_back(u1);
    coeffs_.push_back(c);
}

double MittagLefflerTable::operator()(double z) const {
    const double x = -z;
    if (!(x >= 0.0 && x <= x_max_) || coeffs_.empty()) return exact_(z);
    const double u = std::log1p(x);
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), u);
    auto panel = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - breaks_.begin() - 1, 0));
    panel = std::min(panel, coeffs_.size() - 1);
    const double u0 = breaks_[panel];
    const double u1 = breaks_[panel + 1];
    const double s = (2.0 * u - u0 - u1) / (u1 - u0);
    const auto& c = coeffs_[panel];
    // Clenshaw recurrence.
    double b1 = 0.0;
    double b2 = 0.0;
    for (int k = kTableDegree; k >= 1; --k) {
        const double b0 = 2.0 * s * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return s * b1 - b2 + c[0];
}

// ---------------------------------------------------------------------------

double mittag_leffler(const MLOrder& order, double z, const EvalPolicy& policy) {
    return MittagLeffler(order, policy)(z);
}

double ml_one_param(double alpha, double z, const EvalPolicy& policy) {
    return mittag_leffler(MLOrder{alpha, 1.0}, z, policy);
}

SeriesResult ml_series(const MLOrder& order, double z, const EvalPolicy& policy) {
    return MittagLeffler(order, policy).series(z);
}

double spectral_kernel(const MLOrder& order, double s) {
    order.validate();
    if (!order.in_monotone_window())
        throw DomainError("spectral_kernel requires 0 < alpha <= beta <= 1");
    if (!(s > 0.0)) throw DomainError("spectral_kernel requires s > 0");
    EvalPolicy policy;
    policy.max_terms = 16;
    return MittagLeffler(order, policy).spectral_kernel_value(s);
}

double ml_via_spectral_integral(const MLOrder& order, double x, const EvalPolicy& policy) {
    order.validate();
    if (!order.in_monotone_window())
        throw DomainError("spectral integral requires 0 < alpha <= beta <= 1");
    if (order.alpha == 1.0)
        throw DomainError("spectral integral degenerates at alpha = 1");
    if (!(x > 0.0)) throw DomainError("spectral integral requires x > 0");
    return MittagLeffler(order, policy).spectral(x);
}

double gamma_ratio_seq(double alpha, int k, GammaRatioKind kind) {
    if (!(alpha > 1.0)) throw DomainError("gamma_ratio_seq requires alpha > 1");
    if (k < 0) throw DomainError("gamma_ratio_seq requires k >= 0");
    const double kk = static_cast<double>(k);
    const double denominator_arg = kind == GammaRatioKind::rho ? alpha * kk + 1.0
                                                               : alpha * kk + alpha;
    return std::exp(std::lgamma(kk + 1.0) - std::lgamma(denominator_arg));
}

}  // namespace fracheat::specfun
