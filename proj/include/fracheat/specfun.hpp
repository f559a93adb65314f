#pragma once

// Gamma, erfc and the Mittag-Leffler functions on the real line.
//
// E_{a,b}(z) = sum_k z^k / Gamma(a k + b) is evaluated by one of three routes:
//
//   * the Taylor series, whenever the rounding bound of the alternating sum
//     stays below the requested tolerance;
//   * the spectral (Bernstein) representation
//         t^{b-1} E_{a,b}(-t^a) = int_0^inf e^{-st} K_{a,b}(s) ds
//                                 + residues of s^{a-b}/(s^a + 1), a > 1,
//     computed with double-exponential quadrature;
//   * the algebraic asymptotic expansion -sum_k (-x)^{-k} / Gamma(b - a k)
//     (plus the same residues) once x^{1/a} is large enough that the
//     optimally truncated expansion is exact to rounding.
//
// All functions are pure and safe to call concurrently.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace fracheat::specfun {

/// Parameter pair (alpha, beta) of E_{alpha,beta}. alpha in (0, 2], beta > 0.
struct MLOrder {
    double alpha = 1.0;
    double beta = 1.0;

    void validate() const;
    /// 0 < alpha <= beta <= 1: E_{alpha,beta}(-x) is completely monotone and
    /// K_{alpha,beta} is a non-negative density.
    [[nodiscard]] bool in_monotone_window() const;
};

struct EvalPolicy {
    double series_tol = 1e-12;
    int max_terms = 400;
    /// |z| above which the series is not attempted for z < 0. When unset the
    /// default depends on alpha (see switch_threshold()).
    std::optional<double> method_switch_threshold;
    /// Relative tolerance of the spectral-kernel quadrature.
    double quad_tol = 1e-13;

    void validate() const;
    [[nodiscard]] double switch_threshold(double alpha) const;
};

/// Gamma(x). Throws PoleError at 0, -1, -2, ... and OverflowError beyond ~171.62.
double gamma_fn(double x);

double erfc_fn(double x);

/// E_{alpha,beta}(z) for real z.
double mittag_leffler(const MLOrder& order, double z, const EvalPolicy& policy = {});

/// E_alpha(z) = E_{alpha,1}(z).
double ml_one_param(double alpha, double z, const EvalPolicy& policy = {});

/// Bernstein density K_{alpha,beta}(s), s > 0, inside the monotone window.
double spectral_kernel(const MLOrder& order, double s);

/// E_{alpha,beta}(-x), x > 0, by quadrature of the Bernstein density only.
/// Requires 0 < alpha <= beta <= 1 (alpha = beta = 1 excluded: the density
/// degenerates to a point mass).
double ml_via_spectral_integral(const MLOrder& order, double x,
                                const EvalPolicy& policy = {});

enum class GammaRatioKind {
    rho,  // Gamma(k+1) / Gamma(alpha k + 1)
    r     // Gamma(k+1) / Gamma(alpha k + alpha)
};

double gamma_ratio_seq(double alpha, int k, GammaRatioKind kind);

/// Raw Taylor partial sum with its diagnostics; exposed for the dual-path checks.
struct SeriesResult {
    double value = 0.0;
    int terms = 0;
    double rounding_bound = 0.0;  // bound on the accumulated rounding error
    bool converged = false;
};

SeriesResult ml_series(const MLOrder& order, double z, const EvalPolicy& policy = {});

/// Evaluator bound to one order. Caches the reciprocal Gamma coefficients so
/// repeated evaluation (kernels on grids, quadrature integrands) is cheap.
class MittagLeffler {
public:
    explicit MittagLeffler(const MLOrder& order, const EvalPolicy& policy = {});

    double operator()(double z) const;
    [[nodiscard]] SeriesResult series(double z) const;
    /// E_{alpha,beta}(-x) from the spectral representation, x > 0.
    [[nodiscard]] double spectral(double x) const;
    /// Density K_{alpha,beta}(s) of the collapsed Hankel integral, s > 0.
    [[nodiscard]] double spectral_kernel_value(double s) const { return kernel(s); }

    [[nodiscard]] const MLOrder& order() const { return order_; }
    [[nodiscard]] const EvalPolicy& policy() const { return policy_; }

private:
    double negative_axis(double x) const;
    [[nodiscard]] bool spectral_route_available() const;
    [[nodiscard]] bool asymptotic_applies(double x) const;
    double asymptotic(double x) const;
    double unit_order(double x) const;
    double residues(double t) const;
    double kernel_laplace(double t) const;
    double kernel(double s) const;

    MLOrder order_;
    EvalPolicy policy_;
    std::vector<double> log_coeff_;    // -lgamma(alpha k + beta)
    std::vector<double> coeff_;        // 1 / Gamma(alpha k + beta), 0 when it underflows
    double sin_beta_minus_alpha_ = 0.0;
    double sin_beta_ = 0.0;
};

/// Interpolating evaluator for bulk use on the negative axis. The band
/// x = -z in [0, x_max], where the exact evaluator has to fall back to
/// quadrature, is covered by piecewise Chebyshev interpolants in
/// u = log(1 + x), refined until the trailing coefficients fall below
/// rel_tol times max(panel magnitude, 1e-6/Gamma(beta)). Outside the band the
/// exact evaluator is used (the asymptotic expansion, which is cheap there);
/// E_{1,1} = exp is never tabulated.
class MittagLefflerTable {
public:
    explicit MittagLefflerTable(const MLOrder& order, const EvalPolicy& policy = {},
                                double rel_tol = 1e-13);

    double operator()(double z) const;

    [[nodiscard]] double band_end() const { return x_max_; }
    [[nodiscard]] std::size_t panels() const { return coeffs_.size(); }
    [[nodiscard]] const MittagLeffler& exact() const { return exact_; }

    static constexpr int kDegree = 20;

private:
    void build(double u0, double u1, double rel_tol, double floor, int depth);

    MittagLeffler exact_;
    double x_max_ = 0.0;
    std::vector<double> breaks_;
    std::vector<std::array<double, kDegree + 1>> coeffs_;
};

}  // namespace fracheat::specfun
