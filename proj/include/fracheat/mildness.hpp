#pragma once

// Square-integrability of the solution at a point: the classification
// theorem, the J2 exponent criterion, the closed-form alpha = 1 variance and
// the spectral variance integral
//   J2(eps, R) = sigma^2 (2 pi)^{-d} int_eps^t s^{2 alpha - 2}
//                int_{|y| <= R} E_{alpha,alpha}(-lambda s^alpha |y|^2)^2 dy ds
// obtained from the stochastic convolution by the Ito isometry and Plancherel.

#include <optional>
#include <string>
#include <vector>

#include "fracheat/kernel.hpp"

namespace fracheat::mildness {

enum class Status { Mild, NotMild, Unknown };
enum class TheoremCase { alpha_eq_1, alpha_gt_1, alpha_lt_1, remark_unknown };

struct MildnessVerdict {
    Status status = Status::Unknown;
    TheoremCase theorem_case = TheoremCase::remark_unknown;
    double exponent = 0.0;       // 2 alpha - 2 - alpha d / 2
    double criterion_rhs = 0.0;  // 4 - 2 / alpha
};

std::string to_string(Status s);
std::string to_string(TheoremCase c);

/// alpha = 1: Mild iff d = 1. alpha > 1: Mild for d <= 2, Unknown for d >= 3.
/// alpha < 1: NotMild for every d.
MildnessVerdict classify(double alpha, int d);

/// 2 alpha - 2 - alpha d / 2; the time integral of J2 is finite iff this exceeds -1.
double j2_exponent(double alpha, int d);

/// 4 - 2 / alpha: exponent > -1 exactly when d < criterion_rhs.
double criterion_rhs(double alpha);

/// sigma^2 sqrt(t) / sqrt(2 pi lambda), the alpha = 1, d = 1 variance.
/// Throws DivergenceError for d >= 2 and DomainError for alpha != 1.
double closed_form_j2_alpha1(const kernel::EquationSpec& spec, double t);

struct VarianceReport {
    double j1 = 0.0;  // I1(t, x)^2 on the default kernel grid
    double j2_truncated = 0.0;
    double epsilon = 0.0;
    double spectral_cutoff = 0.0;
    bool converged = false;
    /// Slope of log J2 against log eps; only set when >= 4 levels were computed.
    std::optional<double> growth_exponent_fit;
    std::vector<double> epsilons;
    std::vector<double> j2_values;
    /// Least-squares fit of J2 against ln(1/eps) over the scan: slope and R^2.
    std::optional<double> log_growth_slope;
    std::optional<double> log_growth_r2;
};

/// Relative change below which a cutoff refinement counts as converged.
inline constexpr double kConvergenceTolerance = 0.01;

/// J2 restricted to lags s in [eps, t] and frequencies |y| <= R. `converged`
/// is true when halving eps and doubling R each move the value by less than
/// kConvergenceTolerance. j1 is evaluated at `x` (origin when empty).
VarianceReport spectral_variance(const kernel::EquationSpec& spec, double t, double epsilon,
                                 double spectral_cutoff, const std::vector<double>& x = {});

/// Only the truncated integral, without the convergence probes.
double j2_truncated(const kernel::EquationSpec& spec, double t, double epsilon,
                    double spectral_cutoff);

/// Frequency cutoff with lambda eps^alpha R^2 = 1e3: beyond it the squared
/// symbol has decayed at every lag s >= eps.
double default_spectral_cutoff(const kernel::EquationSpec& spec, double epsilon);

/// eps = 2^-3, ..., 2^-12 (times t).
std::vector<double> default_epsilon_levels(double t);

/// J2 at each eps level (decreasing, >= 4 levels) with R fixed by the
/// smallest level. converged is true when the last refinement changes J2 by
/// less than kConvergenceTolerance and doubling R does too.
VarianceReport divergence_scan(const kernel::EquationSpec& spec, double t,
                               const std::vector<double>& epsilon_levels);

}  // namespace fracheat::mildness
