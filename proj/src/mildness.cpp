#include "fracheat/mildness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracheat/errors.hpp"
#include "fracheat/quadrature.hpp"
#include "fracheat/specfun.hpp"

namespace fracheat::mildness {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCutoffScale = 1e3;
constexpr double kOuterTol = 1e-10;
constexpr double kInnerTol = 1e-12;

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0, 2)");
}

// H(U) = int_0^sqrt(U) E_{alpha,alpha}(-v^2)^2 v^{d-1} dv, from cumulative
// panel integrals plus one partial panel.
class SpectralMass {
public:
    SpectralMass(double alpha, int d) : e_({alpha, alpha}), d_(d) {
        double v = 0.0;
        breaks_.push_back(0.0);
        cumulative_.push_back(0.0);
        while (v < 1e5) {
            const double next = v < 8.0 ? v + 0.25 : v * 1.25;
            const auto r = quad::gauss_kronrod([this](double x) { return integrand(x); }, v, next, kInnerTol);
            breaks_.push_back(next);
            cumulative_.push_back(cumulative_.back() + r.value);
            v = next;
        }
    }

    double operator()(double u) const {
        const double v = std::sqrt(u);
        if (v >= breaks_.back()) return cumulative_.back();
        const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), v);
        const std::size_t k = static_cast<std::size_t>(it - breaks_.begin()) - 1;
        if (v == breaks_[k]) return cumulative_[k];
        const auto r = quad::gauss_kronrod([this](double x) { return integrand(x); }, breaks_[k], v, kInnerTol);
        return cumulative_[k] + r.value;
    }

private:
    double integrand(double v) const {
        const double e = e_(-v * v);
        return e * e * std::pow(v, d_ - 1);
    }

    specfun::MittagLefflerTable e_;
    int d_;
    std::vector<double> breaks_;
    std::vector<double> cumulative_;
};

double surface_area(int d) { return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d); }

double j2_with(const SpectralMass& mass, const kernel::EquationSpec& spec, double t, double eps, double cutoff) {
    if (spec.sigma == 0.0) return 0.0;
    const int d = spec.d;
    const double p = j2_exponent(spec.alpha, d);
    const double c = spec.sigma * spec.sigma * std::pow(2.0 * kPi, -d) * surface_area(d) *
                     std::pow(spec.lambda, -0.5 * d);
    const double scale = spec.lambda * cutoff * cutoff;
    auto f = [&](double w) {
        const double s = std::exp(w);
        return std::pow(s, p + 1.0) * mass(scale * std::pow(s, spec.alpha));
    };
    const auto r = quad::gauss_kronrod(f, std::log(eps), std::log(t), kOuterTol);
    if (!r.converged) throw QuadratureError("spectral variance integral did not converge");
    return c * r.value;
}

void check_variance_args(const kernel::EquationSpec& spec, double t, double eps, double cutoff) {
    spec.validate();
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("t must be positive");
    if (!(eps > 0.0 && eps < t)) throw DomainError("epsilon must lie in (0, t)");
    if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw DomainError("spectral cutoff must be positive");
}

double j1_at(const kernel::EquationSpec& spec, double t, const std::vector<double>& x) {
    std::vector<double> point = x.empty() ? std::vector<double>(static_cast<std::size_t>(spec.d), 0.0) : x;
    const auto v = kernel::i1_points(spec, t, kernel::default_grid(spec, t), {point});
    return v.values[0] * v.values[0];
}

double relative_change(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

// Least-squares line y = a + b x: returns (b, R^2).
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    const double r2 = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
    return {slope, r2};
}

}  // namespace

std::string to_string(Status s) {
    switch (s) {
        case Status::Mild: return "Mild";
        case Status::NotMild: return "NotMild";
        case Status::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::string to_string(TheoremCase c) {
    switch (c) {
        case TheoremCase::alpha_eq_1: return "alpha_eq_1";
        case TheoremCase::alpha_gt_1: return "alpha_gt_1";
        case TheoremCase::alpha_lt_1: return "alpha_lt_1";
        case TheoremCase::remark_unknown: return "remark_unknown";
    }
    return "remark_unknown";
}

double j2_exponent(double alpha, int d) {
    check_alpha(alpha);
    if (d < 1) throw DomainError("d must be a positive integer");
    return 2.0 * alpha - 2.0 - 0.5 * alpha * d;
}

double criterion_rhs(double alpha) {
    check_alpha(alpha);
    return 4.0 - 2.0 / alpha;
}

MildnessVerdict classify(double alpha, int d) {
    MildnessVerdict v;
    v.exponent = j2_exponent(alpha, d);
    v.criterion_rhs = criterion_rhs(alpha);
    if (alpha == 1.0) {
        v.theorem_case = TheoremCase::alpha_eq_1;
        v.status = d == 1 ? Status::Mild : Status::NotMild;
    } else if (alpha > 1.0) {
        if (d <= 2) {
            v.theorem_case = TheoremCase::alpha_gt_1;
            v.status = Status::Mild;
        } else {
            v.theorem_case = TheoremCase::remark_unknown;
            v.status = Status::Unknown;
        }
    } else {
        v.theorem_case = TheoremCase::alpha_lt_1;
        v.status = Status::NotMild;
    }
    return v;
}

double closed_form_j2_alpha1(const kernel::EquationSpec& spec, double t) {
    spec.validate();
    if (spec.alpha != 1.0) throw DomainError("closed form requires alpha = 1");
    if (!(t > 0.0)) throw DomainError("t must be positive");
    if (spec.d != 1) throw DivergenceError("J2 is infinite for alpha = 1 and d >= 2");
    return spec.sigma * spec.sigma * std::sqrt(t) / std::sqrt(2.0 * kPi * spec.lambda);
}

double default_spectral_cutoff(const kernel::EquationSpec& spec, double epsilon) {
    spec.validate();
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
    return std::sqrt(kCutoffScale / (spec.lambda * std::pow(epsilon, spec.alpha)));
}

std::vector<double> default_epsilon_levels(double t) {
    std::vector<double> out;
    for (int k = 3; k <= 12; ++k) out.push_back(t * std::ldexp(1.0, -k));
    return out;
}

double j2_truncated(const kernel::EquationSpec& spec, double t, double epsilon, double spectral_cutoff) {
    check_variance_args(spec, t, epsilon, spectral_cutoff);
    const SpectralMass mass(spec.alpha, spec.d);
    return j2_with(mass, spec, t, epsilon, spectral_cutoff);
}

VarianceReport spectral_variance(const kernel::EquationSpec& spec, double t, double epsilon,
                                 double spectral_cutoff, const std::vector<double>& x) {
    check_variance_args(spec, t, epsilon, spectral_cutoff);
    const SpectralMass mass(spec.alpha, spec.d);
    VarianceReport r;
    r.epsilon = epsilon;
    r.spectral_cutoff = spectral_cutoff;
    r.j1 = j1_at(spec, t, x);
    r.j2_truncated = j2_with(mass, spec, t, epsilon, spectral_cutoff);
    const double finer_eps = j2_with(mass, spec, t, 0.5 * epsilon, spectral_cutoff);
    const double wider_r = j2_with(mass, spec, t, epsilon, 2.0 * spectral_cutoff);
    r.converged = relative_change(finer_eps, r.j2_truncated) < kConvergenceTolerance &&
                  relative_change(wider_r, r.j2_truncated) < kConvergenceTolerance;
    r.epsilons = {epsilon};
    r.j2_values = {r.j2_truncated};
    return r;
}

VarianceReport divergence_scan(const kernel::EquationSpec& spec, double t,
                               const std::vector<double>& epsilon_levels) {
    if (epsilon_levels.size() < 4) throw DomainError("a divergence scan needs at least 4 cutoff levels");
    for (std::size_t i = 1; i < epsilon_levels.size(); ++i)
        if (!(epsilon_levels[i] < epsilon_levels[i - 1]))
            throw DomainError("epsilon levels must be strictly decreasing");
    const double eps_min = epsilon_levels.back();
    const double cutoff = default_spectral_cutoff(spec, eps_min);
    for (double e : epsilon_levels) check_variance_args(spec, t, e, cutoff);

    const SpectralMass mass(spec.alpha, spec.d);
    VarianceReport r;
    r.epsilon = eps_min;
    r.spectral_cutoff = cutoff;
    r.j1 = j1_at(spec, t, {});
    r.epsilons = epsilon_levels;
    for (double e : epsilon_levels) r.j2_values.push_back(j2_with(mass, spec, t, e, cutoff));
    r.j2_truncated = r.j2_values.back();

    const std::size_t n = r.j2_values.size();
    const double wider_r = j2_with(mass, spec, t, eps_min, 2.0 * cutoff);
    r.converged = relative_change(r.j2_values[n - 1], r.j2_values[n - 2]) < kConvergenceTolerance &&
                  relative_change(wider_r, r.j2_truncated) < kConvergenceTolerance;

    if (r.j2_truncated > 0.0) {
        std::vector<double> log_eps, log_j, inv;
        for (std::size_t i = 0; i < n; ++i) {
            log_eps.push_back(std::log(epsilon_levels[i]));
            log_j.push_back(std::log(r.j2_values[i]));
            inv.push_back(-std::log(epsilon_levels[i]));
        }
        r.growth_exponent_fit = fit_line(log_eps, log_j).first;
        const auto [slope, r2] = fit_line(inv, r.j2_values);
        r.log_growth_slope = slope;
        r.log_growth_r2 = r2;
    }
    return r;
}

}  // namespace fracheat::mildness
