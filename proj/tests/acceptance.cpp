// Acceptance run: one PASS/FAIL line per criterion, with its runtime budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "experiment.hpp"
#include "fracheat/caputo.hpp"
#include "fracheat/kernel.hpp"
#include "fracheat/mildness.hpp"
#include "fracheat/specfun.hpp"
#include "fracheat/stochastic.hpp"
#include "fracheat/transforms.hpp"
#include "oracles/ml_mp.hpp"

using namespace fracheat;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Taylor series of E_{p/q,beta}(-x) in enough digits to absorb the
// cancellation, about x^{q/p} / ln 10 of them.
double mp_series(int p, int q, double beta, double x) {
    const double lost = std::pow(x, static_cast<double>(q) / p) / std::log(10.0);
    if (lost < 30) return oracle::ml_series<50>(p, q, beta, -x);
    if (lost < 130) return oracle::ml_series<150>(p, q, beta, -x);
    if (lost < 380) return oracle::ml_series<400>(p, q, beta, -x);
    return oracle::ml_series<1150>(p, q, beta, -x);
}

Outcome criterion1() {
    double worst_exp = 0.0, worst_cos = 0.0, worst_erfc = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double z = -30.0 + 35.0 * i / 99.0;
        worst_exp = std::max(worst_exp, rel_err(specfun::mittag_leffler({1.0, 1.0}, z), std::exp(z)));
    }
    for (int i = 0; i <= 200; ++i) {
        const double x = 10.0 * i / 200.0;
        worst_cos = std::max(worst_cos, std::abs(specfun::mittag_leffler({2.0, 1.0}, -x * x) - std::cos(x)));
        worst_erfc = std::max(worst_erfc, rel_err(specfun::mittag_leffler({0.5, 1.0}, -x), oracle::exp_sq_erfc(x)));
    }
    return {worst_exp <= 1e-10 && worst_cos <= 1e-9 && worst_erfc <= 1e-8,
            "exp rel " + fmt("%.1e", worst_exp) + ", cos abs " + fmt("%.1e", worst_cos) + ", erfc rel " +
                fmt("%.1e", worst_erfc)};
}

Outcome criterion2() {
    struct Order {
        int p, q;
        double beta;
    };
    double worst = 0.0;
    int library_series = 0, mp = 0;
    for (const auto& o : {Order{1, 2, 0.5}, Order{1, 2, 1.0}, Order{4, 5, 0.9}}) {
        const specfun::MittagLeffler ml({static_cast<double>(o.p) / o.q, o.beta});
        for (int i = 0; i < 40; ++i) {
            const double x = 1e-3 * std::pow(5e4, i / 39.0);
            const auto s = ml.series(-x);
            double series;
            if (s.converged && s.rounding_bound < 1e-9 * std::abs(s.value)) {
                series = s.value;
                ++library_series;
            } else {
                series = mp_series(o.p, o.q, o.beta, x);
                ++mp;
            }
            worst = std::max(worst, rel_err(ml.spectral(x), series));
        }
    }
    return {worst <= 1e-5, "worst rel " + fmt("%.1e", worst) + " over " + std::to_string(library_series) +
                               " double-series and " + std::to_string(mp) + " multiprecision-series points"};
}

Outcome criterion3() {
    using transforms::LaplaceIdentity;
    double worst = 0.0;
    int skipped = 0, count = 0;
    for (double a : {0.5, 1.0, 1.5})
        for (double b : {0.5, 1.0, 2.0})
            for (double s : {1.0, 2.0, 4.0})
                for (auto kind : {LaplaceIdentity::L1, LaplaceIdentity::L2, LaplaceIdentity::L3}) {
                    if (kind == LaplaceIdentity::L2 && std::pow(s, a) <= b) {
                        ++skipped;  // outside the region of convergence
                        continue;
                    }
                    worst = std::max(worst, transforms::laplace_identity_residual(kind, a, b, s));
                    ++count;
                }
    double worst_kernel = 0.0;
    for (auto o : {specfun::MLOrder{0.5, 0.5}, {0.5, 1.0}, {0.8, 0.9}})
        for (double t : {0.5, 1.0, 2.0})
            worst_kernel = std::max(worst_kernel, transforms::kernel_representation_residual(o, t));
    return {worst <= 1e-6 && worst_kernel <= 1e-5,
            "identities " + fmt("%.1e", worst) + " on " + std::to_string(count) + " cases (" +
                std::to_string(skipped) + " L2 cases with s^a <= b skipped), kernel rep " +
                fmt("%.1e", worst_kernel)};
}

Outcome criterion4() {
    double worst = 0.0;
    auto one = [](double) { return 1.0; };
    for (int i = 1; i <= 9; ++i) {
        const double a = 0.1 * i;
        for (double x : {0.5, 1.0, 2.0}) {
            const double ref = std::pow(x, 1.0 - a) / std::tgamma(2.0 - a);
            worst = std::max(worst, rel_err(caputo::caputo_derivative(one, caputo::CaputoOrder::from_alpha(a), x).value, ref));
        }
    }
    const double half = caputo::caputo_derivative(one, caputo::CaputoOrder::from_alpha(0.5), 1.0).value;
    const double half_err = rel_err(half, 2.0 / std::sqrt(std::numbers::pi));
    return {worst <= 1e-6 && half_err <= 1e-6,
            "worst rel " + fmt("%.1e", worst) + ", D^1/2 x at 1 = " + fmt("%.12f", half)};
}

Outcome criterion5() {
    double worst = 0.0;
    for (double a : {0.3, 1.1, 1.9})
        for (double c : {0.1, 1.0, 10.0})
            for (double t : {0.1, 1.0, 2.0}) worst = std::max(worst, caputo::ml_ode_residual(a, c, t));
    return {worst <= 1e-4, "worst residual " + fmt("%.1e", worst) + " over 27 points"};
}

Outcome criterion6() {
    double worst_gauss = 0.0;
    for (int d : {1, 2}) {
        const kernel::EquationSpec spec{1.0, 1.0, 1.0, d};
        const auto f = kernel::i1_field(spec, 1.0, kernel::default_grid(spec, 1.0));
        const double norm = std::pow(4.0 * std::numbers::pi, -0.5 * d);
        for (std::size_t flat = 0; flat < f.values.size(); ++flat) {
            double r2 = 0.0;
            std::size_t rest = flat;
            for (int k = 0; k < d; ++k) {
                const double x = f.coordinate(static_cast<int>(rest % static_cast<std::size_t>(f.n)));
                rest /= static_cast<std::size_t>(f.n);
                r2 += x * x;
            }
            worst_gauss = std::max(worst_gauss, std::abs(f.values[flat] - norm * std::exp(-r2 / 4.0)));
        }
    }
    double worst_mass = 0.0;
    for (double a : {0.5, 1.0, 1.5})
        for (int d : {1, 2}) {
            const kernel::EquationSpec spec{a, 1.0, 1.0, d};
            const auto f = kernel::i1_field(spec, 1.0, kernel::default_grid(spec, 1.0));
            worst_mass = std::max(worst_mass, std::abs(kernel::mass_integral(f) - 1.0));
        }
    return {worst_gauss <= 1e-6 && worst_mass <= 1e-4,
            "Gaussian abs " + fmt("%.1e", worst_gauss) + ", mass " + fmt("%.1e", worst_mass)};
}

Outcome criterion7() {
    using mildness::Status;
    struct Row {
        double a;
        int d;
        Status s;
    };
    const Row rows[] = {{1.0, 1, Status::Mild},     {1.0, 2, Status::NotMild},  {1.5, 1, Status::Mild},
                        {1.5, 2, Status::Mild},     {1.5, 3, Status::Unknown},  {0.5, 1, Status::NotMild},
                        {0.5, 2, Status::NotMild},  {0.5, 3, Status::NotMild},  {0.5, 10, Status::NotMild}};
    int agree = 0;
    for (const auto& r : rows) agree += mildness::classify(r.a, r.d).status == r.s;
    return {agree == 9, std::to_string(agree) + "/9 cases agree"};
}

Outcome criterion8() {
    const kernel::EquationSpec spec{1.0, 1.0, 1.0, 1};
    const double exact = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    const double eps = 1e-6;
    const auto sv = mildness::spectral_variance(spec, 1.0, eps, mildness::default_spectral_cutoff(spec, eps));
    const bool spectral_ok = std::abs(sv.j2_truncated - exact) <= 0.01 * exact;
    const stochastic::LatticeSpec lattice{1, 1.0, 256, 8.0, 256};
    const auto e = stochastic::estimate_moments(spec, lattice, {0.0}, 2000, 12345);
    const double allowed = 5.0 * e.std_error_of_variance + stochastic::kLatticeBiasBudget * exact;
    const bool mc_ok = std::abs(e.variance - exact) <= allowed && stochastic::kLatticeBiasBudget <= 0.10;
    return {spectral_ok && mc_ok, "spectral " + fmt("%.6f", sv.j2_truncated) + ", MC " + fmt("%.5f", e.variance) +
                                      " +- " + fmt("%.5f", e.std_error_of_variance) + " (|diff| " +
                                      fmt("%.4f", std::abs(e.variance - exact)) + " <= " + fmt("%.4f", allowed) +
                                      "), closed form " + fmt("%.6f", exact)};
}

Outcome criterion9() {
    const auto levels = mildness::default_epsilon_levels(1.0);
    auto scan = [&](double a, int d) { return mildness::divergence_scan({a, 1.0, 1.0, d}, 1.0, levels); };
    auto monotone = [](const mildness::VarianceReport& r) {
        for (std::size_t k = 1; k < r.j2_values.size(); ++k)
            if (!(r.j2_values[k] > r.j2_values[k - 1])) return false;
        return r.j2_values.size() >= 4;
    };
    bool ok = true;
    std::string detail;
    const auto log = scan(1.0, 2);
    ok = ok && !log.converged && log.log_growth_r2 && *log.log_growth_r2 >= 0.99;
    detail += "(1,2) R^2 " + fmt("%.5f", log.log_growth_r2.value_or(0.0)) + (log.converged ? " conv" : " div");
    for (int d : {1, 2}) {
        const auto r = scan(0.5, d);
        ok = ok && !r.converged && monotone(r);
        detail += "; (0.5," + std::to_string(d) + ")" + (r.converged ? " conv" : " div") +
                  (monotone(r) ? " monotone" : " not monotone");
    }
    for (int d : {1, 2}) {
        const auto r = scan(1.5, d);
        ok = ok && r.converged;
        const double last = std::abs(r.j2_values.back() / r.j2_values[r.j2_values.size() - 2] - 1.0);
        detail += "; (1.5," + std::to_string(d) + ")" + (r.converged ? " conv" : " div") + " last change " +
                  fmt("%.2f%%", 100.0 * last);
    }
    return {ok, detail};
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion10() {
    const auto dir = std::filesystem::temp_directory_path() / ("fracheat_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const char* docs[] = {
        R"({"spec": {"alpha": 1.5, "d": 2}, "lattice": {"n_t": 32, "n_x": 64}, "n_samples": 200, "seed": 7})",
        R"({"spec": {"alpha": 0.7, "d": 1}, "lattice": {"n_t": 128, "n_x": 256}, "n_samples": 300, "seed": 8})",
        R"({"spec": {"alpha": 1.0, "d": 1}, "lattice": {"n_t": 64, "n_x": 64}, "n_samples": 500, "seed": 9})",
    };
    int files = 0, identical = 0;
    for (auto command : {cli::Command::simulate, cli::Command::variance}) {
        for (const char* doc : docs) {
            for (auto format : {cli::Format::csv, cli::Format::json}) {
                auto c = cli::parse_config(nlohmann::json::parse(doc), command);
                c.format = format;
                std::vector<std::string> contents;
                int run = 0;
                for (int workers : {1, 1, 3, 8}) {
                    cli::RunOptions o;
                    o.workers = workers;
                    const auto path = dir / ("run" + std::to_string(run++) + ".out");
                    cli::write_atomically(path, cli::render(c, o));
                    contents.push_back(read_file(path));
                }
                ++files;
                bool same = true;
                for (const auto& s : contents) same = same && s == contents[0] && !s.empty();
                identical += same;
            }
        }
    }
    std::filesystem::remove_all(dir);
    return {identical == files, std::to_string(identical) + "/" + std::to_string(files) +
                                    " experiments byte-identical over reruns and 1/3/8 workers"};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"Mittag-Leffler conformance", 5, criterion1},   {"dual-path consistency", 30, criterion2},
        {"Laplace pairs", 60, criterion3},               {"Caputo oracle", 10, criterion4},
        {"fractional ODE residual", 60, criterion5},     {"classical reduction", 60, criterion6},
        {"mildness classifier", 1, criterion7},          {"variance reproduction", 120, criterion8},
        {"divergence scans", 120, criterion9},           {"reproducibility", 60, criterion10},
    };
    int failed = 0;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds < c.budget;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("criterion %2d %s  %s: %s [%.2f s, budget %.0f s%s]\n", index, pass ? "PASS" : "FAIL", c.name,
                    o.detail.c_str(), seconds, c.budget, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d/10 criteria passed\n", 10 - failed);
    return failed == 0 ? 0 : 1;
}
