#include "experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "fracheat/caputo.hpp"
#include "fracheat/errors.hpp"
#include "fracheat/mildness.hpp"
#include "fracheat/specfun.hpp"

#ifndef FRACHEAT_VERSION
#define FRACHEAT_VERSION "unknown"
#endif

namespace fracheat::cli {

using ojson = nlohmann::ordered_json;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// "# " metadata lines heading every CSV file.
std::string csv_preamble(const ExperimentConfig& c, const std::vector<std::string>& warnings) {
    std::string out = "# fracheat " + version() + "\n";
    out += "# command: " + to_string(c.command) + "\n";
    out += "# config: " + resolved_config(c).dump() + "\n";
    for (const auto& w : warnings) out += "# warning: " + w + "\n";
    return out;
}

ojson json_head(const ExperimentConfig& c) {
    ojson j;
    j["version"] = version();
    j["command"] = to_string(c.command);
    j["config"] = resolved_config(c);
    return j;
}

std::string finish(const ojson& j) { return j.dump(2) + "\n"; }

// One row per node: t, x1..xd, i1, i2, y, last axis fastest.
struct Field {
    double t = 0.0;
    int d = 1;
    int n = 0;
    double dx = 0.0;
    std::vector<double> i1, i2;
    std::vector<std::string> warnings;

    [[nodiscard]] double coordinate(int m) const { return (m - n / 2) * dx; }
};

std::string render_field(const ExperimentConfig& c, const Field& f) {
    const std::size_t total = f.i1.size();
    if (c.format == Format::csv) {
        std::string out = csv_preamble(c, f.warnings);
        out += "t";
        for (int k = 1; k <= f.d; ++k) out += ",x" + std::to_string(k);
        out += ",i1,i2,y\n";
        std::vector<int> idx(static_cast<std::size_t>(f.d), 0);
        const std::string t = num(f.t);
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t rest = flat;
            for (int k = f.d - 1; k >= 0; --k) {
                idx[static_cast<std::size_t>(k)] = static_cast<int>(rest % static_cast<std::size_t>(f.n));
                rest /= static_cast<std::size_t>(f.n);
            }
            out += t;
            for (int m : idx) out += "," + num(f.coordinate(m));
            out += "," + num(f.i1[flat]) + "," + num(f.i2[flat]) + "," + num(f.i1[flat] + f.i2[flat]) + "\n";
        }
        return out;
    }
    ojson j = json_head(c);
    j["warnings"] = f.warnings;
    std::vector<double> axis;
    for (int m = 0; m < f.n; ++m) axis.push_back(f.coordinate(m));
    std::vector<double> y(total);
    for (std::size_t i = 0; i < total; ++i) y[i] = f.i1[i] + f.i2[i];
    j["field"] = {{"t", f.t}, {"d", f.d}, {"axis", axis}, {"i1", f.i1}, {"i2", f.i2}, {"y", y}};
    return finish(j);
}

Field kernel_field(const ExperimentConfig& c) {
    Field f;
    f.t = c.t;
    f.d = c.spec.d;
    if (c.lattice) {
        f.n = c.lattice->n_x;
        f.dx = c.lattice->dx();
        f.i1 = stochastic::i1_on_lattice(c.spec, *c.lattice);
    } else {
        const auto grid = c.grid ? *c.grid : kernel::default_grid(c.spec, c.t);
        const auto k = kernel::i1_field(c.spec, c.t, grid);
        f.n = k.n;
        f.dx = k.dx;
        f.i1 = k.values;
        if (k.boundary_max() > kernel::kBoundaryTolerance * k.max_abs())
            f.warnings.push_back("field has not decayed at the lattice boundary");
    }
    f.i2.assign(f.i1.size(), 0.0);
    return f;
}

std::string run_ml(const ExperimentConfig& c) {
    const specfun::MittagLeffler e({c.ml.alpha, c.ml.beta});
    std::vector<double> values;
    for (double z : c.ml.z) values.push_back(e(z));
    if (c.format == Format::csv) {
        std::string out = csv_preamble(c, {}) + "z,value\n";
        for (std::size_t i = 0; i < values.size(); ++i) out += num(c.ml.z[i]) + "," + num(values[i]) + "\n";
        return out;
    }
    ojson j = json_head(c);
    j["z"] = c.ml.z;
    j["values"] = values;
    return finish(j);
}

std::string run_caputo(const ExperimentConfig& c) {
    const auto& cc = c.caputo;
    const auto order = caputo::CaputoOrder::from_alpha(cc.alpha);
    std::vector<double> value, reference;
    for (double x : cc.x) {
        if (cc.function == "power") {
            const double p = cc.exponent;
            double factor = 1.0;
            for (int k = 0; k < order.n; ++k) factor *= p - k;
            const auto r = caputo::caputo_derivative(
                [p, factor, n = order.n](double u) { return factor * std::pow(u, p - n); }, order, x, cc.panels);
            value.push_back(r.value);
            reference.push_back(specfun::gamma_fn(p + 1.0) / specfun::gamma_fn(p + 1.0 - cc.alpha) *
                                std::pow(x, p - cc.alpha));
        } else {
            value.push_back(caputo::ml_ode_residual(cc.alpha, cc.c, x, cc.panels));
            reference.push_back(0.0);
        }
    }
    const bool power = cc.function == "power";
    if (c.format == Format::csv) {
        std::string out = csv_preamble(c, {});
        out += power ? "x,value,reference,abs_error\n" : "t,residual\n";
        for (std::size_t i = 0; i < cc.x.size(); ++i) {
            out += num(cc.x[i]) + "," + num(value[i]);
            if (power) out += "," + num(reference[i]) + "," + num(std::abs(value[i] - reference[i]));
            out += "\n";
        }
        return out;
    }
    ojson j = json_head(c);
    j[power ? "x" : "t"] = cc.x;
    j[power ? "value" : "residual"] = value;
    if (power) j["reference"] = reference;
    return finish(j);
}

std::string run_simulate(const ExperimentConfig& c, const RunOptions& o) {
    stochastic::SimulationOptions so;
    so.workers = o.workers;
    const auto s = stochastic::simulate_field(c.spec, *c.lattice, c.seed, so);
    Field f;
    f.t = c.t;
    f.d = c.spec.d;
    f.n = c.lattice->n_x;
    f.dx = c.lattice->dx();
    f.i1 = s.i1_part;
    f.i2 = s.i2_part;
    f.warnings = s.warnings;
    return render_field(c, f);
}

ojson moments_json(const stochastic::VarianceEstimate& e, const std::vector<double>& point) {
    return {{"point", point},
            {"mean", e.mean},
            {"variance", e.variance},
            {"std_error_of_variance", e.std_error_of_variance},
            {"n_samples", e.n_samples},
            {"warnings", e.warnings}};
}

std::string run_variance(const ExperimentConfig& c, const RunOptions& o) {
    stochastic::SimulationOptions so;
    so.workers = o.workers;
    const auto e = stochastic::estimate_moments(c.spec, *c.lattice, c.point, c.n_samples, c.seed, so);
    const double cutoff = mildness::default_spectral_cutoff(c.spec, c.epsilon);
    const auto s = mildness::spectral_variance(c.spec, c.t, c.epsilon, cutoff, c.point);
    std::optional<double> closed;
    if (c.spec.alpha == 1.0 && c.spec.d == 1) closed = mildness::closed_form_j2_alpha1(c.spec, c.t);

    if (c.format == Format::csv) {
        std::string out = csv_preamble(c, e.warnings) + "quantity,value\n";
        out += "mean," + num(e.mean) + "\n";
        out += "variance," + num(e.variance) + "\n";
        out += "std_error_of_variance," + num(e.std_error_of_variance) + "\n";
        out += "n_samples," + std::to_string(e.n_samples) + "\n";
        out += "spectral_j1," + num(s.j1) + "\n";
        out += "spectral_j2," + num(s.j2_truncated) + "\n";
        out += "spectral_converged," + std::string(s.converged ? "1" : "0") + "\n";
        if (closed) out += "closed_form_j2," + num(*closed) + "\n";
        return out;
    }
    ojson j = json_head(c);
    j["monte_carlo"] = moments_json(e, c.point);
    j["spectral"] = {{"j1", s.j1},
                     {"j2_truncated", s.j2_truncated},
                     {"epsilon", s.epsilon},
                     {"spectral_cutoff", s.spectral_cutoff},
                     {"converged", s.converged}};
    j["closed_form_j2"] = closed ? ojson(*closed) : ojson(nullptr);
    return finish(j);
}

ojson mildness_json(const ExperimentConfig& c) {
    const auto v = mildness::classify(c.spec.alpha, c.spec.d);
    const auto r = mildness::divergence_scan(c.spec, c.t, c.epsilon_levels);
    ojson j = json_head(c);
    j["status"] = mildness::to_string(v.status);
    j["theorem_case"] = mildness::to_string(v.theorem_case);
    j["exponent"] = v.exponent;
    j["criterion_rhs"] = v.criterion_rhs;
    auto opt = [](const std::optional<double>& x) { return x ? ojson(*x) : ojson(nullptr); };
    j["scan"] = {{"epsilons", r.epsilons},
                 {"j2_values", r.j2_values},
                 {"growth_exponent_fit", opt(r.growth_exponent_fit)},
                 {"converged", r.converged},
                 {"spectral_cutoff", r.spectral_cutoff},
                 {"log_growth_slope", opt(r.log_growth_slope)},
                 {"log_growth_r2", opt(r.log_growth_r2)},
                 {"j1", r.j1}};
    return j;
}

std::string run_mildness(const ExperimentConfig& c) {
    const ojson j = mildness_json(c);
    if (c.format == Format::json) return finish(j);
    std::string out = csv_preamble(c, {});
    out += "# status: " + j["status"].get<std::string>() + "\n";
    out += "# theorem_case: " + j["theorem_case"].get<std::string>() + "\n";
    out += "# exponent: " + num(j["exponent"].get<double>()) + "\n";
    out += "# criterion_rhs: " + num(j["criterion_rhs"].get<double>()) + "\n";
    out += "# converged: " + std::string(j["scan"]["converged"].get<bool>() ? "true" : "false") + "\n";
    out += "epsilon,j2\n";
    const auto& eps = j["scan"]["epsilons"];
    const auto& vals = j["scan"]["j2_values"];
    for (std::size_t i = 0; i < eps.size(); ++i)
        out += num(eps[i].get<double>()) + "," + num(vals[i].get<double>()) + "\n";
    return out;
}

std::string run_example2(const ExperimentConfig& c, const RunOptions& o) {
    ojson j = mildness_json(c);
    const auto& l = *c.lattice;
    const auto i1 = stochastic::i1_on_lattice(c.spec, l);
    double mass = 0.0;
    for (double v : i1) mass += v;
    mass *= std::pow(l.dx(), l.d);
    std::vector<double> axis;
    for (int m = 0; m < l.n_x; ++m) axis.push_back(l.coordinate(m));
    j["kernel"] = {{"t", c.t}, {"d", l.d}, {"axis", axis}, {"mass", mass}, {"i1", i1}};
    stochastic::SimulationOptions so;
    so.workers = o.workers;
    j["moments"] = moments_json(stochastic::estimate_moments(c.spec, l, c.point, c.n_samples, c.seed, so), c.point);
    return finish(j);
}

}  // namespace

std::string version() { return FRACHEAT_VERSION; }

std::string render(const ExperimentConfig& c, const RunOptions& o) {
    switch (c.command) {
        case Command::ml: return run_ml(c);
        case Command::caputo: return run_caputo(c);
        case Command::kernel: return render_field(c, kernel_field(c));
        case Command::simulate: return run_simulate(c, o);
        case Command::variance: return run_variance(c, o);
        case Command::mildness:
        case Command::example1: return run_mildness(c);
        case Command::example2: return run_example2(c, o);
    }
    throw ConfigError("command: not handled");
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
    const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    const auto tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error("cannot write " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot rename onto " + path.string());
    }
}

}  // namespace fracheat::cli
