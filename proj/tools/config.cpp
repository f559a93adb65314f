#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "experiment.hpp"
#include "fracheat/errors.hpp"
#include "fracheat/mildness.hpp"

namespace fracheat::cli {

using nlohmann::json;

namespace {

const std::pair<Command, const char*> kCommandNames[] = {
    {Command::ml, "ml"},           {Command::caputo, "caputo"},     {Command::kernel, "kernel"},
    {Command::simulate, "simulate"}, {Command::variance, "variance"}, {Command::mildness, "mildness"},
    {Command::example1, "example1"}, {Command::example2, "example2"},
};

[[noreturn]] void fail(const std::string& field, const std::string& message) {
    throw ConfigError(field + ": " + message);
}

// Typed access to one JSON object; remembers which keys were read so that
// leftovers can be reported as unknown.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) fail(path_.empty() ? "config" : path_, "expected an object");
    }

    [[nodiscard]] std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out) {
        if (const json* v = find(key)) {
            if (!v->is_number()) fail(field(key), "expected a number");
            out = v->get<double>();
            if (!std::isfinite(out)) fail(field(key), "must be finite");
        }
    }

    void integer(const std::string& key, int& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_integer()) fail(field(key), "expected an integer");
            const auto value = v->get<long long>();
            if (value < -(1LL << 31) || value >= (1LL << 31)) fail(field(key), "out of range");
            out = static_cast<int>(value);
        }
    }

    void unsigned64(const std::string& key, std::uint64_t& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_unsigned()) fail(field(key), "expected a non-negative integer");
            out = v->get<std::uint64_t>();
        }
    }

    void string(const std::string& key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) fail(field(key), "expected a string");
            out = v->get<std::string>();
        }
    }

    void numbers(const std::string& key, std::vector<double>& out) {
        if (const json* v = find(key)) {
            if (!v->is_array()) fail(field(key), "expected an array of numbers");
            out.clear();
            for (std::size_t i = 0; i < v->size(); ++i) {
                const json& e = (*v)[i];
                if (!e.is_number()) fail(field(key) + "[" + std::to_string(i) + "]", "expected a number");
                out.push_back(e.get<double>());
            }
        }
    }

    void reject_unknown() const {
        for (const auto& [key, value] : node_.items())
            if (!seen_.count(key)) fail(field(key), "unknown field");
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

// Runs a module validator and re-labels its DomainError with the field.
template <class F>
void check(const std::string& field, F&& validate) {
    try {
        validate();
    } catch (const DomainError& e) {
        const std::string msg = e.what();
        const auto space = msg.find(' ');
        if (msg.rfind(field + ".", 0) == 0 && space != std::string::npos)
            fail(msg.substr(0, space), msg.substr(space + 1));
        fail(field, msg);
    }
}

void apply_presets(ExperimentConfig& c) {
    if (c.command == Command::example1) {
        c.spec.alpha = 0.5;
        c.spec.d = 2;
        c.format = Format::json;
    } else if (c.command == Command::example2) {
        c.spec.alpha = 1.5;
        c.spec.d = 2;
        c.format = Format::json;
        c.n_samples = kDefaults.example2_n_samples;
    }
}

}  // namespace

std::string to_string(Command c) {
    for (const auto& [value, name] : kCommandNames)
        if (value == c) return name;
    return "?";
}

std::string to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

Command parse_command(const std::string& name, const std::string& field) {
    for (const auto& [value, n] : kCommandNames)
        if (name == n) return value;
    fail(field, "unknown command '" + name + "'");
}

Format parse_format(const std::string& name, const std::string& field) {
    if (name == "csv") return Format::csv;
    if (name == "json") return Format::json;
    fail(field, "expected csv or json, got '" + name + "'");
}

ExperimentConfig parse_config(const json& doc, Command command) {
    ExperimentConfig c;
    c.command = command;
    c.t = kDefaults.t;
    c.seed = kDefaults.seed;
    c.n_samples = kDefaults.n_samples;
    apply_presets(c);
    const bool preset = command == Command::example1 || command == Command::example2;
    const double preset_alpha = c.spec.alpha;
    const int preset_d = c.spec.d;

    Section root(doc, "");
    if (const json* v = root.find("command")) {
        if (!v->is_string()) fail("command", "expected a string");
        if (parse_command(v->get<std::string>()) != command)
            fail("command", "'" + v->get<std::string>() + "' does not match the requested command '" +
                                to_string(command) + "'");
    }

    if (const json* v = root.find("spec")) {
        Section s(*v, "spec");
        s.number("alpha", c.spec.alpha);
        s.number("lambda", c.spec.lambda);
        s.number("sigma", c.spec.sigma);
        s.integer("d", c.spec.d);
        s.reject_unknown();
    }
    if (preset && c.spec.alpha != preset_alpha)
        fail("spec.alpha", "fixed at " + json(preset_alpha).dump() + " by " + to_string(command));
    if (preset && c.spec.d != preset_d)
        fail("spec.d", "fixed at " + std::to_string(preset_d) + " by " + to_string(command));
    check("spec", [&] { c.spec.validate(); });

    const bool t_given = doc.contains("t");
    root.number("t", c.t);
    if (!(c.t > 0.0)) fail("t", "must be positive");

    if (const json* v = root.find("lattice")) {
        stochastic::LatticeSpec l{c.spec.d, c.t, kDefaults.lattice_n_t, kDefaults.lattice_half_width,
                                  kDefaults.lattice_n_x};
        Section s(*v, "lattice");
        s.integer("d", l.d);
        s.number("t_final", l.t_final);
        s.integer("n_t", l.n_t);
        s.number("domain_half_width", l.domain_half_width);
        s.integer("n_x", l.n_x);
        s.reject_unknown();
        if (l.d != c.spec.d) fail("lattice.d", "must equal spec.d");
        if (t_given && v->contains("t_final") && l.t_final != c.t) fail("lattice.t_final", "differs from t");
        check("lattice", [&] { l.validate(); });
        c.t = l.t_final;
        c.lattice = l;
    }
    const bool simulates = command == Command::simulate || command == Command::variance || command == Command::example2;
    if (!c.lattice && simulates) {
        stochastic::LatticeSpec l{c.spec.d, c.t, kDefaults.lattice_n_t, kDefaults.lattice_half_width,
                                  kDefaults.lattice_n_x};
        if (command == Command::example2) {
            l.n_t = kDefaults.example2_n_t;
            l.n_x = kDefaults.example2_n_x;
        }
        check("lattice", [&] { l.validate(); });
        c.lattice = l;
    }

    if (const json* v = root.find("grid")) {
        transforms::SpectralGrid g{c.spec.d, 1.0, transforms::SpectralGrid::default_points_per_axis(c.spec.d)};
        Section s(*v, "grid");
        s.number("cutoff", g.cutoff);
        s.integer("points_per_axis", g.points_per_axis);
        s.reject_unknown();
        check("grid", [&] { g.validate(); });
        c.grid = g;
    }

    if (command == Command::kernel && !c.lattice && !c.grid) c.grid = kernel::default_grid(c.spec, c.t);

    root.unsigned64("seed", c.seed);
    root.integer("n_samples", c.n_samples);
    if (c.n_samples < 100) fail("n_samples", "must be at least 100");

    root.numbers("point", c.point);
    if (c.point.empty()) c.point.assign(static_cast<std::size_t>(c.spec.d), 0.0);
    if (static_cast<int>(c.point.size()) != c.spec.d) fail("point", "needs spec.d coordinates");
    if (c.lattice) {
        for (std::size_t i = 0; i < c.point.size(); ++i) {
            const double u = c.point[i] / c.lattice->dx() + c.lattice->n_x / 2;
            if (std::abs(u - std::round(u)) > 1e-9 || u < 0.0 || u > c.lattice->n_x - 1)
                fail("point[" + std::to_string(i) + "]", "must be a lattice node");
        }
    }

    c.epsilon = kDefaults.variance_epsilon_fraction * c.t;
    root.number("epsilon", c.epsilon);
    if (!(c.epsilon > 0.0 && c.epsilon < c.t)) fail("epsilon", "must lie in (0, t)");

    c.epsilon_levels = mildness::default_epsilon_levels(c.t);
    root.numbers("epsilon_levels", c.epsilon_levels);
    if (c.epsilon_levels.size() < 4) fail("epsilon_levels", "needs at least 4 levels");
    for (std::size_t i = 0; i < c.epsilon_levels.size(); ++i) {
        const double e = c.epsilon_levels[i];
        if (!(e > 0.0 && e < c.t)) fail("epsilon_levels[" + std::to_string(i) + "]", "must lie in (0, t)");
        if (i > 0 && !(e < c.epsilon_levels[i - 1]))
            fail("epsilon_levels[" + std::to_string(i) + "]", "levels must be strictly decreasing");
    }

    if (const json* v = root.find("ml")) {
        Section s(*v, "ml");
        s.number("alpha", c.ml.alpha);
        s.number("beta", c.ml.beta);
        s.numbers("z", c.ml.z);
        s.reject_unknown();
    }
    check("ml", [&] { specfun::MLOrder{c.ml.alpha, c.ml.beta}.validate(); });
    if (c.ml.z.empty()) {
        const int n = kDefaults.ml_points;
        for (int i = 0; i < n; ++i)
            c.ml.z.push_back((kDefaults.ml_z_min * (n - 1 - i) + kDefaults.ml_z_max * i) / (n - 1));
    }

    if (const json* v = root.find("caputo")) {
        Section s(*v, "caputo");
        s.number("alpha", c.caputo.alpha);
        s.string("function", c.caputo.function);
        s.number("exponent", c.caputo.exponent);
        s.number("c", c.caputo.c);
        s.integer("panels", c.caputo.panels);
        s.numbers("x", c.caputo.x);
        s.reject_unknown();
    }
    if (!(c.caputo.alpha > 0.0 && c.caputo.alpha < 2.0)) fail("caputo.alpha", "must lie in (0, 2)");
    if (c.caputo.function != "power" && c.caputo.function != "ml_mode")
        fail("caputo.function", "expected power or ml_mode");
    if (c.caputo.function == "power" && !(c.caputo.exponent > std::ceil(c.caputo.alpha) - 1.0))
        fail("caputo.exponent", "must exceed ceil(alpha) - 1");
    if (!(c.caputo.c > 0.0)) fail("caputo.c", "must be positive");
    if (c.caputo.panels < 16) fail("caputo.panels", "must be at least 16");
    if (c.caputo.x.empty()) c.caputo.x = {0.5, 1.0, 2.0};
    for (std::size_t i = 0; i < c.caputo.x.size(); ++i)
        if (!(c.caputo.x[i] > 0.0)) fail("caputo.x[" + std::to_string(i) + "]", "must be positive");

    root.string("output_path", c.output_path);
    if (const json* v = root.find("format")) {
        if (!v->is_string()) fail("format", "expected a string");
        c.format = parse_format(v->get<std::string>());
        if (preset && c.format != Format::json) fail("format", to_string(command) + " writes a JSON report");
    }
    root.reject_unknown();
    return c;
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& path, Command command) {
    if (!path) return parse_config(json::object(), command);
    std::ifstream in(*path);
    if (!in) throw ConfigError("config: cannot open " + path->string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path->string() + " is not valid JSON (" + e.what() + ")");
    }
    return parse_config(doc, command);
}

nlohmann::ordered_json resolved_config(const ExperimentConfig& c) {
    const Command k = c.command;
    const bool field = k == Command::kernel || k == Command::simulate || k == Command::variance ||
                       k == Command::mildness || k == Command::example1 || k == Command::example2;
    const bool random = k == Command::simulate || k == Command::variance || k == Command::example2;
    const bool moments = k == Command::variance || k == Command::example2;
    const bool scan = k == Command::mildness || k == Command::example1 || k == Command::example2;

    nlohmann::ordered_json j;
    j["command"] = to_string(k);
    if (field) {
        j["spec"] = {{"alpha", c.spec.alpha}, {"lambda", c.spec.lambda}, {"sigma", c.spec.sigma}, {"d", c.spec.d}};
        j["t"] = c.t;
    }
    if (c.lattice && (field && !scan ? true : k == Command::example2))
        j["lattice"] = {{"d", c.lattice->d},
                        {"t_final", c.lattice->t_final},
                        {"n_t", c.lattice->n_t},
                        {"domain_half_width", c.lattice->domain_half_width},
                        {"n_x", c.lattice->n_x}};
    if (c.grid && k == Command::kernel && !c.lattice)
        j["grid"] = {{"cutoff", c.grid->cutoff}, {"points_per_axis", c.grid->points_per_axis}};
    if (random) j["seed"] = c.seed;
    if (moments) {
        j["n_samples"] = c.n_samples;
        j["point"] = c.point;
    }
    if (k == Command::variance) j["epsilon"] = c.epsilon;
    if (scan) j["epsilon_levels"] = c.epsilon_levels;
    if (k == Command::ml) j["ml"] = {{"alpha", c.ml.alpha}, {"beta", c.ml.beta}, {"z", c.ml.z}};
    if (k == Command::caputo)
        j["caputo"] = {{"alpha", c.caputo.alpha}, {"function", c.caputo.function}, {"exponent", c.caputo.exponent},
                       {"c", c.caputo.c},         {"panels", c.caputo.panels},     {"x", c.caputo.x}};
    j["format"] = to_string(c.format);
    return j;
}

}  // namespace fracheat::cli
