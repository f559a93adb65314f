#pragma once

// Experiment runner behind the fracheat command line: JSON configuration,
// the example presets, and CSV/JSON rendering of the results.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracheat/kernel.hpp"
#include "fracheat/stochastic.hpp"
#include "fracheat/transforms.hpp"

namespace fracheat::cli {

enum class Command { ml, caputo, kernel, simulate, variance, mildness, example1, example2 };
enum class Format { csv, json };

std::string to_string(Command c);
std::string to_string(Format f);
/// Throws ConfigError naming `field` for unknown names.
Command parse_command(const std::string& name, const std::string& field = "command");
Format parse_format(const std::string& name, const std::string& field = "format");

struct MlConfig {
    double alpha = 0.5;
    double beta = 1.0;
    std::vector<double> z;
};

struct CaputoConfig {
    double alpha = 0.5;
    /// "power": f(u) = u^exponent against Gamma(p+1)/Gamma(p+1-alpha) x^{p-alpha};
    /// "ml_mode": residual of D^a y + c y = 0 for y = E_a(-c t^a).
    std::string function = "power";
    double exponent = 1.0;
    double c = 1.0;
    int panels = 2048;
    std::vector<double> x;
};

struct ExperimentConfig {
    Command command = Command::kernel;
    kernel::EquationSpec spec;
    double t = 1.0;
    std::optional<stochastic::LatticeSpec> lattice;
    std::optional<transforms::SpectralGrid> grid;
    std::uint64_t seed = 0;
    int n_samples = 0;
    std::vector<double> point;           // variance: evaluation node, origin by default
    std::vector<double> epsilon_levels;  // mildness scan
    double epsilon = 0.0;                // variance: time cutoff of the spectral integral
    MlConfig ml;
    CaputoConfig caputo;
    std::string output_path;  // empty: standard output
    Format format = Format::csv;
};

/// Every numeric default of the runner.
struct DefaultTable {
    std::uint64_t seed = 20240917;
    double t = 1.0;
    int n_samples = 1000;
    int lattice_n_t = 128;
    int lattice_n_x = 128;
    double lattice_half_width = 8.0;
    double variance_epsilon_fraction = 1.0 / 65536.0;  // of t
    double ml_z_min = -10.0;
    double ml_z_max = 2.0;
    int ml_points = 61;
    int example2_n_t = 64;
    int example2_n_x = 64;
    int example2_n_samples = 400;
};

inline constexpr DefaultTable kDefaults{};

/// Resolves `doc` for `command` against the defaults and the example presets.
/// Throws ConfigError whose message starts with the offending field.
ExperimentConfig parse_config(const nlohmann::json& doc, Command command);

/// Reads and parses the file; a missing path yields the defaults.
ExperimentConfig load_config(const std::optional<std::filesystem::path>& path, Command command);

/// The resolved configuration embedded in every artifact. The output path is
/// left out; so are execution options such as the worker count.
nlohmann::ordered_json resolved_config(const ExperimentConfig& config);

struct RunOptions {
    int workers = 0;
};

/// Runs the experiment and returns the rendered artifact.
std::string render(const ExperimentConfig& config, const RunOptions& options = {});

/// Writes `content` to `path` through a temporary file in the same directory
/// and a rename.
void write_atomically(const std::filesystem::path& path, const std::string& content);

std::string version();

}  // namespace fracheat::cli
