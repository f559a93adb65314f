#include <iostream>

#include <CLI11.hpp>

#include "experiment.hpp"
#include "fracheat/errors.hpp"

int main(int argc, char** argv) {
    using namespace fracheat::cli;

    CLI::App app{"Fractional stochastic heat equation experiments"};
    app.set_version_flag("--version", version());
    std::string command;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format;
    int workers = 0;
    app.add_option("command", command, "ml, caputo, kernel, simulate, variance, mildness, example1, example2")
        ->required();
    app.add_option("--config", config_path, "JSON experiment configuration");
    app.add_option("--seed", seed, "overrides the configured seed");
    app.add_option("--out", out, "output file (standard output when absent)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--workers", workers, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
    CLI11_PARSE(app, argc, argv);

    try {
        const Command cmd = parse_command(command);
        const bool preset = cmd == Command::example1 || cmd == Command::example2;
        if (config_path.empty() && !preset) throw fracheat::ConfigError("--config: required for " + command);
        std::optional<std::filesystem::path> path;
        if (!config_path.empty()) path = config_path;
        ExperimentConfig config = load_config(path, cmd);
        if (seed) config.seed = *seed;
        if (!out.empty()) config.output_path = out;
        if (!format.empty()) {
            config.format = parse_format(format, "--format");
            if (preset && config.format != Format::json)
                throw fracheat::ConfigError("--format: " + command + " writes a JSON report");
        }
        RunOptions options;
        options.workers = workers;
        const std::string content = render(config, options);
        if (config.output_path.empty())
            std::cout << content;
        else
            write_atomically(config.output_path, content);
    } catch (const fracheat::ConfigError& e) {
        std::cerr << "fracheat: config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fracheat: " << command << " failed: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
