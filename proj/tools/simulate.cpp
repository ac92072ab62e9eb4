#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "raman/errors.hpp"
#include "raman/experiment.hpp"

namespace {

std::string loadConfigText(const std::string& source) {
    const auto& presets = raman::builtinPresets();
    const auto found = presets.find(source);
    if (found != presets.end()) return found->second;
    std::ifstream in(source);
    if (!in) {
        throw raman::ConfigError("config: '" + source +
                                 "' is neither a built-in preset nor a readable file");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dispersive light transport and Raman quantum-memory simulator (gamma units)"};
    app.get_formatter()->column_width(30);

    std::string source;
    std::string out_dir;
    int threads = 1;
    std::vector<std::string> overrides;
    bool list_presets = false;

    app.add_option("config", source, "Built-in preset name or path to a JSON config");
    app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
    app.add_option("--threads", threads, "Worker threads for sweeps and multi-run experiments")
        ->check(CLI::PositiveNumber);
    app.add_option("--override", overrides, "Config override, e.g. control.rabi=20");
    app.add_flag("--list-presets", list_presets, "List built-in presets and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        if (err.get_exit_code() == 0) return app.exit(err);  // --help
        std::cerr << "error: config: " << err.what() << "\n";
        return 1;
    }

    if (list_presets) {
        for (const auto& [name, text] : raman::builtinPresets()) {
            std::cout << name << "\n";
        }
        return 0;
    }
    if (source.empty()) {
        std::cerr << "error: config: no preset or config file given\n";
        return 1;
    }

    try {
        std::string text = loadConfigText(source);
        for (const std::string& assignment : overrides) {
            text = raman::applyOverride(text, assignment);
        }
        if (!out_dir.empty()) {
            text = raman::applyOverride(text, "output_dir=" + out_dir);
        }
        const raman::ExperimentConfig config = raman::ExperimentConfig::fromJsonText(text);
        const raman::RunResult result = raman::runExperiment(config, threads);
        for (const auto& path : result.artifacts) {
            std::cout << path.string() << "\n";
        }
        return 0;
    } catch (const raman::ConfigError& err) {
        std::cerr << "error: config: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: numeric: " << err.what() << "\n";
        return 2;
    }
}
