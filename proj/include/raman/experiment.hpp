#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "raman/memory.hpp"

namespace raman {

enum class ExperimentKind { spectrum, pulse, memory, sweep };

/// One sweep axis: a dotted config path ("control.rabi") plus a uniform range.
struct SweepAxis {
    std::string parameter;
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
};

/// Spectrum-scan request: which models to tabulate over which grid. "bare"
/// is the control-off reference curve.
struct SpectrumRequest {
    double grid_start = -40.0;
    double grid_stop = 40.0;
    double grid_step = 0.05;
    std::vector<std::string> models = {"full", "lambda", "bare"};
};

/// Declarative experiment: everything a run needs, parsed from a JSON file.
/// All physical parameters are in gamma units; the file must declare
/// units = "gamma" and the declaration is echoed into every sidecar.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::spectrum;
    AtomModel atom;
    double control_detuning = 0.0;
    double control_rabi = 15.0;
    MomentumDistribution momentum;
    MediumSpec medium;
    PulseSpec pulse;
    SpectrumRequest spectrum;
    ProtocolConfig memoryProtocol() const;  ///< assembled from the pieces below
    double write_off_time = -1.0;
    double settle_time = 15.0;
    double storage_time = 20.0;
    double read_duration = 80.0;
    std::string read_direction = "both";  ///< forward | backward | both
    SwitchProfile switch_profile;
    double spin_decay = 0.0;
    SolverGrid solver_grid;
    PropagationOptions propagation;
    std::vector<int> pulse_modes = {0};  ///< mode indices to propagate/store
    std::vector<SweepAxis> sweep_axes;
    std::vector<std::string> sweep_metrics;
    std::filesystem::path output_dir = "out";

    ControlField controlField() const;

    /// Parse + validate a JSON config document. Throws ConfigError with a
    /// one-line message on any problem.
    static ExperimentConfig fromJsonText(const std::string& text);
    static ExperimentConfig fromFile(const std::filesystem::path& path);

    /// Canonical JSON echo of this config; parsing it back yields an equal
    /// config (tested), and it is embedded in every artifact sidecar.
    std::string toJsonText() const;
};

/// Built-in presets reproducing the reference figures: fig3, fig4, fig5, fig6.
const std::map<std::string, std::string>& builtinPresets();

struct RunResult {
    std::vector<std::filesystem::path> artifacts;
};

/// Execute one experiment, writing CSV artifacts plus a .meta.json sidecar
/// per file into config.output_dir. Reruns with an identical config write
/// byte-identical CSV bodies. On error, partially written artifacts are
/// removed before the exception leaves.
RunResult runExperiment(const ExperimentConfig& config, int threads = 1);

/// Scalar-outcome grid over <= 2 sweep axes. Points already present in an
/// existing output file are skipped (resume); per-point failures become
/// rows with an error tag and the run continues.
RunResult sweep(const ExperimentConfig& config, int threads = 1);

/// Apply a "dotted.path=value" override to a config JSON document.
std::string applyOverride(const std::string& json_text, const std::string& assignment);

}  // namespace raman
