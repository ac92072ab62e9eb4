#include "raman/experiment.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "raman/errors.hpp"

#ifndef RAMAN_MEMORY_VERSION
#define RAMAN_MEMORY_VERSION "0.0.0"
#endif

namespace raman {
namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

void expectKeys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& context) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* key : allowed) {
            if (it.key() == key) {
                ok = true;
                break;
            }
        }
        if (!ok) throw ConfigError("config: unknown key '" + context + it.key() + "'");
    }
}

double numberAt(const json& obj, const char* key, double fallback, const std::string& context) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError("config: " + context + key + " must be a number");
    return obj[key].get<double>();
}

int intAt(const json& obj, const char* key, int fallback, const std::string& context) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) {
        throw ConfigError("config: " + context + key + " must be an integer");
    }
    return obj[key].get<int>();
}

std::string stringAt(const json& obj, const char* key, const std::string& fallback,
                     const std::string& context) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) throw ConfigError("config: " + context + key + " must be a string");
    return obj[key].get<std::string>();
}

ExperimentKind parseKind(const std::string& text) {
    if (text == "spectrum") return ExperimentKind::spectrum;
    if (text == "pulse") return ExperimentKind::pulse;
    if (text == "memory") return ExperimentKind::memory;
    if (text == "sweep") return ExperimentKind::sweep;
    throw ConfigError("config: kind must be spectrum|pulse|memory|sweep, got '" + text + "'");
}

std::string kindName(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::spectrum: return "spectrum";
        case ExperimentKind::pulse: return "pulse";
        case ExperimentKind::memory: return "memory";
        case ExperimentKind::sweep: return "sweep";
    }
    return "spectrum";
}

ExperimentConfig parseConfig(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: document must be a JSON object");
    expectKeys(doc,
               {"units", "kind", "atom", "control", "momentum", "medium", "pulse", "modes",
                "spectrum", "memory", "propagation", "sweep", "output_dir"},
               "");
    const std::string units = stringAt(doc, "units", "", "");
    if (units != "gamma") {
        throw ConfigError("config: units must be declared and equal to \"gamma\"");
    }
    ExperimentConfig config;
    config.kind = parseKind(stringAt(doc, "kind", "", ""));

    if (doc.contains("atom")) {
        const json& a = doc["atom"];
        expectKeys(a, {"nuclear_spin", "hyperfine_splitting", "energy_n"}, "atom.");
        config.atom.nuclear_spin = numberAt(a, "nuclear_spin", 3.5, "atom.");
        config.atom.hyperfine_splitting = numberAt(a, "hyperfine_splitting", 256.0, "atom.");
        config.atom.energy_n = numberAt(a, "energy_n", 0.0, "atom.");
    }
    config.atom.validate();

    if (doc.contains("control")) {
        const json& c = doc["control"];
        expectKeys(c, {"detuning", "rabi"}, "control.");
        config.control_detuning = numberAt(c, "detuning", 0.0, "control.");
        config.control_rabi = numberAt(c, "rabi", 15.0, "control.");
    }
    if (config.control_rabi < 0.0) throw ConfigError("config: control.rabi must be >= 0");

    if (doc.contains("momentum")) {
        const json& m = doc["momentum"];
        expectKeys(m, {"kind", "mass_amu", "temperature_K", "quadrature_order", "include_recoil"},
                   "momentum.");
        const std::string kind = stringAt(m, "kind", "frozen", "momentum.");
        if (kind == "frozen") {
            config.momentum.kind = MomentumDistribution::Kind::frozen;
        } else if (kind == "thermal") {
            config.momentum.kind = MomentumDistribution::Kind::thermal;
        } else {
            throw ConfigError("config: momentum.kind must be frozen|thermal");
        }
        config.momentum.mass_amu = numberAt(m, "mass_amu", config.momentum.mass_amu, "momentum.");
        config.momentum.temperature_K =
            numberAt(m, "temperature_K", config.momentum.temperature_K, "momentum.");
        config.momentum.quadrature_order =
            intAt(m, "quadrature_order", config.momentum.quadrature_order, "momentum.");
        if (m.contains("include_recoil")) {
            if (!m["include_recoil"].is_boolean()) {
                throw ConfigError("config: momentum.include_recoil must be a boolean");
            }
            config.momentum.include_recoil = m["include_recoil"].get<bool>();
        }
    }

    if (doc.contains("medium")) {
        const json& m = doc["medium"];
        expectKeys(m, {"depth", "density_scale", "retardation"}, "medium.");
        config.medium.depth = numberAt(m, "depth", 50.0, "medium.");
        config.medium.density_scale = numberAt(m, "density_scale", 1e-3, "medium.");
        config.medium.retardation = numberAt(m, "retardation", 0.0, "medium.");
    }
    if (config.medium.depth < 0.0) throw ConfigError("config: medium.depth must be >= 0");

    if (doc.contains("pulse")) {
        const json& p = doc["pulse"];
        expectKeys(p,
                   {"duration", "shape", "carrier_offset", "mode_index", "envelope_times",
                    "envelope_values"},
                   "pulse.");
        config.pulse.duration = numberAt(p, "duration", 10.0, "pulse.");
        const std::string shape = stringAt(p, "shape", "rectangular", "pulse.");
        if (shape == "rectangular") {
            config.pulse.shape = PulseSpec::Shape::rectangular;
        } else if (shape == "tabulated") {
            config.pulse.shape = PulseSpec::Shape::tabulated;
        } else {
            throw ConfigError("config: pulse.shape must be rectangular|tabulated");
        }
        config.pulse.carrier_offset = numberAt(p, "carrier_offset", 0.0, "pulse.");
        config.pulse.mode_index = intAt(p, "mode_index", 0, "pulse.");
        if (p.contains("envelope_times")) {
            config.pulse.envelope_times = p["envelope_times"].get<std::vector<double>>();
        }
        if (p.contains("envelope_values")) {
            config.pulse.envelope_values = p["envelope_values"].get<std::vector<double>>();
        }
    }
    config.pulse.validate();

    if (doc.contains("modes")) {
        config.pulse_modes = doc["modes"].get<std::vector<int>>();
        if (config.pulse_modes.empty()) throw ConfigError("config: modes must not be empty");
    }

    if (doc.contains("spectrum")) {
        const json& s = doc["spectrum"];
        expectKeys(s, {"start", "stop", "step", "models"}, "spectrum.");
        config.spectrum.grid_start = numberAt(s, "start", -40.0, "spectrum.");
        config.spectrum.grid_stop = numberAt(s, "stop", 40.0, "spectrum.");
        config.spectrum.grid_step = numberAt(s, "step", 0.05, "spectrum.");
        if (s.contains("models")) {
            config.spectrum.models = s["models"].get<std::vector<std::string>>();
        }
        if (!(config.spectrum.grid_step > 0.0) ||
            !(config.spectrum.grid_stop > config.spectrum.grid_start)) {
            throw ConfigError("config: spectrum grid must have stop > start and step > 0");
        }
        for (const std::string& model : config.spectrum.models) {
            if (model != "full" && model != "lambda" && model != "bare") {
                throw ConfigError("config: spectrum.models entries must be full|lambda|bare");
            }
        }
    }

    if (doc.contains("memory")) {
        const json& m = doc["memory"];
        expectKeys(m,
                   {"write_off_time", "settle_time", "storage_time", "read_duration",
                    "read_direction", "switch", "spin_decay", "grid"},
                   "memory.");
        config.write_off_time = numberAt(m, "write_off_time", -1.0, "memory.");
        config.settle_time = numberAt(m, "settle_time", 15.0, "memory.");
        config.storage_time = numberAt(m, "storage_time", 20.0, "memory.");
        config.read_duration = numberAt(m, "read_duration", 80.0, "memory.");
        config.read_direction = stringAt(m, "read_direction", "both", "memory.");
        if (config.read_direction != "forward" && config.read_direction != "backward" &&
            config.read_direction != "both") {
            throw ConfigError("config: memory.read_direction must be forward|backward|both");
        }
        if (m.contains("switch")) {
            const json& sw = m["switch"];
            expectKeys(sw, {"type", "ramp_time"}, "memory.switch.");
            const std::string type = stringAt(sw, "type", "instantaneous", "memory.switch.");
            if (type == "instantaneous") {
                config.switch_profile.type = SwitchProfile::Type::instantaneous;
            } else if (type == "linear") {
                config.switch_profile.type = SwitchProfile::Type::linear;
            } else {
                throw ConfigError("config: memory.switch.type must be instantaneous|linear");
            }
            config.switch_profile.ramp_time = numberAt(sw, "ramp_time", 0.0, "memory.switch.");
        }
        config.spin_decay = numberAt(m, "spin_decay", 0.0, "memory.");
        if (m.contains("grid")) {
            const json& g = m["grid"];
            expectKeys(g, {"nz", "dt"}, "memory.grid.");
            config.solver_grid.nz = intAt(g, "nz", 200, "memory.grid.");
            config.solver_grid.dt = numberAt(g, "dt", 0.002, "memory.grid.");
        }
    }

    if (doc.contains("propagation")) {
        const json& p = doc["propagation"];
        expectKeys(p, {"window_mult", "samples_per_duration", "window_durations"}, "propagation.");
        config.propagation.window_mult = numberAt(p, "window_mult", 200.0, "propagation.");
        config.propagation.samples_per_duration =
            intAt(p, "samples_per_duration", 512, "propagation.");
        config.propagation.window_durations = intAt(p, "window_durations", 32, "propagation.");
    }

    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        expectKeys(s, {"axes", "metrics"}, "sweep.");
        if (s.contains("axes")) {
            for (const json& axis : s["axes"]) {
                expectKeys(axis, {"parameter", "start", "stop", "count"}, "sweep.axes.");
                SweepAxis a;
                a.parameter = stringAt(axis, "parameter", "", "sweep.axes.");
                if (a.parameter.empty()) {
                    throw ConfigError("config: sweep axis needs a parameter path");
                }
                a.start = numberAt(axis, "start", 0.0, "sweep.axes.");
                a.stop = numberAt(axis, "stop", 0.0, "sweep.axes.");
                a.count = intAt(axis, "count", 0, "sweep.axes.");
                if (a.count < 0) throw ConfigError("config: sweep axis count must be >= 0");
                config.sweep_axes.push_back(a);
            }
        }
        if (s.contains("metrics")) {
            config.sweep_metrics = s["metrics"].get<std::vector<std::string>>();
        }
        if (config.sweep_axes.size() > 2) {
            throw ConfigError("config: at most 2 sweep axes are supported");
        }
    }

    config.output_dir = stringAt(doc, "output_dir", "out", "");
    return config;
}

json configEcho(const ExperimentConfig& c) {
    json doc;
    doc["units"] = "gamma";
    doc["kind"] = kindName(c.kind);
    doc["atom"] = {{"nuclear_spin", c.atom.nuclear_spin},
                   {"hyperfine_splitting", c.atom.hyperfine_splitting},
                   {"energy_n", c.atom.energy_n}};
    doc["control"] = {{"detuning", c.control_detuning}, {"rabi", c.control_rabi}};
    doc["momentum"] = {
        {"kind", c.momentum.kind == MomentumDistribution::Kind::frozen ? "frozen" : "thermal"},
        {"mass_amu", c.momentum.mass_amu},
        {"temperature_K", c.momentum.temperature_K},
        {"quadrature_order", c.momentum.quadrature_order},
        {"include_recoil", c.momentum.include_recoil}};
    doc["medium"] = {{"depth", c.medium.depth},
                     {"density_scale", c.medium.density_scale},
                     {"retardation", c.medium.retardation}};
    json pulse = {{"duration", c.pulse.duration},
                  {"shape", c.pulse.shape == PulseSpec::Shape::rectangular ? "rectangular"
                                                                           : "tabulated"},
                  {"carrier_offset", c.pulse.carrier_offset},
                  {"mode_index", c.pulse.mode_index}};
    if (c.pulse.shape == PulseSpec::Shape::tabulated) {
        pulse["envelope_times"] = c.pulse.envelope_times;
        pulse["envelope_values"] = c.pulse.envelope_values;
    }
    doc["pulse"] = pulse;
    doc["modes"] = c.pulse_modes;
    doc["spectrum"] = {{"start", c.spectrum.grid_start},
                       {"stop", c.spectrum.grid_stop},
                       {"step", c.spectrum.grid_step},
                       {"models", c.spectrum.models}};
    doc["memory"] = {{"write_off_time", c.write_off_time},
                     {"settle_time", c.settle_time},
                     {"storage_time", c.storage_time},
                     {"read_duration", c.read_duration},
                     {"read_direction", c.read_direction},
                     {"switch",
                      {{"type", c.switch_profile.type == SwitchProfile::Type::instantaneous
                                    ? "instantaneous"
                                    : "linear"},
                       {"ramp_time", c.switch_profile.ramp_time}}},
                     {"spin_decay", c.spin_decay},
                     {"grid", {{"nz", c.solver_grid.nz}, {"dt", c.solver_grid.dt}}}};
    doc["propagation"] = {{"window_mult", c.propagation.window_mult},
                          {"samples_per_duration", c.propagation.samples_per_duration},
                          {"window_durations", c.propagation.window_durations}};
    json axes = json::array();
    for (const SweepAxis& a : c.sweep_axes) {
        axes.push_back({{"parameter", a.parameter},
                        {"start", a.start},
                        {"stop", a.stop},
                        {"count", a.count}});
    }
    doc["sweep"] = {{"axes", axes}, {"metrics", c.sweep_metrics}};
    doc["output_dir"] = c.output_dir.string();
    return doc;
}

// Tracks files created by one run so a failure can clean up after itself.
class ArtifactWriter {
public:
    explicit ArtifactWriter(const std::filesystem::path& dir, const json& echo)
        : dir_(dir), echo_(echo) {
        std::filesystem::create_directories(dir_);
    }

    const std::vector<std::filesystem::path>& artifacts() const { return files_; }

    void writeText(const std::string& name, const std::string& body) {
        const auto path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write artifact " + path.string());
        out << body;
        out.close();
        files_.push_back(path);
    }

    void writeCsv(const std::string& name, const std::string& header, const std::string& body,
                  const std::vector<std::string>& columns) {
        writeText(name, header + "\n" + body);
        json meta;
        meta["artifact"] = name;
        meta["columns"] = columns;
        meta["units"] = "gamma";
        meta["version"] = RAMAN_MEMORY_VERSION;
        meta["config"] = echo_;
        writeText(sidecarName(name), meta.dump(2) + "\n");
    }

    void writeJson(const std::string& name, json body) {
        body["units"] = "gamma";
        body["version"] = RAMAN_MEMORY_VERSION;
        body["config"] = echo_;
        writeText(name, body.dump(2) + "\n");
    }

    void removeAll() {
        for (const auto& path : files_) {
            std::error_code ec;
            std::filesystem::remove(path, ec);
        }
        files_.clear();
    }

    static std::string sidecarName(const std::string& artifact) {
        const auto dot = artifact.rfind('.');
        return artifact.substr(0, dot) + ".meta.json";
    }

private:
    std::filesystem::path dir_;
    json echo_;
    std::vector<std::filesystem::path> files_;
};

std::vector<double> makeGrid(double start, double stop, double step) {
    std::vector<double> grid;
    const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    grid.reserve(n);
    for (int i = 0; i < n; ++i) grid.push_back(start + i * step);
    return grid;
}

std::string modeTag(int q) {
    if (q == 0) return "q0";
    if (q < 0) return "qm" + std::to_string(-q);
    return "qp" + std::to_string(q);
}

json resonancesJson(const std::vector<Resonance>& peaks) {
    json arr = json::array();
    for (const Resonance& p : peaks) {
        arr.push_back({{"center", p.center}, {"height", p.height}, {"fwhm", p.fwhm}});
    }
    return arr;
}

void runSpectrum(const ExperimentConfig& config, ArtifactWriter& writer) {
    const auto grid =
        makeGrid(config.spectrum.grid_start, config.spectrum.grid_stop, config.spectrum.grid_step);
    json diagnostics;
    for (const std::string& model_name : config.spectrum.models) {
        const double rabi = model_name == "bare" ? 0.0 : config.control_rabi;
        const SpectrumModel model =
            model_name == "lambda" ? SpectrumModel::lambda : SpectrumModel::full;
        const ControlField control =
            makeControlField(config.atom, config.control_detuning, rabi);
        const SusceptibilitySpectrum spectrum =
            scanSpectrum(config.atom, control, config.momentum, grid, model);
        std::string body;
        body.reserve(grid.size() * 64);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            body += fmt(grid[i]);
            body += ',';
            body += fmt(spectrum.values[i].real());
            body += ',';
            body += fmt(spectrum.values[i].imag());
            body += ',';
            body += model_name;
            body += '\n';
        }
        writer.writeCsv("spectrum_" + model_name + ".csv", "delta_bar_gamma,chi_re,chi_im,model",
                        body, {"delta_bar_gamma", "chi_re", "chi_im", "model"});
        json entry;
        entry["resonances"] = resonancesJson(findATResonances(spectrum));
        try {
            const EitResult eit = eitDiagnostics(spectrum);
            entry["eit_shift"] = eit.shift;
            entry["residual_absorption"] = eit.residual_absorption;
        } catch (const std::runtime_error&) {
            entry["eit_shift"] = nullptr;
            entry["residual_absorption"] = nullptr;
        }
        diagnostics[model_name] = entry;
    }
    writer.writeJson("diagnostics.json", json{{"diagnostics", diagnostics}});
}

std::string waveformCsv(const FieldRecord& record) {
    std::string body;
    body.reserve(record.time_grid.size() * 64);
    for (std::size_t i = 0; i < record.time_grid.size(); ++i) {
        body += fmt(record.time_grid[i]);
        body += ',';
        body += fmt(record.amplitude[i].real());
        body += ',';
        body += fmt(record.amplitude[i].imag());
        body += ',';
        body += fmt(std::norm(record.amplitude[i]));
        body += '\n';
    }
    return body;
}

void runPulse(const ExperimentConfig& config, ArtifactWriter& writer) {
    const ControlField control =
        makeControlField(config.atom, config.control_detuning, config.control_rabi);
    const ChiFunction chi = makeChiFunction(config.atom, control, config.momentum);
    json metrics;
    for (int q : config.pulse_modes) {
        PulseSpec pulse = config.pulse;
        pulse.mode_index = q;
        const FieldRecord record =
            propagatePulse(pulse, config.medium, chi, config.propagation);
        writer.writeCsv("pulse_" + modeTag(q) + ".csv", "t_gamma,re_alpha,im_alpha,abs2",
                        waveformCsv(record), {"t_gamma", "re_alpha", "im_alpha", "abs2"});
        const PulseMetrics m = pulseMetrics(record, pulse);
        metrics[modeTag(q)] = {{"carrier", pulse.effectiveCarrier()},
                               {"delay", m.delay},
                               {"transmission", m.transmission},
                               {"tail_fraction", m.tail_fraction},
                               {"outside_window_fraction", record.outside_window_fraction},
                               {"leakage_warning", record.leakage_warning}};
    }
    writer.writeJson("pulse_metrics.json", json{{"metrics", metrics}});
}

ProtocolConfig protocolFor(const ExperimentConfig& config, int mode_index,
                           ReadDirection direction) {
    ProtocolConfig protocol;
    protocol.atom = config.atom;
    protocol.control = config.controlField();
    protocol.medium = config.medium;
    protocol.pulse = config.pulse;
    protocol.pulse.mode_index = mode_index;
    protocol.write_off_time = config.write_off_time;
    protocol.settle_time = config.settle_time;
    protocol.storage_time = config.storage_time;
    protocol.read_duration = config.read_duration;
    protocol.read_direction = direction;
    protocol.switch_profile = config.switch_profile;
    protocol.spin_decay = config.spin_decay;
    protocol.grid = config.solver_grid;
    return protocol;
}

std::string spinCsv(const StoreResult& stored) {
    std::string body;
    for (std::size_t i = 0; i < stored.zeta_grid.size(); ++i) {
        body += fmt(stored.zeta_grid[i]);
        body += ',';
        body += fmt(stored.spin_wave[i].real());
        body += ',';
        body += fmt(stored.spin_wave[i].imag());
        body += ',';
        body += fmt(std::norm(stored.spin_wave[i]));
        body += '\n';
    }
    return body;
}

void runMemory(const ExperimentConfig& config, ArtifactWriter& writer) {
    std::vector<ReadDirection> directions;
    if (config.read_direction == "forward" || config.read_direction == "both") {
        directions.push_back(ReadDirection::forward);
    }
    if (config.read_direction == "backward" || config.read_direction == "both") {
        directions.push_back(ReadDirection::backward);
    }
    for (int q : config.pulse_modes) {
        const std::string tag = modeTag(q);
        ProtocolConfig base = protocolFor(config, q, ReadDirection::forward);
        const StoreResult stored = store(base);
        writer.writeCsv("spin_" + tag + ".csv", "zeta,re_sigma,im_sigma,abs2", spinCsv(stored),
                        {"zeta", "re_sigma", "im_sigma", "abs2"});
        writer.writeCsv("write_" + tag + ".csv", "t_gamma,re_alpha,im_alpha,abs2",
                        waveformCsv(stored.write_waveform),
                        {"t_gamma", "re_alpha", "im_alpha", "abs2"});
        for (ReadDirection direction : directions) {
            ProtocolConfig protocol = protocolFor(config, q, direction);
            const MemoryReport report = retrieve(protocol, stored);
            const std::string dir_tag = direction == ReadDirection::forward ? "fw" : "bw";
            writer.writeCsv("retrieved_" + tag + "_" + dir_tag + ".csv",
                            "t_gamma,re_alpha,im_alpha,abs2",
                            waveformCsv(report.retrieved_waveform),
                            {"t_gamma", "re_alpha", "im_alpha", "abs2"});
            json rep;
            rep["mode_index"] = q;
            rep["carrier"] = protocol.pulse.effectiveCarrier();
            rep["direction"] = dir_tag;
            rep["efficiency"] = report.efficiency;
            rep["leakage"] = report.leakage;
            rep["stored_fraction"] = report.stored_fraction;
            rep["dissipated"] = report.dissipated;
            rep["residual_p_warning"] = report.residual_p_warning;
            rep["grid"] = {{"nz", config.solver_grid.nz},
                           {"dt", config.solver_grid.dt},
                           {"zeta_nodes", report.zeta_grid.size()}};
            writer.writeJson("memory_" + tag + "_" + dir_tag + ".json", rep);
        }
    }
}

// ---- sweep ----------------------------------------------------------------

std::vector<double> axisValues(const SweepAxis& axis) {
    std::vector<double> values;
    values.reserve(axis.count);
    if (axis.count == 1) {
        values.push_back(axis.start);
        return values;
    }
    for (int i = 0; i < axis.count; ++i) {
        values.push_back(axis.start + (axis.stop - axis.start) * i / (axis.count - 1));
    }
    return values;
}

void setPath(json& doc, const std::string& dotted, const json& value) {
    json* node = &doc;
    std::size_t begin = 0;
    while (true) {
        const std::size_t dot = dotted.find('.', begin);
        const std::string key = dotted.substr(begin, dot - begin);
        if (key.empty()) throw ConfigError("config: empty segment in path '" + dotted + "'");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        if (!node->contains(key)) (*node)[key] = json::object();
        node = &(*node)[key];
        if (!node->is_object()) {
            throw ConfigError("config: path '" + dotted + "' crosses a non-object value");
        }
        begin = dot + 1;
    }
}

struct MetricContext {
    ExperimentConfig config;
    mutable std::optional<MemoryReport> bw, fw;
    mutable std::optional<PulseMetrics> pulse;
    mutable std::optional<EitResult> eit;

    const MemoryReport& memoryReport(ReadDirection dir) const {
        auto& slot = dir == ReadDirection::backward ? bw : fw;
        if (!slot) {
            slot = runProtocol(protocolFor(config, config.pulse.mode_index, dir));
        }
        return *slot;
    }
    const PulseMetrics& pulseResult() const {
        if (!pulse) {
            const ControlField control =
                makeControlField(config.atom, config.control_detuning, config.control_rabi);
            const ChiFunction chi = makeChiFunction(config.atom, control, config.momentum);
            const FieldRecord record =
                propagatePulse(config.pulse, config.medium, chi, config.propagation);
            pulse = pulseMetrics(record, config.pulse);
        }
        return *pulse;
    }
    const EitResult& eitResult() const {
        if (!eit) {
            const auto grid = makeGrid(config.spectrum.grid_start, config.spectrum.grid_stop,
                                       config.spectrum.grid_step);
            const ControlField control =
                makeControlField(config.atom, config.control_detuning, config.control_rabi);
            eit = eitDiagnostics(
                scanSpectrum(config.atom, control, config.momentum, grid, SpectrumModel::full));
        }
        return *eit;
    }
};

double evaluateMetric(const MetricContext& ctx, const std::string& name) {
    if (name == "efficiency_backward") return ctx.memoryReport(ReadDirection::backward).efficiency;
    if (name == "efficiency_forward") return ctx.memoryReport(ReadDirection::forward).efficiency;
    if (name == "leakage") return ctx.memoryReport(ReadDirection::backward).leakage;
    if (name == "delay") return ctx.pulseResult().delay;
    if (name == "transmission") return ctx.pulseResult().transmission;
    if (name == "tail_fraction") return ctx.pulseResult().tail_fraction;
    if (name == "eit_shift") return ctx.eitResult().shift;
    if (name == "residual_absorption") return ctx.eitResult().residual_absorption;
    throw ConfigError("config: unknown sweep metric '" + name + "'");
}

struct SweepRow {
    std::vector<std::string> axis_values;
    std::string line;
    bool failed = false;
};

}  // namespace

ControlField ExperimentConfig::controlField() const {
    return makeControlField(atom, control_detuning, control_rabi);
}

ProtocolConfig ExperimentConfig::memoryProtocol() const {
    return protocolFor(*this, pulse.mode_index,
                       read_direction == "forward" ? ReadDirection::forward
                                                   : ReadDirection::backward);
}

ExperimentConfig ExperimentConfig::fromJsonText(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ConfigError(std::string("config: invalid JSON: ") + err.what());
    }
    return parseConfig(doc);
}

ExperimentConfig ExperimentConfig::fromFile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return fromJsonText(buffer.str());
}

std::string ExperimentConfig::toJsonText() const {
    return configEcho(*this).dump(2) + "\n";
}

std::string applyOverride(const std::string& json_text, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("config: override must look like path.to.key=value, got '" +
                          assignment + "'");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;  // bare words become strings
    }
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& err) {
        throw ConfigError(std::string("config: invalid JSON: ") + err.what());
    }
    setPath(doc, path, value);
    return doc.dump(2) + "\n";
}

RunResult sweep(const ExperimentConfig& config, int threads) {
    if (config.sweep_axes.size() > 2) throw ConfigError("config: at most 2 sweep axes");
    if (config.sweep_metrics.empty()) {
        throw ConfigError("config: sweep requires at least one metric");
    }

    std::vector<std::string> header_cols;
    for (const SweepAxis& axis : config.sweep_axes) header_cols.push_back(axis.parameter);
    for (const std::string& metric : config.sweep_metrics) header_cols.push_back(metric);
    header_cols.push_back("error");
    std::string header;
    for (std::size_t i = 0; i < header_cols.size(); ++i) {
        if (i) header += ',';
        header += header_cols[i];
    }

    // cartesian grid of axis values (row-major, outermost axis first)
    std::vector<std::vector<double>> axes;
    for (const SweepAxis& axis : config.sweep_axes) axes.push_back(axisValues(axis));
    std::vector<std::vector<double>> points;
    if (axes.empty()) {
        points.push_back({});
    } else if (axes.size() == 1) {
        for (double v : axes[0]) points.push_back({v});
    } else {
        for (double a : axes[0]) {
            for (double b : axes[1]) points.push_back({a, b});
        }
    }

    // resume: reuse completed (non-error) rows keyed by formatted axis values
    const auto out_path = config.output_dir / "sweep.csv";
    std::map<std::string, std::string> existing;
    if (std::filesystem::exists(out_path)) {
        std::ifstream in(out_path);
        std::string line;
        std::getline(in, line);  // header
        if (line == header) {
            const std::size_t n_axes = config.sweep_axes.size();
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                std::vector<std::string> cells;
                std::stringstream row(line);
                std::string cell;
                while (std::getline(row, cell, ',')) cells.push_back(cell);
                if (cells.size() < header_cols.size() - 1) continue;
                const bool failed = cells.size() == header_cols.size() && !cells.back().empty();
                if (failed) continue;  // failed points are retried
                std::string key;
                for (std::size_t i = 0; i < n_axes && i < cells.size(); ++i) {
                    key += cells[i];
                    key += '|';
                }
                existing[key] = line;
            }
        }
    }

    const json base_doc = json::parse(config.toJsonText());
    std::vector<SweepRow> rows(points.size());
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, threads);

    auto worker = [&]() {
        while (true) {
            const std::size_t index = next.fetch_add(1);
            if (index >= points.size()) break;
            SweepRow& row = rows[index];
            std::string key;
            for (double v : points[index]) {
                row.axis_values.push_back(fmt(v));
                key += fmt(v);
                key += '|';
            }
            const auto found = existing.find(key);
            if (found != existing.end()) {
                row.line = found->second;
                continue;
            }
            std::string line;
            for (const std::string& v : row.axis_values) {
                if (!line.empty()) line += ',';
                line += v;
            }
            try {
                json doc = base_doc;
                for (std::size_t a = 0; a < points[index].size(); ++a) {
                    setPath(doc, config.sweep_axes[a].parameter, points[index][a]);
                }
                MetricContext ctx{parseConfig(doc), {}, {}, {}, {}};
                std::string cells;
                for (const std::string& metric : config.sweep_metrics) {
                    cells += ',';
                    cells += fmt(evaluateMetric(ctx, metric));
                }
                row.line = line + cells + ",";
            } catch (const std::exception& err) {
                std::string msg = err.what();
                for (char& ch : msg) {
                    if (ch == ',' || ch == '\n') ch = ';';
                }
                std::string cells;
                for (std::size_t i = 0; i < config.sweep_metrics.size(); ++i) cells += ',';
                row.line = line + cells + "," + msg;
                row.failed = true;
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    std::string body;
    for (const SweepRow& row : rows) {
        body += row.line;
        body += '\n';
    }
    ArtifactWriter writer(config.output_dir, configEcho(config));
    try {
        writer.writeCsv("sweep.csv", header, body,
                        header_cols);
    } catch (...) {
        writer.removeAll();
        throw;
    }
    return RunResult{writer.artifacts()};
}

RunResult runExperiment(const ExperimentConfig& config, int threads) {
    if (config.kind == ExperimentKind::sweep) {
        return sweep(config, threads);
    }

    ArtifactWriter writer(config.output_dir, configEcho(config));
    try {
        switch (config.kind) {
            case ExperimentKind::spectrum:
                runSpectrum(config, writer);
                break;
            case ExperimentKind::pulse:
                runPulse(config, writer);
                break;
            case ExperimentKind::memory:
                runMemory(config, writer);
                break;
            case ExperimentKind::sweep:
                break;
        }
    } catch (...) {
        writer.removeAll();
        throw;
    }
    return RunResult{writer.artifacts()};
}

const std::map<std::string, std::string>& builtinPresets() {
    static const std::map<std::string, std::string> presets = {
        {"fig3", R"JSON({
  "units": "gamma",
  "kind": "spectrum",
  "atom": {"nuclear_spin": 3.5, "hyperfine_splitting": 256.0},
  "control": {"detuning": 0.0, "rabi": 15.0},
  "spectrum": {"start": -40.0, "stop": 300.0, "step": 0.02, "models": ["full", "lambda", "bare"]},
  "output_dir": "out/fig3"
})JSON"},
        {"fig4", R"JSON({
  "units": "gamma",
  "kind": "spectrum",
  "atom": {"nuclear_spin": 3.5, "hyperfine_splitting": 256.0},
  "control": {"detuning": 50.0, "rabi": 15.0},
  "spectrum": {"start": 40.0, "stop": 60.0, "step": 0.002, "models": ["full", "lambda"]},
  "output_dir": "out/fig4"
})JSON"},
        {"fig4_red", R"JSON({
  "units": "gamma",
  "kind": "spectrum",
  "atom": {"nuclear_spin": 3.5, "hyperfine_splitting": 256.0},
  "control": {"detuning": -50.0, "rabi": 15.0},
  "spectrum": {"start": -60.0, "stop": -40.0, "step": 0.002, "models": ["full", "lambda"]},
  "output_dir": "out/fig4_red"
})JSON"},
        {"fig5", R"JSON({
  "units": "gamma",
  "kind": "pulse",
  "atom": {"nuclear_spin": 3.5, "hyperfine_splitting": 256.0},
  "control": {"detuning": 50.0, "rabi": 15.0},
  "medium": {"depth": 50.0},
  "pulse": {"duration": 10.0, "shape": "rectangular", "carrier_offset": 50.24},
  "modes": [-1, 0, 1],
  "output_dir": "out/fig5"
})JSON"},
        {"fig6", R"JSON({
  "units": "gamma",
  "kind": "memory",
  "atom": {"nuclear_spin": 3.5, "hyperfine_splitting": 256.0},
  "control": {"detuning": 50.0, "rabi": 15.0},
  "medium": {"depth": 50.0},
  "pulse": {"duration": 10.0, "shape": "rectangular", "carrier_offset": 50.24},
  "modes": [-1, 0, 1],
  "memory": {"storage_time": 20.0, "read_direction": "both"},
  "output_dir": "out/fig6"
})JSON"}};
    return presets;
}

}  // namespace raman
