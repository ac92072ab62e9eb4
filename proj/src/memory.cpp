#include "raman/memory.hpp"

#include <algorithm>
#include <cmath>

#include "raman/errors.hpp"

namespace raman {
namespace {

using namespace std::complex_literals;

// Probe couplings of the time-domain system, scaled so that adiabatic
// elimination of the optical coherences with constant control reproduces the
// scaled susceptibility pointwise: c_j = sqrt(probe_weight) * (d.e)_{jm}.
constexpr double kProbeWeightSqrt = 1.2247448713915890;  // sqrt(3/2)

struct SolverWorkspace {
    int nodes = 0;
    double dz = 0.0;
    Complex kappa;       // i 2 pi b0
    double c_n = 0.0, c_np = 0.0;
    double delta_n = 0.0, delta_np = 0.0, delta_s = 0.0;
    double v_n = 0.0, v_np = 0.0;  // nominal control couplings (envelope = 1)
    double spin_decay = 0.0;

    std::vector<Complex> alpha;  // field scratch, nodes entries

    // trapezoidal field integral: alpha(zeta_i) = a_in + kappa * int_0^zeta src
    void fieldFrom(const AtomicState& s, Complex a_in) {
        Complex cum = 0.0;
        alpha[0] = a_in;
        Complex prev = c_n * s.p_n[0] + c_np * s.p_nprime[0];
        for (int i = 1; i < nodes; ++i) {
            const Complex cur = c_n * s.p_n[i] + c_np * s.p_nprime[i];
            cum += 0.5 * (prev + cur) * dz;
            alpha[i] = a_in + kappa * cum;
            prev = cur;
        }
    }

    void derivative(const AtomicState& s, Complex a_in, double envelope, AtomicState& out) {
        fieldFrom(s, a_in);
        const double vn = envelope * v_n;
        const double vnp = envelope * v_np;
        const Complex ln = Complex(-0.5, delta_n);
        const Complex lnp = Complex(-0.5, delta_np);
        const Complex ls = Complex(-spin_decay, delta_s);
        for (int i = 0; i < nodes; ++i) {
            const Complex al = alpha[i];
            const Complex sp = s.spin[i];
            out.p_n[i] = ln * s.p_n[i] + 1i * (c_n * al + vn * sp);
            out.p_nprime[i] = lnp * s.p_nprime[i] + 1i * (c_np * al + vnp * sp);
            out.spin[i] = ls * sp + 1i * (vn * s.p_n[i] + vnp * s.p_nprime[i]);
        }
    }

    double trapz2(const std::vector<Complex>& v) const {
        double sum = 0.0;
        for (int i = 0; i < nodes; ++i) {
            const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
            sum += w * std::norm(v[i]);
        }
        return sum * dz;
    }

    // instantaneous gamma-channel loss rate, input-energy units
    double lossRate(const AtomicState& s) const {
        return std::abs(kappa) * (trapz2(s.p_n) + trapz2(s.p_nprime) +
                                  2.0 * spin_decay * trapz2(s.spin));
    }
};

SolverWorkspace makeWorkspace(const ProtocolConfig& config) {
    SolverWorkspace w;
    w.nodes = config.grid.nz + 1;
    w.dz = 1.0 / config.grid.nz;
    w.kappa = 2.0 * M_PI * config.medium.depth * 1i;
    w.c_n = kProbeWeightSqrt * config.control.couplings.probe_to_n;
    w.c_np = kProbeWeightSqrt * config.control.couplings.probe_to_nprime;
    const double carrier = config.pulse.effectiveCarrier();
    w.delta_n = carrier - config.atom.energy_n;
    w.delta_np = carrier - config.atom.energyNPrime();
    w.delta_s = carrier - config.control.detuning;
    w.v_n = config.control.vN();
    w.v_np = config.control.vNPrime();
    w.spin_decay = config.spin_decay;
    w.alpha.assign(w.nodes, 0.0);
    return w;
}

void axpy(AtomicState& y, double a, const AtomicState& x) {
    const std::size_t n = y.spin.size();
    for (std::size_t i = 0; i < n; ++i) {
        y.p_n[i] += a * x.p_n[i];
        y.p_nprime[i] += a * x.p_nprime[i];
        y.spin[i] += a * x.spin[i];
    }
}

}  // namespace

AtomicState AtomicState::zero(int nz) {
    AtomicState s;
    s.p_n.assign(nz + 1, 0.0);
    s.p_nprime.assign(nz + 1, 0.0);
    s.spin.assign(nz + 1, 0.0);
    return s;
}

void ProtocolConfig::validate() const {
    atom.validate();
    pulse.validate();
    if (!(medium.depth >= 0.0)) throw ConfigError("medium.depth must be >= 0");
    if (storage_time < 0.0) throw ConfigError("memory.storage_time must be >= 0");
    if (settle_time < 10.0) {
        throw ConfigError("memory.settle_time must be >= 10 (optical coherences must decay)");
    }
    if (!(read_duration > 0.0)) throw ConfigError("memory.read_duration must be > 0");
    if (spin_decay < 0.0) throw ConfigError("memory.spin_decay must be >= 0");
    if (grid.nz < 8) throw ConfigError("grid.nz must be >= 8");
    if (!(grid.dt > 0.0)) throw ConfigError("grid.dt must be > 0");
    const double carrier = pulse.effectiveCarrier();
    const double fastest = std::max({std::abs(carrier - atom.energy_n),
                                     std::abs(carrier - atom.energyNPrime()),
                                     std::abs(carrier - control.detuning), 1.0});
    if (grid.dt * fastest > 2.5) {
        throw ConfigError("grid.dt too large for the detunings involved; reduce it below " +
                          std::to_string(2.5 / fastest));
    }
    if (switch_profile.type == SwitchProfile::Type::linear && switch_profile.ramp_time < 0.0) {
        throw ConfigError("switch_profile.ramp_time must be >= 0");
    }
}

EvolveResult evolve(const ProtocolConfig& config, AtomicState& state, double t0, double t1,
                    const std::function<double(double)>& input_field,
                    const std::function<double(double)>& control_envelope) {
    SolverWorkspace w = makeWorkspace(config);
    const int nz = config.grid.nz;
    const int steps = std::max(1, static_cast<int>(std::llround((t1 - t0) / config.grid.dt)));
    const double dt = (t1 - t0) / steps;

    AtomicState k1 = AtomicState::zero(nz), k2 = AtomicState::zero(nz);
    AtomicState k3 = AtomicState::zero(nz), k4 = AtomicState::zero(nz);
    AtomicState tmp = AtomicState::zero(nz);

    EvolveResult result;
    result.time_grid.reserve(steps + 1);
    result.exit_amplitude.reserve(steps + 1);

    double prev_loss = w.lossRate(state);
    double prev_exit2 = 0.0;
    {
        w.fieldFrom(state, input_field(t0));
        result.time_grid.push_back(t0);
        result.exit_amplitude.push_back(w.alpha[w.nodes - 1]);
        prev_exit2 = std::norm(w.alpha[w.nodes - 1]);
    }

    for (int step = 0; step < steps; ++step) {
        const double t = t0 + step * dt;
        const double th = t + 0.5 * dt;
        const double tn = t + dt;

        w.derivative(state, input_field(t), control_envelope(t), k1);
        tmp = state;
        axpy(tmp, 0.5 * dt, k1);
        w.derivative(tmp, input_field(th), control_envelope(th), k2);
        tmp = state;
        axpy(tmp, 0.5 * dt, k2);
        w.derivative(tmp, input_field(th), control_envelope(th), k3);
        tmp = state;
        axpy(tmp, dt, k3);
        w.derivative(tmp, input_field(tn), control_envelope(tn), k4);

        axpy(state, dt / 6.0, k1);
        axpy(state, dt / 3.0, k2);
        axpy(state, dt / 3.0, k3);
        axpy(state, dt / 6.0, k4);

        w.fieldFrom(state, input_field(tn));
        const Complex exit = w.alpha[w.nodes - 1];
        result.time_grid.push_back(tn);
        result.exit_amplitude.push_back(exit);
        const double exit2 = std::norm(exit);
        result.exit_energy += 0.5 * (prev_exit2 + exit2) * dt;
        prev_exit2 = exit2;

        const double loss = w.lossRate(state);
        result.dissipated += 0.5 * (prev_loss + loss) * dt;
        prev_loss = loss;

        if ((step & 511) == 0 && !std::isfinite(exit2)) {
            throw NumericError("memory solver diverged (NaN in exit field)");
        }
    }
    if (!std::isfinite(std::norm(state.spin[nz / 2]))) {
        throw NumericError("memory solver diverged (NaN in spin wave)");
    }
    return result;
}

namespace {

std::function<double(double)> switchOffEnvelope(const ProtocolConfig& config, double t_off) {
    if (config.switch_profile.type == SwitchProfile::Type::linear &&
        config.switch_profile.ramp_time > 0.0) {
        const double ramp = config.switch_profile.ramp_time;
        return [t_off, ramp](double t) {
            if (t <= t_off) return 1.0;
            return std::max(0.0, 1.0 - (t - t_off) / ramp);
        };
    }
    return [t_off](double t) { return t < t_off ? 1.0 : 0.0; };
}

std::function<double(double)> switchOnEnvelope(const ProtocolConfig& config) {
    if (config.switch_profile.type == SwitchProfile::Type::linear &&
        config.switch_profile.ramp_time > 0.0) {
        const double ramp = config.switch_profile.ramp_time;
        return [ramp](double t) { return std::min(1.0, std::max(0.0, t / ramp)); };
    }
    return [](double) { return 1.0; };
}

FieldRecord fieldRecordFrom(const EvolveResult& run, double input_energy, double dt) {
    FieldRecord record;
    record.time_grid = run.time_grid;
    record.amplitude = run.exit_amplitude;
    record.input_energy = input_energy;
    record.output_energy = run.exit_energy;
    record.dt = dt;
    return record;
}

}  // namespace

StoreResult store(const ProtocolConfig& config) {
    config.validate();
    const double t_off = config.writeOffTime();
    const double t_extract = t_off + config.settle_time;
    const double input_energy = config.pulse.inputEnergy();

    AtomicState state = AtomicState::zero(config.grid.nz);
    const auto input = [&config](double t) { return config.pulse.envelope(t); };
    EvolveResult write =
        evolve(config, state, 0.0, t_extract, input, switchOffEnvelope(config, t_off));

    SolverWorkspace w = makeWorkspace(config);
    const double spin_energy = std::abs(w.kappa) * w.trapz2(state.spin);
    const double residual_p =
        std::abs(w.kappa) * (w.trapz2(state.p_n) + w.trapz2(state.p_nprime));

    StoreResult result;
    result.leakage = write.exit_energy / input_energy;
    result.dissipated = write.dissipated / input_energy;
    result.zeta_grid.resize(config.grid.nz + 1);
    for (int i = 0; i <= config.grid.nz; ++i) {
        result.zeta_grid[i] = static_cast<double>(i) / config.grid.nz;
    }
    result.spin_wave = state.spin;
    result.stored_fraction = spin_energy / input_energy;
    result.residual_p_warning = residual_p > 1e-4 * spin_energy;
    result.write_waveform = fieldRecordFrom(write, input_energy, config.grid.dt);

    // dark interval: no input, no control; spin decays at spin_decay only
    if (config.storage_time > 0.0) {
        EvolveResult dark = evolve(
            config, state, t_extract, t_extract + config.storage_time,
            [](double) { return 0.0; }, [](double) { return 0.0; });
        result.dissipated += dark.dissipated / input_energy;
        result.leakage += dark.exit_energy / input_energy;
    }
    result.state = std::move(state);
    return result;
}

MemoryReport retrieve(const ProtocolConfig& config, const StoreResult& stored) {
    const double input_energy = config.pulse.inputEnergy();
    AtomicState state = stored.state;
    if (config.read_direction == ReadDirection::backward) {
        std::reverse(state.p_n.begin(), state.p_n.end());
        std::reverse(state.p_nprime.begin(), state.p_nprime.end());
        std::reverse(state.spin.begin(), state.spin.end());
    }
    EvolveResult read = evolve(
        config, state, 0.0, config.read_duration, [](double) { return 0.0; },
        switchOnEnvelope(config));

    MemoryReport report;
    report.leakage = stored.leakage;
    report.efficiency = read.exit_energy / input_energy;
    report.direction = config.read_direction;
    report.zeta_grid = stored.zeta_grid;
    report.spin_wave = stored.spin_wave;
    report.stored_fraction = stored.stored_fraction;
    report.dissipated = stored.dissipated + read.dissipated / input_energy;
    report.residual_p_warning = stored.residual_p_warning;
    report.write_waveform = stored.write_waveform;
    report.retrieved_waveform = fieldRecordFrom(read, input_energy, config.grid.dt);
    return report;
}

MemoryReport runProtocol(const ProtocolConfig& config) {
    return retrieve(config, store(config));
}

}  // namespace raman
