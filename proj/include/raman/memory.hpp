#pragma once

#include <optional>

#include "raman/pulse.hpp"

namespace raman {

enum class ReadDirection { forward, backward };

/// Control switching envelope; instantaneous by default, or a linear ramp
/// of the given duration.
struct SwitchProfile {
    enum class Type { instantaneous, linear };
    Type type = Type::instantaneous;
    double ramp_time = 0.0;
};

/// Space-time grids of the write/read solver: nz cells over zeta = z/L in
/// [0, 1] (nz + 1 nodes) and a fixed RK4 time step.
struct SolverGrid {
    int nz = 200;
    double dt = 0.002;
};

/// Full write/store/read protocol description.
struct ProtocolConfig {
    AtomModel atom;
    ControlField control;
    MediumSpec medium;
    PulseSpec pulse;
    double write_off_time = -1.0;   ///< < 0 means "at t = T" (pulse fully entered)
    double settle_time = 15.0;      ///< wait after switch-off before extracting sigma
    double storage_time = 20.0;     ///< dark interval
    double read_duration = 80.0;
    ReadDirection read_direction = ReadDirection::backward;
    SwitchProfile switch_profile;
    double spin_decay = 0.0;        ///< ground-coherence decay rate (gamma units)
    SolverGrid grid;

    double writeOffTime() const { return write_off_time < 0 ? pulse.duration : write_off_time; }
    void validate() const;
};

/// Optical coherences P_n, P_n' (m -> n, m -> n') and spin coherence S
/// (m -> m') on the zeta grid.
struct AtomicState {
    std::vector<Complex> p_n, p_nprime, spin;

    static AtomicState zero(int nz);
    int cells() const { return static_cast<int>(spin.size()) - 1; }
};

/// Outcome of the write-in stage.
struct StoreResult {
    double leakage = 0.0;              ///< write-stage transmitted energy / input energy
    double dissipated = 0.0;           ///< gamma-channel losses during write, same units
    std::vector<double> zeta_grid;
    std::vector<Complex> spin_wave;    ///< sigma(zeta) at extraction time
    double stored_fraction = 0.0;      ///< spin-wave energy / input energy
    bool residual_p_warning = false;   ///< optical coherences not fully decayed
    FieldRecord write_waveform;        ///< exit field during the write stage
    AtomicState state;                 ///< full state at extraction time
};

struct MemoryReport {
    double leakage = 0.0;
    double efficiency = 0.0;           ///< retrieved energy / input energy
    ReadDirection direction = ReadDirection::backward;
    std::vector<double> zeta_grid;
    std::vector<Complex> spin_wave;
    double stored_fraction = 0.0;
    double dissipated = 0.0;           ///< total gamma losses, write + read
    bool residual_p_warning = false;
    FieldRecord write_waveform;
    FieldRecord retrieved_waveform;
};

/// Low-level integrator: advance the coupled field/coherence system over
/// [t0, t1] with the given input-field boundary and control envelope
/// (a multiplier of the nominal control couplings), recording the exit
/// amplitude each step. Throws NumericError on NaN blow-up.
///
/// The system, in the co-moving frame with zeta = z/L:
///   d_zeta alpha = i 2 pi b0 sum_j c_j* P_j
///   d_t P_j = (i delta_j - 1/2) P_j + i c_j alpha + i v_j(t) S
///   d_t S   = (i delta_S - gamma_S) S + i sum_j v_j(t)* P_j
/// with c_j the probe couplings scaled so the constant-control steady state
/// reproduces the full-model susceptibility pointwise.
struct EvolveResult {
    std::vector<double> time_grid;
    std::vector<Complex> exit_amplitude;
    double exit_energy = 0.0;
    double dissipated = 0.0;  ///< input-energy units: 2 pi b0 integral of gamma |P|^2 (+ spin term)
};
EvolveResult evolve(const ProtocolConfig& config, AtomicState& state, double t0, double t1,
                    const std::function<double(double)>& input_field,
                    const std::function<double(double)>& control_envelope);

/// Write-in plus switch-off settling: returns leakage and the stored spin wave.
StoreResult store(const ProtocolConfig& config);

/// Convert a stored spin wave back into light after the dark interval.
/// Backward retrieval mirrors sigma(zeta) -> sigma(1 - zeta) and reruns the
/// fixed-direction solver, which is equivalent to reversing the propagation
/// direction.
MemoryReport retrieve(const ProtocolConfig& config, const StoreResult& stored);

/// store -> dark interval -> retrieve, with aggregated accounting.
MemoryReport runProtocol(const ProtocolConfig& config);

}  // namespace raman
