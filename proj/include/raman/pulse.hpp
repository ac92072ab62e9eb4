#pragma once

#include <vector>

#include "raman/susceptibility.hpp"

namespace raman {

/// Input signal pulse. Time in 1/gamma units; amplitude dimensionless.
/// The effective carrier detuning is carrier_offset + 2*pi*mode_index/duration,
/// so mode_index = -1, 0, +1 selects the spectrally orthogonal carriers
/// omega_-, omega, omega_+ of a duration-T frame.
struct PulseSpec {
    enum class Shape { rectangular, tabulated };
    double duration = 10.0;       ///< T > 0
    Shape shape = Shape::rectangular;
    std::vector<double> envelope_times;   ///< tabulated shape only, within [0, T]
    std::vector<double> envelope_values;  ///< real envelope samples
    double carrier_offset = 0.0;  ///< Delta_bar of the q = 0 carrier
    int mode_index = 0;           ///< q

    double effectiveCarrier() const;
    /// Envelope alpha_in(t); rectangular = theta(t) - theta(t - T).
    double envelope(double t) const;
    /// integral |alpha_in|^2 dt, computed exactly for the rectangle.
    double inputEnergy() const;
    void validate() const;
};

/// Homogeneous slab parameters. depth is b0 = n0*lambdabar^2*L; density_scale
/// (n0*lambdabar^3) only fixes unit conversion for reporting; retardation is
/// the dimensionless L/(c/gamma) factor multiplying the i*Omega/c term of the
/// propagation equation (0 = co-moving frame).
struct MediumSpec {
    double depth = 50.0;
    double density_scale = 1e-3;
    double retardation = 0.0;
};

/// Sideband window and grid controls for propagatePulse.
struct PropagationOptions {
    double window_mult = 200.0;  ///< keep |Omega| <= window_mult * (2*pi/T)
    int samples_per_duration = 512;   ///< time samples per T (exact integer)
    int window_durations = 32;        ///< total time window, in units of T
};

/// Exit-face field history plus bookkeeping of the spectral window used.
struct FieldRecord {
    std::vector<double> time_grid;
    std::vector<Complex> amplitude;      ///< alpha(z = L, t)
    double input_energy = 0.0;
    double output_energy = 0.0;
    double input_centroid = 0.0;         ///< energy centroid of the input
    double outside_window_fraction = 0.0;
    bool leakage_warning = false;        ///< > 0.1% of input energy outside window
    double omega_max = 0.0;
    double dt = 0.0;
};

/// Exact single-slab transfer exp[i*retardation*Omega + i*2*pi*b0*chi(carrier + Omega)].
Complex transferFunction(const ChiFunction& chi, const MediumSpec& medium, double omega,
                         double carrier_offset);

/// Propagate a pulse through the slab in the Fourier domain: sample the
/// input spectrum (analytic for the rectangle), apply the transfer function
/// inside the sideband window, and invert on a uniform time grid with an
/// exact integer number of samples per T.
FieldRecord propagatePulse(const PulseSpec& pulse, const MediumSpec& medium,
                           const ChiFunction& chi, const PropagationOptions& options = {});

struct PulseMetrics {
    double delay = 0.0;          ///< output energy centroid minus input centroid
    double transmission = 0.0;   ///< output_energy / input_energy
    double tail_fraction = 0.0;  ///< energy at t > T over input energy
};

PulseMetrics pulseMetrics(const FieldRecord& record, const PulseSpec& pulse);

}  // namespace raman
