#include "raman/pulse.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "raman/errors.hpp"

namespace raman {
namespace {

using namespace std::complex_literals;

// FFTW planning is not thread-safe; execution on private buffers is.
std::mutex& fftwPlanMutex() {
    static std::mutex m;
    return m;
}

// in-place inverse DFT with the convention f(t_j) = (1/W) sum_k F_k e^{-i Omega_k t_j},
// Omega_k = 2 pi k / W on the usual wrapped DFT index grid
void inverseSpectrum(std::vector<Complex>& data, double window) {
    const int n = static_cast<int>(data.size());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftwPlanMutex());
        plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(data.data()),
                                reinterpret_cast<fftw_complex*>(data.data()), FFTW_FORWARD,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftwPlanMutex());
        fftw_destroy_plan(plan);
    }
    for (Complex& v : data) v /= window;
}

}  // namespace

double PulseSpec::effectiveCarrier() const {
    return carrier_offset + 2.0 * M_PI * mode_index / duration;
}

double PulseSpec::envelope(double t) const {
    if (shape == Shape::rectangular) {
        return (t >= 0.0 && t < duration) ? 1.0 : 0.0;
    }
    if (t < envelope_times.front() || t > envelope_times.back()) return 0.0;
    const auto it = std::lower_bound(envelope_times.begin(), envelope_times.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - envelope_times.begin());
    if (hi == 0) return envelope_values.front();
    const std::size_t lo = hi - 1;
    if (hi == envelope_times.size()) return envelope_values.back();
    const double u = (t - envelope_times[lo]) / (envelope_times[hi] - envelope_times[lo]);
    return (1.0 - u) * envelope_values[lo] + u * envelope_values[hi];
}

double PulseSpec::inputEnergy() const {
    if (shape == Shape::rectangular) return duration;
    double energy = 0.0;
    for (std::size_t i = 1; i < envelope_times.size(); ++i) {
        const double va = envelope_values[i - 1], vb = envelope_values[i];
        energy += 0.5 * (va * va + vb * vb) * (envelope_times[i] - envelope_times[i - 1]);
    }
    return energy;
}

void PulseSpec::validate() const {
    if (!(duration > 0.0)) throw ConfigError("pulse.duration must be > 0");
    if (shape == Shape::tabulated) {
        if (envelope_times.size() < 2 || envelope_times.size() != envelope_values.size()) {
            throw ConfigError("pulse envelope table needs matching times/values, >= 2 points");
        }
        for (std::size_t i = 1; i < envelope_times.size(); ++i) {
            if (!(envelope_times[i] > envelope_times[i - 1])) {
                throw ConfigError("pulse envelope times must be strictly increasing");
            }
        }
        if (envelope_times.front() < 0.0 || envelope_times.back() > duration) {
            throw ConfigError("pulse envelope must lie within [0, duration]");
        }
    }
}

Complex transferFunction(const ChiFunction& chi, const MediumSpec& medium, double omega,
                         double carrier_offset) {
    const Complex exponent =
        1i * medium.retardation * omega + 2.0 * M_PI * 1i * medium.depth * chi(carrier_offset + omega);
    return std::exp(exponent);
}

FieldRecord propagatePulse(const PulseSpec& pulse, const MediumSpec& medium,
                           const ChiFunction& chi, const PropagationOptions& options) {
    pulse.validate();
    const double T = pulse.duration;
    const int samples = options.samples_per_duration;
    const int durations = options.window_durations;
    if (samples < 8 || durations < 2) throw ConfigError("propagation grid too small");
    const int n = samples * durations;
    const double dt = T / samples;
    const double window = durations * T;  // total time window
    const double omega_max = options.window_mult * 2.0 * M_PI / T;
    if (omega_max >= M_PI / dt) {
        throw ConfigError("sideband window exceeds the Nyquist rate; raise samples_per_duration");
    }
    const double carrier = pulse.effectiveCarrier();

    // input spectrum on the DFT frequency grid
    std::vector<Complex> in_spectrum(n), out_spectrum(n);
    std::vector<double> omegas(n);
    for (int k = 0; k < n; ++k) {
        const int idx = (k <= n / 2) ? k : k - n;  // wrapped DFT ordering
        omegas[k] = 2.0 * M_PI * idx / window;
    }
    if (pulse.shape == PulseSpec::Shape::rectangular) {
        for (int k = 0; k < n; ++k) {
            const double w = omegas[k];
            in_spectrum[k] = (std::abs(w) < 1e-12)
                                 ? Complex(T)
                                 : (std::exp(1i * w * T) - 1.0) / (1i * w);
        }
    } else {
        // forward transform of the tabulated envelope, integral convention
        std::vector<Complex> samples_t(n);
        for (int j = 0; j < n; ++j) samples_t[j] = pulse.envelope(j * dt);
        fftw_plan plan;
        {
            std::lock_guard<std::mutex> lock(fftwPlanMutex());
            plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(samples_t.data()),
                                    reinterpret_cast<fftw_complex*>(in_spectrum.data()),
                                    FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        fftw_execute(plan);
        {
            std::lock_guard<std::mutex> lock(fftwPlanMutex());
            fftw_destroy_plan(plan);
        }
        for (Complex& v : in_spectrum) v *= dt;
    }

    // apply the slab transfer inside the sideband window
    double windowed_energy = 0.0;
    const double d_omega = 2.0 * M_PI / window;
    for (int k = 0; k < n; ++k) {
        if (std::abs(omegas[k]) <= omega_max) {
            windowed_energy += std::norm(in_spectrum[k]) * d_omega / (2.0 * M_PI);
            out_spectrum[k] = in_spectrum[k] * transferFunction(chi, medium, omegas[k], carrier);
        } else {
            in_spectrum[k] = 0.0;
            out_spectrum[k] = 0.0;
        }
    }

    FieldRecord record;
    record.input_energy = pulse.inputEnergy();
    record.outside_window_fraction =
        std::max(0.0, 1.0 - windowed_energy / record.input_energy);
    record.leakage_warning = record.outside_window_fraction > 1e-3;
    record.omega_max = omega_max;
    record.dt = dt;

    inverseSpectrum(out_spectrum, window);
    inverseSpectrum(in_spectrum, window);

    record.time_grid.resize(n);
    record.amplitude = std::move(out_spectrum);
    double out_energy = 0.0, in_centroid = 0.0, in_energy = 0.0;
    for (int j = 0; j < n; ++j) {
        const double t = j * dt;
        record.time_grid[j] = t;
        out_energy += std::norm(record.amplitude[j]) * dt;
        const double pin = std::norm(in_spectrum[j]) * dt;
        in_energy += pin;
        in_centroid += t * pin;
    }
    record.output_energy = out_energy;
    record.input_centroid = in_energy > 0.0 ? in_centroid / in_energy : 0.0;
    return record;
}

PulseMetrics pulseMetrics(const FieldRecord& record, const PulseSpec& pulse) {
    PulseMetrics metrics;
    const double dt = record.dt;
    double energy = 0.0, centroid = 0.0, tail = 0.0;
    for (std::size_t j = 0; j < record.time_grid.size(); ++j) {
        const double p = std::norm(record.amplitude[j]) * dt;
        energy += p;
        centroid += record.time_grid[j] * p;
        if (record.time_grid[j] > pulse.duration) tail += p;
    }
    metrics.transmission = record.input_energy > 0.0 ? energy / record.input_energy : 0.0;
    metrics.delay = energy > 0.0 ? centroid / energy - record.input_centroid : 0.0;
    metrics.tail_fraction = record.input_energy > 0.0 ? tail / record.input_energy : 0.0;
    return metrics;
}

}  // namespace raman
