#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "raman/atom.hpp"

namespace raman {

using Complex = std::complex<double>;

/// Control-field parameters. detuning is Delta = omega_c - omega_{nm'} in
/// gamma units, rabi is Omega_c = 2|V_{nm'}|/hbar >= 0. The stored
/// CouplingSet is scaled so that |control_to_n| = Omega_c/2 and
/// control_to_nprime = rho * control_to_n, keeping the sign pattern of the
/// bare algebraic factors; the probe entries are left in reduced-element
/// units.
struct ControlField {
    double detuning = 0.0;
    double rabi = 0.0;
    CouplingSet couplings;

    double vN() const { return couplings.control_to_n; }            ///< V_{nm'} in gamma
    double vNPrime() const { return couplings.control_to_nprime; }  ///< V_{n'm'} in gamma
};

/// Build a ControlField for the given atom; rabi = 0 recovers the bare
/// two-resonance medium.
ControlField makeControlField(const AtomModel& atom, double detuning, double rabi);

/// Atomic momentum distribution entering the average of the susceptibility.
/// Default is the frozen (MOT) case p = 0. The thermal case reduces to a
/// 1D Gauss-Hermite average over the Doppler shift along the propagation
/// axis; the probe-recoil shift of the excited-state momentum is retained
/// there and inert in the frozen path (off by default, see include_recoil).
struct MomentumDistribution {
    enum class Kind { frozen, thermal };
    Kind kind = Kind::frozen;
    double mass_amu = 132.905451933;  ///< m0 in atomic mass units
    double temperature_K = 0.0;
    int quadrature_order = 32;
    bool include_recoil = false;

    static MomentumDistribution frozen();
    static MomentumDistribution thermal(double mass_amu, double temperature_K,
                                        int quadrature_order = 32);

    /// 1-sigma Doppler width k*sqrt(kB T/m) in gamma units (Cs D1 constants).
    double dopplerSigma() const;
    /// Probe photon recoil frequency hbar*k^2/(2 m) in gamma units.
    double recoilShift() const;
};

/// One node of the discretized momentum average: quadrature weight plus the
/// Doppler and recoil frequency shifts (gamma units) it contributes.
struct MomentumNode {
    double weight = 1.0;
    double doppler = 0.0;
    double recoil = 0.0;
};

/// Discretize the distribution; weights sum to 1 (the normalization of the
/// underlying f0 integral) to better than 1e-10.
std::vector<MomentumNode> momentumNodes(const MomentumDistribution& dist);

enum class ExcitedState { n, nprime };
enum class SpectrumModel { full, lambda };

/// The 2x2 matrix of dressed excited-state Green's functions, evaluated at
/// one on-shell energy, in units of 1/(hbar*gamma).
struct DressedGreens {
    Complex nn, n_nprime, nprime_n, nprime_nprime;
};

/// Quasi-energies E_{state +/-} of the control-dressed {excited, m'+photon}
/// pair, in the frame where the on-shell energy equals the probe detuning
/// (ground energies at 0, photon energies measured from omega_0).
/// The complex square root is taken on the branch that is continuous in
/// Delta along the real axis and reduces to the positive root at large
/// |Delta|; element [0] is E_-, element [1] is E_+. For Omega_c < gamma/2
/// the +/- labels lose meaning near resonance (overdamped regime) but the
/// pair itself stays exact.
std::array<Complex, 2> quasiEnergies(const ControlField& control, const AtomModel& atom,
                                     ExcitedState state, const MomentumNode& p = {});

/// All four entries of Eq.-of-motion Green's matrix at complex energy E
/// (gamma units, same frame as quasiEnergies). Throws NumericError when E
/// lands on a pole (denominator modulus < 1e-14).
DressedGreens greensMatrix(const ControlField& control, const AtomModel& atom, Complex energy,
                           const MomentumNode& p = {});

/// Sample susceptibility at probe detuning delta_bar, scaled by n0*lambdabar^3.
/// model = full keeps all four terms of the 2x2 Green's-function sum;
/// model = lambda is the three-level reference where |n'> is disregarded.
Complex susceptibility(const AtomModel& atom, const ControlField& control,
                       const MomentumDistribution& dist, double delta_bar,
                       SpectrumModel model = SpectrumModel::full);

struct SusceptibilitySpectrum {
    std::vector<double> grid;     ///< probe detunings, strictly increasing
    std::vector<Complex> values;  ///< chi(delta_bar) / (n0 lambdabar^3)
    ControlField control;
    SpectrumModel model = SpectrumModel::full;
};

/// Pointwise susceptibility over a strictly increasing detuning grid.
SusceptibilitySpectrum scanSpectrum(const AtomModel& atom, const ControlField& control,
                                    const MomentumDistribution& dist,
                                    const std::vector<double>& grid,
                                    SpectrumModel model = SpectrumModel::full);

/// One absorption resonance: peak center and height refined by quadratic
/// interpolation of log chi'', FWHM from linear interpolation of the
/// half-height crossings (NaN when a flank does not cross within the grid).
struct Resonance {
    double center = 0.0;
    double height = 0.0;
    double fwhm = 0.0;
};

/// Local maxima of chi'' in the spectrum, in increasing center order.
/// Merged components yield fewer entries; nothing is fabricated.
std::vector<Resonance> findATResonances(const SusceptibilitySpectrum& spectrum);

struct EitResult {
    double shift = 0.0;                ///< argmin chi'' - Delta (signed)
    double residual_absorption = 0.0;  ///< min chi''
};

/// Transparency-point diagnostics: location and depth of the chi'' minimum
/// between the dressed resonances. Throws std::runtime_error when the
/// spectrum has no interior local minimum.
EitResult eitDiagnostics(const SusceptibilitySpectrum& spectrum);

/// Optical depth b(delta_bar) = 4*pi*chi''(delta_bar)*b0 with b0 = n0*lambdabar^2*L.
/// chi'' is linearly interpolated from the sampled spectrum.
double opticalDepth(const SusceptibilitySpectrum& spectrum, double delta_bar, double depth_scale);

/// Scaled susceptibility as a function of probe detuning (gamma units).
using ChiFunction = std::function<Complex(double)>;

/// Bind atom/control/distribution/model into a chi(delta_bar) evaluator;
/// the momentum quadrature is discretized once at call time.
ChiFunction makeChiFunction(const AtomModel& atom, const ControlField& control,
                            const MomentumDistribution& dist,
                            SpectrumModel model = SpectrumModel::full);

}  // namespace raman
