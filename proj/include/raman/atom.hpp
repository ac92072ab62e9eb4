#pragma once

namespace raman {

/// Level data for the D1 working scheme (J = 1/2 -> J' = 1/2).
///
/// All frequencies and energies are in units of the natural decay rate
/// gamma of the excited state (gamma == 1 by convention). The energy zero
/// is chosen so that the populated ground sublevel |m> and the ground
/// sublevel |m'> sit at 0 and the probe detuning axis is measured from the
/// |m> -> |n> transition frequency, i.e. energy_n = 0 by default and the
/// upper hyperfine state sits at energy_n + hyperfine_splitting.
///
/// The four working states are fixed by the nuclear spin I:
///   |m>  = {F+ = I + 1/2, M = F+}        (populated, stretched)
///   |m'> = {F+,           M = F+ - 2}
///   |n>  = {F'- = I - 1/2, M' = F+ - 1}
///   |n'> = {F'+ = I + 1/2, M' = F+ - 1}
struct AtomModel {
    double nuclear_spin = 3.5;          ///< I (half-integral, > 0)
    double hyperfine_splitting = 256.0; ///< Omega_HF in gamma units
    double natural_rate = 1.0;          ///< gamma, the frequency unit itself
    double energy_n = 0.0;              ///< E_n in hbar*gamma units

    double energyNPrime() const { return energy_n + hyperfine_splitting; }

    double fGround() const { return nuclear_spin + 0.5; }        ///< F+
    double fExcitedLower() const { return nuclear_spin - 0.5; }  ///< F'-
    double fExcitedUpper() const { return nuclear_spin + 0.5; }  ///< F'+
    double mPopulated() const { return fGround(); }              ///< M of |m>
    double mSpin() const { return fGround() - 2.0; }             ///< M of |m'>
    double mExcited() const { return fGround() - 1.0; }          ///< M' of |n>, |n'>

    /// 133Cs D1: I = 7/2, Omega_HF = 1168 MHz = 256 gamma.
    static AtomModel cesiumD1();

    /// Throws ConfigError when the parameters are unphysical.
    void validate() const;
};

/// Dimensionless dipole factors of the four working transitions, in units
/// of the reduced matrix element <J'||d||J>. Signs follow the standard
/// 3-j/6-j phase conventions; only products and ratios are observable.
struct CouplingSet {
    double probe_to_n = 0.0;        ///< (d.e-)_{n m},  sigma- probe from |m>
    double probe_to_nprime = 0.0;   ///< (d.e-)_{n' m}
    double control_to_n = 0.0;      ///< V_{n m'} factor, sigma+ control from |m'>
    double control_to_nprime = 0.0; ///< V_{n' m'} factor

    /// rho = V_{n'm'} / V_{nm'}; a pure number fixed by I, the F values and
    /// the polarizations (sqrt(7) for Cs D1).
    double controlRatio() const { return control_to_nprime / control_to_n; }
    double probeRatio() const { return probe_to_nprime / probe_to_n; }
};

/// Evaluate the four dipole factors from 3-j/6-j products for the D1 line.
/// The sigma+ control cannot couple the populated stretched state |m> (no
/// M' = F+ + 1 sublevel exists for J' = 1/2); this holds by construction
/// and is re-checked here. Throws ConfigError if a required state does not
/// exist for the given nuclear spin.
CouplingSet buildCouplings(const AtomModel& atom);

}  // namespace raman
