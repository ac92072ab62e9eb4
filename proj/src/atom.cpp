#include "raman/atom.hpp"

#include <cmath>
#include <string>

#include "raman/errors.hpp"
#include "raman/wigner.hpp"

namespace raman {
namespace {

bool halfIntegral(double j) {
    return std::isfinite(j) && std::abs(2.0 * j - std::round(2.0 * j)) < 1e-9;
}

// <F' M'| d_q |F M> in units of the reduced element <J'||d||J>, for a
// composite F = J + I with the dipole acting on the electronic part only
// (Edmonds conventions: Wigner-Eckart plus the 6-j recoupling).
double dipoleFactor(double i_nuc, double j_g, double j_e, double f_g, double m_g, double f_e,
                    double m_e, int q) {
    const double three = wigner3j(f_e, 1.0, f_g, -m_e, q, m_g);
    if (three == 0.0) return 0.0;
    const double six = wigner6j(j_e, f_e, i_nuc, f_g, j_g, 1.0);
    const double phase_exp = (f_e - m_e) + (j_e + i_nuc + f_g + 1.0);
    const int parity = static_cast<int>(std::llround(phase_exp)) & 1;
    const double sign = parity ? -1.0 : 1.0;
    return sign * std::sqrt((2.0 * f_e + 1.0) * (2.0 * f_g + 1.0)) * three * six;
}

}  // namespace

AtomModel AtomModel::cesiumD1() {
    AtomModel atom;
    atom.nuclear_spin = 3.5;
    atom.hyperfine_splitting = 256.0;  // 1168 MHz in units of gamma
    return atom;
}

void AtomModel::validate() const {
    if (!halfIntegral(nuclear_spin) || nuclear_spin <= 0.0) {
        throw ConfigError("atom.nuclear_spin must be a positive half-integer");
    }
    if (!(hyperfine_splitting > 0.0)) {
        throw ConfigError("atom.hyperfine_splitting must be > 0");
    }
    if (natural_rate != 1.0) {
        throw ConfigError("atom.natural_rate defines the unit system and must be 1");
    }
    if (!std::isfinite(energy_n)) {
        throw ConfigError("atom.energy_n must be finite");
    }
}

CouplingSet buildCouplings(const AtomModel& atom) {
    atom.validate();
    const double I = atom.nuclear_spin;
    const double J = 0.5, Jp = 0.5;
    const double f_g = atom.fGround();
    const double f_lo = atom.fExcitedLower();
    const double f_hi = atom.fExcitedUpper();
    const double m_pop = atom.mPopulated();
    const double m_spin = atom.mSpin();
    const double m_exc = atom.mExcited();

    if (f_lo < std::abs(m_exc)) {
        throw ConfigError("state |n> = {F'-, M' = F+ - 1} does not exist for I = " +
                          std::to_string(I));
    }
    if (f_g < std::abs(m_spin)) {
        throw ConfigError("state |m'> = {F+, M = F+ - 2} does not exist for I = " +
                          std::to_string(I));
    }

    CouplingSet set;
    set.probe_to_n = dipoleFactor(I, J, Jp, f_g, m_pop, f_lo, m_exc, -1);
    set.probe_to_nprime = dipoleFactor(I, J, Jp, f_g, m_pop, f_hi, m_exc, -1);
    set.control_to_n = dipoleFactor(I, J, Jp, f_g, m_spin, f_lo, m_exc, +1);
    set.control_to_nprime = dipoleFactor(I, J, Jp, f_g, m_spin, f_hi, m_exc, +1);

    if (set.probe_to_n == 0.0 || set.control_to_n == 0.0) {
        throw ConfigError("required dipole coupling vanished; level scheme inconsistent");
    }

    // sigma+ out of the stretched populated state must vanish: there is no
    // M' = F+ + 1 sublevel in either excited hyperfine state of J' = 1/2.
    for (double f_e : {f_lo, f_hi}) {
        if (f_e >= m_pop + 1.0 &&
            dipoleFactor(I, J, Jp, f_g, m_pop, f_e, m_pop + 1.0, +1) != 0.0) {
            throw ConfigError("control field couples the populated state; scheme invalid");
        }
    }
    return set;
}

}  // namespace raman
