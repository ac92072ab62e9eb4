#include "raman/susceptibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "raman/errors.hpp"

namespace raman {
namespace {

using namespace std::complex_literals;

// Cs D1 line data used only to convert mass/temperature into gamma-unit
// Doppler and recoil shifts for the thermal momentum path.
constexpr double kD1WavelengthM = 894.593e-9;
constexpr double kGammaRadPerS = 2.0 * M_PI * 4.5612e6;
constexpr double kAmuKg = 1.66053906660e-27;
constexpr double kBoltzmann = 1.380649e-23;
constexpr double kHbar = 1.054571817e-34;

constexpr double kPoleTolerance = 1e-14;

// chi / (n0 lambdabar^3) = -probe_weight * sum c1 c2 G12 with G in 1/(hbar gamma)
// units; probe_weight = (3/4)(2J'+1) = 3/2 for J' = 1/2 ties the reduced dipole
// element to gamma.
constexpr double kProbeWeight = 1.5;

// Gauss-Hermite nodes/weights for integral dx e^{-x^2} f(x); orthonormal
// recurrence plus Newton polishing.
void gaussHermite(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int half = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < half; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(n, 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * x[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * x[1];
        } else {
            z = 2.0 * z - x[i - 2];
        }
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = std::pow(M_PI, -0.25);
            double p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
}

struct GreensInput {
    Complex a;  // E - E_n shifted, + i/2
    Complex b;  // E - E_n' shifted, + i/2
    Complex c;  // E - Delta (+ recoil)
    double v1;
    double v2;
};

GreensInput greensInput(const ControlField& control, const AtomModel& atom, Complex energy,
                        const MomentumNode& p) {
    const double kinetic = p.doppler + p.recoil;
    GreensInput in;
    in.a = energy - kinetic - atom.energy_n + 0.5i;
    in.b = energy - kinetic - atom.energyNPrime() + 0.5i;
    in.c = energy - control.detuning + p.recoil;
    in.v1 = control.vN();
    in.v2 = control.vNPrime();
    return in;
}

}  // namespace

ControlField makeControlField(const AtomModel& atom, double detuning, double rabi) {
    if (!(rabi >= 0.0)) throw ConfigError("control.rabi must be >= 0");
    if (!std::isfinite(detuning)) throw ConfigError("control.detuning must be finite");
    ControlField field;
    field.detuning = detuning;
    field.rabi = rabi;
    field.couplings = buildCouplings(atom);
    const double scale = 0.5 * rabi / std::abs(field.couplings.control_to_n);
    field.couplings.control_to_n *= scale;
    field.couplings.control_to_nprime *= scale;
    return field;
}

MomentumDistribution MomentumDistribution::frozen() {
    return MomentumDistribution{};
}

MomentumDistribution MomentumDistribution::thermal(double mass_amu, double temperature_K,
                                                   int quadrature_order) {
    MomentumDistribution dist;
    dist.kind = Kind::thermal;
    dist.mass_amu = mass_amu;
    dist.temperature_K = temperature_K;
    dist.quadrature_order = quadrature_order;
    return dist;
}

double MomentumDistribution::dopplerSigma() const {
    const double k = 2.0 * M_PI / kD1WavelengthM;
    const double m = mass_amu * kAmuKg;
    return k * std::sqrt(kBoltzmann * std::max(temperature_K, 0.0) / m) / kGammaRadPerS;
}

double MomentumDistribution::recoilShift() const {
    const double k = 2.0 * M_PI / kD1WavelengthM;
    const double m = mass_amu * kAmuKg;
    return kHbar * k * k / (2.0 * m) / kGammaRadPerS;
}

std::vector<MomentumNode> momentumNodes(const MomentumDistribution& dist) {
    if (dist.kind == MomentumDistribution::Kind::frozen) {
        return {MomentumNode{1.0, 0.0, 0.0}};
    }
    if (dist.quadrature_order < 1) throw ConfigError("momentum.quadrature_order must be >= 1");
    if (!(dist.mass_amu > 0.0)) throw ConfigError("momentum.mass_amu must be > 0");
    if (dist.temperature_K < 0.0) throw ConfigError("momentum.temperature_K must be >= 0");

    std::vector<double> x, w;
    gaussHermite(dist.quadrature_order, x, w);
    const double norm = std::sqrt(M_PI);
    const double recoil = dist.include_recoil ? dist.recoilShift() : 0.0;
    // p_z = sqrt(2 m kB T) x  =>  Doppler shift k p_z / m = sqrt(2) sigma x
    const double doppler_scale = std::sqrt(2.0) * dist.dopplerSigma();

    std::vector<MomentumNode> nodes(x.size());
    double wsum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        nodes[i] = MomentumNode{w[i] / norm, doppler_scale * x[i], recoil};
        wsum += nodes[i].weight;
    }
    if (std::abs(wsum - 1.0) > 1e-10) {
        throw NumericError("momentum quadrature failed normalization");
    }
    return nodes;
}

std::array<Complex, 2> quasiEnergies(const ControlField& control, const AtomModel& atom,
                                     ExcitedState state, const MomentumNode& p) {
    const double level =
        (state == ExcitedState::n) ? atom.energy_n : atom.energyNPrime();
    const double v = (state == ExcitedState::n) ? control.vN() : control.vNPrime();
    const Complex excited = level + p.doppler + p.recoil - 0.5i;
    const Complex photon = control.detuning - p.recoil;  // m' + control photon
    const Complex center = 0.5 * (excited + photon);
    // principal branch: continuous in Delta on the real axis for
    // Omega_c > gamma/2 and reducing to the positive root at large |Delta|
    const Complex split = std::sqrt(v * v + 0.25 * (excited - photon) * (excited - photon));
    return {center - split, center + split};
}

DressedGreens greensMatrix(const ControlField& control, const AtomModel& atom, Complex energy,
                           const MomentumNode& p) {
    const GreensInput in = greensInput(control, atom, energy, p);
    DressedGreens g;
    if (control.rabi == 0.0) {
        if (std::abs(in.a) < kPoleTolerance || std::abs(in.b) < kPoleTolerance) {
            throw NumericError("greensMatrix evaluated at a bare resonance pole");
        }
        g.nn = 1.0 / in.a;
        g.nprime_nprime = 1.0 / in.b;
        g.n_nprime = g.nprime_n = 0.0;
        return g;
    }
    const Complex quad_n = in.a * in.c - in.v1 * in.v1;       // (E-E_{n+})(E-E_{n-})
    const Complex quad_np = in.b * in.c - in.v2 * in.v2;      // (E-E_{n'+})(E-E_{n'-})
    const Complex det = in.a * quad_np - in.v1 * in.v1 * in.b;
    if (std::abs(det) < kPoleTolerance) {
        throw NumericError("greensMatrix evaluated at a dressed pole");
    }
    g.nn = quad_np / det;
    g.nprime_nprime = quad_n / det;
    g.n_nprime = g.nprime_n = in.v1 * in.v2 / det;
    return g;
}

namespace {

Complex susceptibilityAtNode(const AtomModel& atom, const ControlField& control, Complex energy,
                             const MomentumNode& node, SpectrumModel model) {
    const double cn = control.couplings.probe_to_n;
    const double cnp = control.couplings.probe_to_nprime;
    if (model == SpectrumModel::lambda) {
        // three-level reference: |n'> disregarded entirely
        const GreensInput in = greensInput(control, atom, energy, node);
        const Complex denom = in.a * in.c - in.v1 * in.v1;
        if (std::abs(denom) < kPoleTolerance) {
            throw NumericError("lambda-model susceptibility evaluated at a pole");
        }
        return -kProbeWeight * cn * cn * in.c / denom;
    }
    const DressedGreens g = greensMatrix(control, atom, energy, node);
    return -kProbeWeight * (cn * cn * g.nn + cn * cnp * (g.n_nprime + g.nprime_n) +
                            cnp * cnp * g.nprime_nprime);
}

Complex susceptibilityAveraged(const AtomModel& atom, const ControlField& control,
                               const std::vector<MomentumNode>& nodes, double delta_bar,
                               SpectrumModel model) {
    Complex chi = 0.0;
    for (const MomentumNode& node : nodes) {
        chi += node.weight * susceptibilityAtNode(atom, control, Complex(delta_bar), node, model);
    }
    return chi;
}

}  // namespace

Complex susceptibility(const AtomModel& atom, const ControlField& control,
                       const MomentumDistribution& dist, double delta_bar, SpectrumModel model) {
    if (!std::isfinite(delta_bar)) throw ConfigError("detuning must be finite");
    return susceptibilityAveraged(atom, control, momentumNodes(dist), delta_bar, model);
}

SusceptibilitySpectrum scanSpectrum(const AtomModel& atom, const ControlField& control,
                                    const MomentumDistribution& dist,
                                    const std::vector<double>& grid, SpectrumModel model) {
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw ConfigError("spectrum grid must be strictly increasing");
        }
    }
    const std::vector<MomentumNode> nodes = momentumNodes(dist);
    SusceptibilitySpectrum spectrum;
    spectrum.grid = grid;
    spectrum.control = control;
    spectrum.model = model;
    spectrum.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        spectrum.values[i] = susceptibilityAveraged(atom, control, nodes, grid[i], model);
    }
    return spectrum;
}

namespace {

// vertex of the parabola through three points; falls back to the middle
// point when the curvature degenerates
void parabolaVertex(double x0, double y0, double x1, double y1, double x2, double y2,
                    double& xv, double& yv) {
    const double d0 = (y0 - y1) / (x0 - x1);
    const double d1 = (y1 - y2) / (x1 - x2);
    const double curv = (d0 - d1) / (x0 - x2);
    if (curv == 0.0 || !std::isfinite(curv)) {
        xv = x1;
        yv = y1;
        return;
    }
    xv = 0.5 * (x0 + x1 - d0 / curv);
    yv = y1 + curv * (xv - x0) * (xv - x1) + d0 * (xv - x1);
}

double interpolateCrossing(double xa, double ya, double xb, double yb, double level) {
    return xa + (level - ya) * (xb - xa) / (yb - ya);
}

}  // namespace

std::vector<Resonance> findATResonances(const SusceptibilitySpectrum& spectrum) {
    const auto& x = spectrum.grid;
    const std::size_t n = x.size();
    std::vector<double> im(n);
    for (std::size_t i = 0; i < n; ++i) im[i] = spectrum.values[i].imag();

    std::vector<Resonance> peaks;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(im[i] > im[i - 1] && im[i] > im[i + 1])) continue;
        const double floor_val = 1e-300;
        double xv, lv;
        parabolaVertex(x[i - 1], std::log(std::max(im[i - 1], floor_val)),
                       x[i], std::log(std::max(im[i], floor_val)),
                       x[i + 1], std::log(std::max(im[i + 1], floor_val)), xv, lv);
        Resonance peak;
        peak.center = xv;
        peak.height = std::exp(lv);

        const double half = 0.5 * peak.height;
        double left = std::numeric_limits<double>::quiet_NaN();
        double right = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t k = i; k-- > 0;) {
            if (im[k] > im[k + 1] && k + 1 < i) break;  // entered the next valley
            if (im[k] < half) {
                left = interpolateCrossing(x[k], im[k], x[k + 1], im[k + 1], half);
                break;
            }
        }
        for (std::size_t k = i + 1; k < n; ++k) {
            if (k > i + 1 && im[k] > im[k - 1]) break;
            if (im[k] < half) {
                right = interpolateCrossing(x[k - 1], im[k - 1], x[k], im[k], half);
                break;
            }
        }
        peak.fwhm = right - left;  // NaN when either flank is unresolved
        peaks.push_back(peak);
    }
    return peaks;
}

EitResult eitDiagnostics(const SusceptibilitySpectrum& spectrum) {
    const auto& x = spectrum.grid;
    const std::size_t n = x.size();
    std::vector<double> im(n);
    for (std::size_t i = 0; i < n; ++i) im[i] = spectrum.values[i].imag();

    const double target = spectrum.control.detuning;
    bool found = false;
    std::size_t best = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (im[i] <= im[i - 1] && im[i] <= im[i + 1] && (im[i] < im[i - 1] || im[i] < im[i + 1])) {
            if (!found || std::abs(x[i] - target) < std::abs(x[best] - target)) {
                best = i;
                found = true;
            }
        }
    }
    if (!found) {
        throw std::runtime_error("eitDiagnostics: no transparency minimum between resonances");
    }
    double xv, yv;
    parabolaVertex(x[best - 1], im[best - 1], x[best], im[best], x[best + 1], im[best + 1], xv, yv);
    EitResult result;
    result.shift = xv - target;
    result.residual_absorption = yv;
    return result;
}

ChiFunction makeChiFunction(const AtomModel& atom, const ControlField& control,
                            const MomentumDistribution& dist, SpectrumModel model) {
    const std::vector<MomentumNode> nodes = momentumNodes(dist);
    return [atom, control, nodes, model](double delta_bar) {
        return susceptibilityAveraged(atom, control, nodes, delta_bar, model);
    };
}

double opticalDepth(const SusceptibilitySpectrum& spectrum, double delta_bar,
                    double depth_scale) {
    if (!(depth_scale > 0.0)) throw ConfigError("depth scale b0 must be > 0");
    const auto& x = spectrum.grid;
    if (x.empty() || delta_bar < x.front() || delta_bar > x.back()) {
        throw ConfigError("opticalDepth: detuning outside the sampled grid");
    }
    const auto it = std::lower_bound(x.begin(), x.end(), delta_bar);
    std::size_t hi = static_cast<std::size_t>(it - x.begin());
    if (hi == 0) hi = 1;
    const std::size_t lo = hi - 1;
    const double t = (delta_bar - x[lo]) / (x[hi] - x[lo]);
    const double chi_im =
        (1.0 - t) * spectrum.values[lo].imag() + t * spectrum.values[hi].imag();
    return 4.0 * M_PI * chi_im * depth_scale;
}

}  // namespace raman
