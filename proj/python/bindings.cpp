#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "raman/experiment.hpp"

namespace py = pybind11;
using namespace raman;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Dressed-state susceptibility, dispersive pulse transport and "
              "Raman quantum-memory protocol for a multilevel D1 medium "
              "(all frequencies in units of the natural linewidth gamma)";
    m.attr("__version__") = RAMAN_MEMORY_VERSION;

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<NumericError>(m, "NumericError");

    m.def("wigner3j", &wigner3j, py::arg("j1"), py::arg("j2"), py::arg("j3"), py::arg("m1"),
          py::arg("m2"), py::arg("m3"));
    m.def("wigner6j", &wigner6j, py::arg("j1"), py::arg("j2"), py::arg("j3"), py::arg("j4"),
          py::arg("j5"), py::arg("j6"));

    py::class_<AtomModel>(m, "AtomModel")
        .def(py::init<>())
        .def_readwrite("nuclear_spin", &AtomModel::nuclear_spin)
        .def_readwrite("hyperfine_splitting", &AtomModel::hyperfine_splitting)
        .def_readwrite("natural_rate", &AtomModel::natural_rate)
        .def_readwrite("energy_n", &AtomModel::energy_n)
        .def("energy_nprime", &AtomModel::energyNPrime)
        .def_static("cesium_d1", &AtomModel::cesiumD1);

    py::class_<CouplingSet>(m, "CouplingSet")
        .def_readonly("probe_to_n", &CouplingSet::probe_to_n)
        .def_readonly("probe_to_nprime", &CouplingSet::probe_to_nprime)
        .def_readonly("control_to_n", &CouplingSet::control_to_n)
        .def_readonly("control_to_nprime", &CouplingSet::control_to_nprime)
        .def("control_ratio", &CouplingSet::controlRatio)
        .def("probe_ratio", &CouplingSet::probeRatio);
    m.def("build_couplings", &buildCouplings, py::arg("atom"));

    py::class_<ControlField>(m, "ControlField")
        .def_readonly("detuning", &ControlField::detuning)
        .def_readonly("rabi", &ControlField::rabi)
        .def_readonly("couplings", &ControlField::couplings);
    m.def("make_control_field", &makeControlField, py::arg("atom"), py::arg("detuning"),
          py::arg("rabi"));

    py::class_<MomentumDistribution>(m, "MomentumDistribution")
        .def(py::init<>())
        .def_readwrite("mass_amu", &MomentumDistribution::mass_amu)
        .def_readwrite("temperature_K", &MomentumDistribution::temperature_K)
        .def_readwrite("quadrature_order", &MomentumDistribution::quadrature_order)
        .def_readwrite("include_recoil", &MomentumDistribution::include_recoil)
        .def_static("frozen", &MomentumDistribution::frozen)
        .def_static("thermal", &MomentumDistribution::thermal, py::arg("mass_amu"),
                    py::arg("temperature_K"), py::arg("quadrature_order") = 32)
        .def("doppler_sigma", &MomentumDistribution::dopplerSigma)
        .def("recoil_shift", &MomentumDistribution::recoilShift);

    py::enum_<SpectrumModel>(m, "SpectrumModel")
        .value("full", SpectrumModel::full)
        .value("lambda_scheme", SpectrumModel::lambda);

    py::class_<SusceptibilitySpectrum>(m, "SusceptibilitySpectrum")
        .def_readonly("grid", &SusceptibilitySpectrum::grid)
        .def_readonly("values", &SusceptibilitySpectrum::values)
        .def_readonly("model", &SusceptibilitySpectrum::model);

    py::class_<Resonance>(m, "Resonance")
        .def_readonly("center", &Resonance::center)
        .def_readonly("height", &Resonance::height)
        .def_readonly("fwhm", &Resonance::fwhm)
        .def("__repr__", [](const Resonance& r) {
            return "Resonance(center=" + std::to_string(r.center) +
                   ", height=" + std::to_string(r.height) + ", fwhm=" + std::to_string(r.fwhm) +
                   ")";
        });

    py::class_<EitResult>(m, "EitResult")
        .def_readonly("shift", &EitResult::shift)
        .def_readonly("residual_absorption", &EitResult::residual_absorption);

    m.def("susceptibility", &susceptibility, py::arg("atom"), py::arg("control"), py::arg("dist"),
          py::arg("delta_bar"), py::arg("model") = SpectrumModel::full);
    m.def("scan_spectrum", &scanSpectrum, py::arg("atom"), py::arg("control"), py::arg("dist"),
          py::arg("grid"), py::arg("model") = SpectrumModel::full);
    m.def("find_at_resonances", &findATResonances, py::arg("spectrum"));
    m.def("eit_diagnostics", &eitDiagnostics, py::arg("spectrum"));
    m.def("optical_depth", &opticalDepth, py::arg("spectrum"), py::arg("delta_bar"),
          py::arg("depth_scale"));

    py::class_<PulseSpec> pulse(m, "PulseSpec");
    py::enum_<PulseSpec::Shape>(pulse, "Shape")
        .value("rectangular", PulseSpec::Shape::rectangular)
        .value("tabulated", PulseSpec::Shape::tabulated);
    pulse.def(py::init<>())
        .def_readwrite("duration", &PulseSpec::duration)
        .def_readwrite("shape", &PulseSpec::shape)
        .def_readwrite("envelope_times", &PulseSpec::envelope_times)
        .def_readwrite("envelope_values", &PulseSpec::envelope_values)
        .def_readwrite("carrier_offset", &PulseSpec::carrier_offset)
        .def_readwrite("mode_index", &PulseSpec::mode_index)
        .def("effective_carrier", &PulseSpec::effectiveCarrier)
        .def("input_energy", &PulseSpec::inputEnergy);

    py::class_<MediumSpec>(m, "MediumSpec")
        .def(py::init<>())
        .def_readwrite("depth", &MediumSpec::depth)
        .def_readwrite("density_scale", &MediumSpec::density_scale)
        .def_readwrite("retardation", &MediumSpec::retardation);

    py::class_<PropagationOptions>(m, "PropagationOptions")
        .def(py::init<>())
        .def_readwrite("window_mult", &PropagationOptions::window_mult)
        .def_readwrite("samples_per_duration", &PropagationOptions::samples_per_duration)
        .def_readwrite("window_durations", &PropagationOptions::window_durations);

    py::class_<FieldRecord>(m, "FieldRecord")
        .def_readonly("time_grid", &FieldRecord::time_grid)
        .def_readonly("amplitude", &FieldRecord::amplitude)
        .def_readonly("input_energy", &FieldRecord::input_energy)
        .def_readonly("output_energy", &FieldRecord::output_energy)
        .def_readonly("outside_window_fraction", &FieldRecord::outside_window_fraction)
        .def_readonly("leakage_warning", &FieldRecord::leakage_warning);

    py::class_<PulseMetrics>(m, "PulseMetrics")
        .def_readonly("delay", &PulseMetrics::delay)
        .def_readonly("transmission", &PulseMetrics::transmission)
        .def_readonly("tail_fraction", &PulseMetrics::tail_fraction);

    m.def("make_chi_function", &makeChiFunction, py::arg("atom"), py::arg("control"),
          py::arg("dist"), py::arg("model") = SpectrumModel::full);
    m.def("transfer_function", &transferFunction, py::arg("chi"), py::arg("medium"),
          py::arg("omega"), py::arg("carrier_offset"));
    m.def(
        "propagate_pulse",
        [](const PulseSpec& p, const MediumSpec& medium, const ChiFunction& chi,
           const PropagationOptions& options) { return propagatePulse(p, medium, chi, options); },
        py::arg("pulse"), py::arg("medium"), py::arg("chi"),
        py::arg("options") = PropagationOptions{});
    m.def("pulse_metrics", &pulseMetrics, py::arg("record"), py::arg("pulse"));

    py::enum_<ReadDirection>(m, "ReadDirection")
        .value("forward", ReadDirection::forward)
        .value("backward", ReadDirection::backward);

    py::class_<SolverGrid>(m, "SolverGrid")
        .def(py::init<>())
        .def_readwrite("nz", &SolverGrid::nz)
        .def_readwrite("dt", &SolverGrid::dt);

    py::class_<ProtocolConfig>(m, "ProtocolConfig")
        .def(py::init<>())
        .def_readwrite("atom", &ProtocolConfig::atom)
        .def_readwrite("control", &ProtocolConfig::control)
        .def_readwrite("medium", &ProtocolConfig::medium)
        .def_readwrite("pulse", &ProtocolConfig::pulse)
        .def_readwrite("write_off_time", &ProtocolConfig::write_off_time)
        .def_readwrite("settle_time", &ProtocolConfig::settle_time)
        .def_readwrite("storage_time", &ProtocolConfig::storage_time)
        .def_readwrite("read_duration", &ProtocolConfig::read_duration)
        .def_readwrite("read_direction", &ProtocolConfig::read_direction)
        .def_readwrite("spin_decay", &ProtocolConfig::spin_decay)
        .def_readwrite("grid", &ProtocolConfig::grid);

    py::class_<MemoryReport>(m, "MemoryReport")
        .def_readonly("leakage", &MemoryReport::leakage)
        .def_readonly("efficiency", &MemoryReport::efficiency)
        .def_readonly("direction", &MemoryReport::direction)
        .def_readonly("zeta_grid", &MemoryReport::zeta_grid)
        .def_readonly("spin_wave", &MemoryReport::spin_wave)
        .def_readonly("stored_fraction", &MemoryReport::stored_fraction)
        .def_readonly("dissipated", &MemoryReport::dissipated)
        .def_readonly("retrieved_waveform", &MemoryReport::retrieved_waveform)
        .def_readonly("write_waveform", &MemoryReport::write_waveform);

    m.def("run_protocol", &runProtocol, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def_static("from_json_text", &ExperimentConfig::fromJsonText, py::arg("text"))
        .def_static("from_file", &ExperimentConfig::fromFile, py::arg("path"))
        .def("to_json_text", &ExperimentConfig::toJsonText)
        .def_readwrite("output_dir", &ExperimentConfig::output_dir);

    py::class_<RunResult>(m, "RunResult").def_readonly("artifacts", &RunResult::artifacts);
    m.def("run_experiment", &runExperiment, py::arg("config"), py::arg("threads") = 1,
          py::call_guard<py::gil_scoped_release>());
    m.def("builtin_presets", [] { return builtinPresets(); });
    m.def("apply_override", &applyOverride, py::arg("json_text"), py::arg("assignment"));
}
