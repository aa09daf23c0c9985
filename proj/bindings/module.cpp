#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sfp/csv.hpp"
#include "sfp/experiments.hpp"
#include "sfp/fp_diagnostics.hpp"
#include "sfp/network.hpp"
#include "sfp/relu_spectral.hpp"

namespace py = pybind11;
using namespace sfp;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Shallow ReLU networks on the sphere with spherical-harmonic "
              "training diagnostics";

    py::class_<Vec3>(m, "Vec3")
        .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"),
             py::arg("z"))
        .def_readwrite("x", &Vec3::x)
        .def_readwrite("y", &Vec3::y)
        .def_readwrite("z", &Vec3::z)
        .def("norm", &Vec3::norm)
        .def("__repr__", [](const Vec3& v) {
            return "Vec3(" + std::to_string(v.x) + ", " + std::to_string(v.y) +
                   ", " + std::to_string(v.z) + ")";
        });

    py::class_<SpherePoint>(m, "SpherePoint")
        .def(py::init<double, double>(), py::arg("tau"), py::arg("phi"))
        .def_readwrite("tau", &SpherePoint::tau)
        .def_readwrite("phi", &SpherePoint::phi);

    py::class_<Direction>(m, "Direction")
        .def(py::init([](double x, double y, double z) {
                 return Direction::of({x, y, z});
             }),
             py::arg("x"), py::arg("y"), py::arg("z"))
        .def_property_readonly("v", [](const Direction& d) { return d.v; });

    py::class_<Rotation3>(m, "Rotation3")
        .def("apply", &Rotation3::apply)
        .def("entry", [](const Rotation3& r, int i, int j) { return r.m[i][j]; });

    m.def("to_cartesian", &to_cartesian);
    m.def("from_cartesian", &from_cartesian);
    m.def("sample_uniform", &sample_uniform, py::arg("n"), py::arg("seed"));
    m.def("fibonacci_sphere", &fibonacci_sphere, py::arg("n"));
    m.def("rotation_to", &rotation_to);

    py::class_<HarmonicSpectrum>(m, "HarmonicSpectrum")
        .def(py::init<int>(), py::arg("ell_max"))
        .def_property_readonly("ell_max", &HarmonicSpectrum::ell_max)
        .def("at", [](const HarmonicSpectrum& s, int l, int j) { return s(l, j); })
        .def("set",
             [](HarmonicSpectrum& s, int l, int j, Complex v) { s.at(l, j) = v; })
        .def("coeffs", [](const HarmonicSpectrum& s) { return s.coeffs(); });

    py::class_<GridNode>(m, "GridNode")
        .def_readonly("p", &GridNode::p)
        .def_readonly("weight", &GridNode::weight);

    py::class_<SphereGrid>(m, "SphereGrid")
        .def_property_readonly("exactness_degree", &SphereGrid::exactness_degree)
        .def("nodes", [](const SphereGrid& g) { return g.nodes(); });

    m.def("assoc_legendre", &assoc_legendre);
    m.def("assoc_legendre_dtau", &assoc_legendre_dtau);
    m.def("sph_harm", &sph_harm);
    m.def("build_grid", &build_grid);
    m.def("build_product_grid", &build_product_grid);
    m.def("project",
          [](const std::function<Complex(const SpherePoint&)>& f,
             const SphereGrid& grid, int ell_max) { return project(f, grid, ell_max); });
    m.def("evaluate", &evaluate);

    m.def("relu_coefficient", &relu_coefficient);
    m.def("relu_coefficient_asymptotic", &relu_coefficient_asymptotic);
    m.def("relu_coefficient_quadrature",
          py::overload_cast<int>(&relu_coefficient_quadrature));
    m.def("wigner_d_j0", &wigner_d_j0);
    m.def("neuron_spectrum", [](const Direction& w, int ell_max) {
        return neuron_spectrum(w, ell_max).spectrum;
    });
    m.def("neuron_spectrum_grad", &neuron_spectrum_grad);

    py::enum_<WeightMode>(m, "WeightMode")
        .value("fixed_directions", WeightMode::fixed_directions)
        .value("trainable_directions", WeightMode::trainable_directions);
    py::enum_<InitScheme>(m, "InitScheme")
        .value("default_init", InitScheme::default_init)
        .value("high_frequency", InitScheme::high_frequency);
    py::enum_<SpectrumRecording>(m, "SpectrumRecording")
        .value("analytic", SpectrumRecording::analytic)
        .value("grid", SpectrumRecording::grid);
    py::enum_<SamplingScheme>(m, "SamplingScheme")
        .value("random_uniform", SamplingScheme::random_uniform)
        .value("fibonacci", SamplingScheme::fibonacci);

    py::class_<TargetFunction>(m, "TargetFunction")
        .def_static("zero", &TargetFunction::zero)
        .def_static("trig_paper", &TargetFunction::trig_paper)
        .def_static("parse", &parse_target)
        .def("name", &TargetFunction::name)
        .def("__call__", &TargetFunction::operator());

    py::class_<NetworkParams>(m, "NetworkParams")
        .def(py::init<>())
        .def_readwrite("a", &NetworkParams::a)
        .def_readwrite("w", &NetworkParams::w)
        .def_readwrite("mode", &NetworkParams::mode);

    py::class_<TrainingConfig>(m, "TrainingConfig")
        .def(py::init<>())
        .def_readwrite("m", &TrainingConfig::m)
        .def_readwrite("lr", &TrainingConfig::lr)
        .def_readwrite("epochs", &TrainingConfig::epochs)
        .def_readwrite("n_samples", &TrainingConfig::n_samples)
        .def_readwrite("seed", &TrainingConfig::seed)
        .def_readwrite("ell_max", &TrainingConfig::ell_max)
        .def_readwrite("mode", &TrainingConfig::mode)
        .def_readwrite("init", &TrainingConfig::init)
        .def_readwrite("record_every", &TrainingConfig::record_every)
        .def_readwrite("batch", &TrainingConfig::batch)
        .def_readwrite("renormalize", &TrainingConfig::renormalize)
        .def_readwrite("recording", &TrainingConfig::recording)
        .def_readwrite("sampling", &TrainingConfig::sampling);

    py::class_<TraceEntry>(m, "TraceEntry")
        .def_readonly("epoch", &TraceEntry::epoch)
        .def_readonly("loss", &TraceEntry::loss)
        .def_readonly("sum_a", &TraceEntry::sum_a)
        .def_readonly("harmonic_errors", &TraceEntry::harmonic_errors);

    py::class_<ErrorTrace>(m, "ErrorTrace")
        .def_readonly("ell_max", &ErrorTrace::ell_max)
        .def_readonly("c_of_target", &ErrorTrace::c_of_target)
        .def_readonly("entries", &ErrorTrace::entries)
        .def_readonly("diverged", &ErrorTrace::diverged);

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("params", &TrainResult::params)
        .def_readonly("trace", &TrainResult::trace);

    m.def("forward", &forward);
    m.def("loss", &loss);
    m.def("init_default", &init_default);
    m.def("renormalize_directions", &renormalize_directions);
    m.def(
        "train",
        [](const TrainingConfig& config, const TargetFunction& h) {
            return train(config, h);
        },
        py::arg("config"), py::arg("target"));
    m.def("analytic_network_spectrum", &analytic_network_spectrum);

    py::enum_<FpLabel>(m, "FpLabel")
        .value("adheres", FpLabel::adheres)
        .value("partial", FpLabel::partial)
        .value("violates", FpLabel::violates);

    py::class_<DecayFit>(m, "DecayFit")
        .def_readonly("exponent", &DecayFit::exponent)
        .def_readonly("r_squared", &DecayFit::r_squared)
        .def_readonly("n_points", &DecayFit::n_points);

    py::class_<FpVerdict>(m, "FpVerdict")
        .def_readonly("j", &FpVerdict::j)
        .def_readonly("label", &FpVerdict::label)
        .def_readonly("n_pairs", &FpVerdict::n_pairs)
        .def_readonly("n_inverted", &FpVerdict::n_inverted)
        .def_readonly("witnesses", &FpVerdict::witnesses);

    m.def("error_spectrum", &error_spectrum);
    m.def("c_of_h",
          py::overload_cast<const TargetFunction&, int, int>(&c_of_h),
          py::arg("target"), py::arg("n_tau") = 64, py::arg("n_phi") = 129);
    m.def("fixed_mode_d_ell", &fixed_mode_d_ell);
    m.def("decay_fit", &decay_fit);
    m.def("classify_fp", &classify_fp, py::arg("trace"), py::arg("j"),
          py::arg("threshold") = 0.2, py::arg("negligible_floor") = 1e-8,
          py::arg("ell_lo") = 1, py::arg("ell_hi") = 10);

    py::class_<ExperimentSpec>(m, "ExperimentSpec")
        .def_readonly("name", &ExperimentSpec::name)
        .def_readwrite("config", &ExperimentSpec::config);

    py::class_<RunArtifacts>(m, "RunArtifacts")
        .def_readonly("dir", &RunArtifacts::dir)
        .def_readonly("final_loss", &RunArtifacts::final_loss)
        .def_readonly("bounds_ok", &RunArtifacts::bounds_ok)
        .def_readonly("violations", &RunArtifacts::violations);

    m.def("registry", &registry);
    m.def("find_experiment", &find_experiment);
    m.def("run_experiment", &run_experiment, py::arg("spec"), py::arg("out_dir"),
          py::arg("paper_scale") = false);
    m.def("emit_plotdata", &emit_plotdata);
}
