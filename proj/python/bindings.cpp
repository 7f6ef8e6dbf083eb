#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nhanyon/dynamics.hpp"
#include "nhanyon/harness.hpp"
#include "nhanyon/otoc.hpp"
#include "nhanyon/spectra.hpp"
#include "nhanyon/symmetry.hpp"
#include "nhanyon/topology.hpp"

namespace py = pybind11;
using namespace nhanyon;

namespace {

ModelParams make_params(int sites, int particles, double alpha, double theta,
                        double onsite_u, const std::string& bc, double twist,
                        int cap, std::optional<double> hop_left,
                        std::optional<double> hop_right) {
  ModelParams p;
  if (hop_left || hop_right) {
    p.hop_left = hop_left.value_or(1.0);
    p.hop_right = hop_right.value_or(1.0);
  } else {
    p.hop_left = std::exp(-alpha);
    p.hop_right = std::exp(alpha);
  }
  p.sites = sites;
  p.particles = particles;
  p.theta = theta;
  p.onsite_u = onsite_u;
  p.boundary = bc == "pbc" ? Boundary::periodic : Boundary::open;
  p.twist = twist;
  p.cap = cap;
  p.validate();
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact diagonalization of non-Hermitian anyon-Hubbard chains";
  m.attr("__version__") = kVersion;

  py::class_<FockBasis>(m, "FockBasis")
      .def(py::init<int, int, int>(), py::arg("sites"), py::arg("particles"),
           py::arg("cap"))
      .def_property_readonly("sites", &FockBasis::sites)
      .def_property_readonly("particles", &FockBasis::particles)
      .def_property_readonly("cap", &FockBasis::cap)
      .def_property_readonly("dim", &FockBasis::dim)
      .def("state",
           [](const FockBasis& b, std::size_t i) {
             const auto s = b.state(i);
             return std::vector<int>(s.begin(), s.end());
           })
      .def("rank", [](const FockBasis& b, const std::vector<int>& occ) {
        return b.rank(occ);
      });

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init(&make_params), py::arg("sites"), py::arg("particles"),
           py::arg("alpha") = 0.0, py::arg("theta") = 0.0,
           py::arg("U") = 0.0, py::arg("bc") = "obc", py::arg("phi") = 0.0,
           py::arg("cap") = 0, py::arg("J_L") = std::nullopt,
           py::arg("J_R") = std::nullopt)
      .def_readonly("sites", &ModelParams::sites)
      .def_readonly("particles", &ModelParams::particles)
      .def_readonly("theta", &ModelParams::theta)
      .def_readonly("U", &ModelParams::onsite_u)
      .def_readonly("J_L", &ModelParams::hop_left)
      .def_readonly("J_R", &ModelParams::hop_right)
      .def_property_readonly("alpha", &ModelParams::alpha)
      .def("basis", &ModelParams::basis);

  m.def("sector_dimension", &sector_dimension, py::arg("sites"),
        py::arg("particles"), py::arg("cap"));

  m.def(
      "hamiltonian",
      [](const ModelParams& p) { return build_hamiltonian(p).dense(); },
      py::arg("params"), "Dense Hamiltonian matrix in the occupation basis");

  m.def(
      "annihilation",
      [](const FockBasis& from, const FockBasis& to, int site) {
        return annihilation_matrix(from, to, site).dense();
      },
      py::arg("from_basis"), py::arg("to_basis"), py::arg("site"));
  m.def(
      "anyon_annihilation",
      [](const FockBasis& from, const FockBasis& to, int site, double theta) {
        return anyon_annihilation(from, to, site, theta).dense();
      },
      py::arg("from_basis"), py::arg("to_basis"), py::arg("site"),
      py::arg("theta"));

  py::class_<Spectrum>(m, "Spectrum")
      .def_readonly("values", &Spectrum::values)
      .def_readonly("right", &Spectrum::right)
      .def_readonly("left", &Spectrum::left)
      .def_readonly("residual", &Spectrum::residual)
      .def_readonly("near_defective", &Spectrum::near_defective);

  m.def(
      "eigendecompose",
      [](const ModelParams& p, bool want_left) {
        return eigendecompose(build_hamiltonian(p), want_left);
      },
      py::arg("params"), py::arg("want_left") = false);
  m.def(
      "eigendecompose_matrix",
      [](const Mat& h, bool want_left) { return eigendecompose(h, want_left); },
      py::arg("matrix"), py::arg("want_left") = false);

  py::class_<DensityProfile>(m, "DensityProfile")
      .def_readonly("per_state", &DensityProfile::per_state)
      .def_readonly("average", &DensityProfile::average);
  m.def("density_profiles", &density_profiles, py::arg("spectrum"),
        py::arg("basis"));

  py::class_<BoundCluster>(m, "BoundCluster")
      .def_readonly("indices", &BoundCluster::indices)
      .def_readonly("separated", &BoundCluster::separated)
      .def_readonly("gap_ratio", &BoundCluster::gap_ratio);
  m.def("bound_state_loop", &bound_state_loop, py::arg("spectrum"),
        py::arg("U"), py::arg("min_gap_ratio") = 3.0);

  m.def("effective_bound_hamiltonian", &effective_bound_hamiltonian,
        py::arg("params"));
  m.def("effective_dispersion", &effective_dispersion, py::arg("k"),
        py::arg("params"));

  m.def(
      "uniform_center_state",
      [](const FockBasis& b, std::optional<int> offset) {
        return uniform_center_state(b, offset);
      },
      py::arg("basis"), py::arg("offset") = std::nullopt);
  m.def(
      "fock_state",
      [](const FockBasis& b, const std::vector<int>& occ) {
        return fock_state(b, occ);
      },
      py::arg("basis"), py::arg("occ"));

  py::class_<TimeSeries>(m, "TimeSeries")
      .def_readonly("times", &TimeSeries::times)
      .def_readonly("density", &TimeSeries::density);
  m.def(
      "density_series",
      [](const ModelParams& p, const Vec& psi0, double t_max, double dt,
         const std::string& method) {
        const FockBasis basis = p.basis();
        return density_series(p, basis, psi0, t_max, dt,
                              method == "krylov" ? PropagationMethod::krylov
                                                 : PropagationMethod::dense);
      },
      py::arg("params"), py::arg("psi0"), py::arg("t_max"), py::arg("dt"),
      py::arg("method") = "dense");
  m.def(
      "propagate",
      [](const ModelParams& p, const Vec& psi0, double t,
         const std::string& method) {
        const EvolvedState s =
            propagate(build_hamiltonian(p), psi0, t,
                      method == "krylov" ? PropagationMethod::krylov
                                         : PropagationMethod::dense);
        return py::make_tuple(s.amplitudes, s.log_norm);
      },
      py::arg("params"), py::arg("psi0"), py::arg("t"),
      py::arg("method") = "dense");

  m.def(
      "imbalance",
      [](const TimeSeries& series, bool exclude_center) {
        return imbalance(series, exclude_center);
      },
      py::arg("series"), py::arg("exclude_center") = false);
  m.def(
      "reversed_interval",
      [](const std::vector<double>& dn, double dt, double slope_eps,
         int smooth_window) {
        const auto r = reversed_interval(dn, dt, slope_eps, smooth_window);
        return py::make_tuple(r.total, r.longest);
      },
      py::arg("imbalance"), py::arg("dt"), py::arg("slope_eps") = 1e-4,
      py::arg("smooth_window") = 0);
  m.def("density_correlation", &density_correlation, py::arg("psi"),
        py::arg("basis"));
  m.def(
      "transition_asymmetry",
      [](const ModelParams& p, const Vec& psi0, const Vec& psi1, double t) {
        const FockBasis basis = p.basis();
        const auto r = transition_asymmetry(
            psi0, psi1, build_hamiltonian(p, basis), basis, t);
        return py::make_tuple(r.direct, r.mirrored);
      },
      py::arg("params"), py::arg("psi0"), py::arg("psi1"), py::arg("t"));

  py::class_<OtocGrid>(m, "OtocGrid")
      .def_readonly("times", &OtocGrid::times)
      .def_readonly("source", &OtocGrid::source)
      .def_readonly("f", &OtocGrid::f)
      .def_readonly("commutator", &OtocGrid::commutator)
      .def_readonly("norm_divisor", &OtocGrid::norm_divisor)
      .def_readonly("conditioning_warning", &OtocGrid::conditioning_warning);
  m.def(
      "thermal_otoc",
      [](const ModelParams& p, double beta, int source,
         const std::vector<double>& times) {
        return thermal_otoc(p, beta, source, times);
      },
      py::arg("params"), py::arg("beta"), py::arg("source"), py::arg("times"));
  m.def(
      "state_otoc",
      [](const ModelParams& p, const Vec& psi0, int source,
         const std::vector<double>& times) {
        return state_otoc(p, psi0, source, times);
      },
      py::arg("params"), py::arg("psi0"), py::arg("source"), py::arg("times"));
  m.def(
      "normalize_grid",
      [](const OtocGrid& g, const std::string& scheme) {
        return normalize_grid(g, scheme == "per_site"
                                     ? OtocNormalization::per_site_max
                                     : OtocNormalization::global_max);
      },
      py::arg("grid"), py::arg("scheme") = "global");

  py::class_<WindingScan>(m, "WindingScan")
      .def_readonly("winding", &WindingScan::winding)
      .def_readonly("residual", &WindingScan::residual)
      .def_readonly("conclusive", &WindingScan::conclusive)
      .def_readonly("phis", &WindingScan::phis)
      .def_readonly("phases", &WindingScan::phases);
  m.def(
      "winding_number",
      [](const ModelParams& p, cd reference, int n_phi) {
        const FockBasis basis = p.basis();
        return winding_number(p, basis, reference, n_phi);
      },
      py::arg("params"), py::arg("reference"), py::arg("n_phi") = 256);

  py::class_<SymmetryReport>(m, "SymmetryReport")
      .def_readonly("name", &SymmetryReport::name)
      .def_readonly("residual", &SymmetryReport::residual)
      .def_readonly("tolerance", &SymmetryReport::tolerance)
      .def_readonly("passed", &SymmetryReport::pass);
  m.def(
      "pseudo_hermiticity_residual",
      [](const ModelParams& p, double tol) {
        const FockBasis basis = p.basis();
        return pseudo_hermiticity_residual(p, basis, tol);
      },
      py::arg("params"), py::arg("tolerance") = 1e-12);
  m.def(
      "conjugate_pair_check",
      [](const ModelParams& p, double tol) {
        return conjugate_pair_check(eigendecompose(build_hamiltonian(p)), tol);
      },
      py::arg("params"), py::arg("tolerance") = 1e-8);
  m.def("dynamical_symmetry_residual", &dynamical_symmetry_residual,
        py::arg("params"), py::arg("psi0"), py::arg("t_max"), py::arg("dt"),
        py::arg("tolerance") = 1e-10);
  m.def("obc_reality_residual", &obc_reality_residual, py::arg("params"),
        py::arg("tolerance") = 1e-6);

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const auto cfg =
            ExperimentConfig::from_json(nlohmann::json::parse(config_json));
        const RunManifest manifest = run_experiment(cfg);
        return manifest.to_json().dump();
      },
      py::arg("config_json"),
      "Run a preset/config (JSON string); returns the manifest as JSON");
  m.def("known_presets", [] { return known_presets(); });
}
