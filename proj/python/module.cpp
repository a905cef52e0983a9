// Python bindings for the adaptive Maxwell solver: wave parameters,
// truncation-degree selection, meshes, run configuration, the adaptive
// loop, and result export.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "emadapt/driver.hpp"

namespace py = pybind11;
using namespace emadapt;

namespace {

RecordColumn column_from_name(const std::string& name) {
  if (name == "eps_h") return RecordColumn::eps_h;
  if (name == "true_error") return RecordColumn::true_error;
  throw std::invalid_argument("column must be 'eps_h' or 'true_error'");
}

Eigen::MatrixXd mesh_vertices(const Mesh& m) {
  Eigen::MatrixXd out(m.n_vertices(), 3);
  for (std::size_t i = 0; i < m.n_vertices(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = m.vertices[i].transpose();
  return out;
}

Eigen::MatrixXi mesh_tets(const Mesh& m) {
  Eigen::MatrixXi out(m.n_tets(), 4);
  for (std::size_t t = 0; t < m.n_tets(); ++t)
    for (int j = 0; j < 4; ++j)
      out(static_cast<Eigen::Index>(t), j) = m.tets[t][j];
  return out;
}

Eigen::MatrixXcd barycenter_field(const AdaptiveResult& res) {
  const Mesh& m = *res.mesh;
  Eigen::MatrixXcd out(m.n_tets(), 3);
  for (std::size_t t = 0; t < m.n_tets(); ++t) {
    const auto& tet = m.tets[t];
    const Vec3 c = 0.25 * (m.vertices[tet[0]] + m.vertices[tet[1]] +
                           m.vertices[tet[2]] + m.vertices[tet[3]]);
    out.row(static_cast<Eigen::Index>(t)) = res.solution.eval(t, c).transpose();
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_emadapt, m) {
  m.doc() =
      "Adaptive edge-element solver for exterior time-harmonic Maxwell "
      "scattering with a spectral transparent boundary condition";

  py::class_<WaveParams>(m, "WaveParams")
      .def(py::init<>())
      .def(py::init([](double kappa, double R, double Rprime) {
             return WaveParams{kappa, R, Rprime};
           }),
           py::arg("kappa"), py::arg("R"), py::arg("Rprime"))
      .def_readwrite("kappa", &WaveParams::kappa)
      .def_readwrite("R", &WaveParams::R)
      .def_readwrite("Rprime", &WaveParams::Rprime)
      .def("__repr__", [](const WaveParams& w) {
        return "WaveParams(kappa=" + std::to_string(w.kappa) +
               ", R=" + std::to_string(w.R) +
               ", Rprime=" + std::to_string(w.Rprime) + ")";
      });

  m.def("choose_N", &choose_N, py::arg("wave"), py::arg("f_norm"),
        py::arg("tol") = 1e-8,
        "Smallest truncation degree with indicator below tol");
  m.def("truncation_indicator", &truncation_indicator, py::arg("wave"),
        py::arg("N"), py::arg("f_norm"),
        "(Rprime/R)^(N+1) * f_norm");
  m.def(
      "sph_hankel",
      [](int kind, int n, double x) {
        return sph_hankel(kind == 2 ? HankelKind::second : HankelKind::first,
                          n, x);
      },
      py::arg("kind"), py::arg("n"), py::arg("x"),
      "Spherical Hankel function of the given kind (1 or 2)");
  m.def("sph_bessel_j", &sph_bessel_j, py::arg("n"), py::arg("x"));

  py::class_<Mesh, std::shared_ptr<Mesh>>(m, "Mesh")
      .def_property_readonly("n_vertices", &Mesh::n_vertices)
      .def_property_readonly("n_tets", &Mesh::n_tets)
      .def_property_readonly("vertices", &mesh_vertices)
      .def_property_readonly("tets", &mesh_tets)
      .def("save", &save_mesh, py::arg("path"))
      .def("validate",
           [](const Mesh& mesh) {
             const ValidationReport rep = validate(mesh);
             return py::make_tuple(rep.ok, rep.message);
           })
      .def("shape_regularity", &shape_regularity)
      .def("total_volume", &total_volume)
      .def("__repr__", [](const Mesh& mesh) {
        return "Mesh(" + std::to_string(mesh.n_vertices()) + " vertices, " +
               std::to_string(mesh.n_tets()) + " tets)";
      });

  m.def("generate_shell_mesh", &generate_shell_mesh, py::arg("inner_radius"),
        py::arg("outer_radius"), py::arg("layers"), py::arg("subdiv"));
  m.def("generate_ushape_mesh", &generate_ushape_mesh,
        py::arg("outer_radius") = 0.5);
  m.def("load_mesh", &load_mesh, py::arg("path"));

  py::class_<RunConfig> cfg(m, "RunConfig");
  py::enum_<RunConfig::Incident>(cfg, "Incident")
      .value("none", RunConfig::Incident::none)
      .value("plane_wave", RunConfig::Incident::plane_wave);
  cfg.def(py::init<>())
      .def_readwrite("wave", &RunConfig::wave)
      .def_readwrite("mesh_file", &RunConfig::mesh_file)
      .def_readwrite("obstacle_radius", &RunConfig::obstacle_radius)
      .def_readwrite("shell_layers", &RunConfig::shell_layers)
      .def_readwrite("shell_subdiv", &RunConfig::shell_subdiv)
      .def_readwrite("incident", &RunConfig::incident)
      .def_readwrite("polarization", &RunConfig::polarization)
      .def_readwrite("direction", &RunConfig::direction)
      .def_readwrite("N", &RunConfig::N)
      .def_readwrite("n_auto_tol", &RunConfig::n_auto_tol)
      .def_readwrite("theta", &RunConfig::theta)
      .def_readwrite("eps_target", &RunConfig::eps_target)
      .def_readwrite("max_dofs", &RunConfig::max_dofs)
      .def_readwrite("max_iters", &RunConfig::max_iters)
      .def_readwrite("boundary_quad_order", &RunConfig::boundary_quad_order)
      .def_readwrite("output_dir", &RunConfig::output_dir);

  m.def("load_config", &load_config, py::arg("path"));
  m.def("validate_config",
        static_cast<void (*)(const RunConfig&)>(&validate), py::arg("config"));

  py::class_<ConvergenceRecord::Row>(m, "RecordRow")
      .def_readonly("iter", &ConvergenceRecord::Row::iter)
      .def_readonly("n_tets", &ConvergenceRecord::Row::n_tets)
      .def_readonly("n_dofs", &ConvergenceRecord::Row::n_dofs)
      .def_readonly("eps_h", &ConvergenceRecord::Row::eps_h)
      .def_readonly("eps_N", &ConvergenceRecord::Row::eps_N)
      .def_readonly("true_error", &ConvergenceRecord::Row::true_error)
      .def_readonly("wall_time_s", &ConvergenceRecord::Row::wall_time_s);

  py::class_<ConvergenceRecord>(m, "ConvergenceRecord")
      .def_readonly("rows", &ConvergenceRecord::rows)
      .def_readonly("stop_reason", &ConvergenceRecord::stop_reason)
      .def("__len__",
           [](const ConvergenceRecord& r) { return r.rows.size(); });

  py::class_<AdaptiveResult>(m, "AdaptiveResult")
      .def_readonly("mesh", &AdaptiveResult::mesh)
      .def_readonly("record", &AdaptiveResult::record)
      .def_readonly("N", &AdaptiveResult::N)
      .def_readonly("f_norm", &AdaptiveResult::f_norm)
      .def_property_readonly("coefficients",
                             [](const AdaptiveResult& r) {
                               return r.solution.coeffs;
                             })
      .def_property_readonly("barycenter_field", &barycenter_field,
                             "Complex field at tet barycenters, one row per "
                             "tet")
      .def("export_csv",
           [](const AdaptiveResult& r, const std::string& path) {
             export_csv(r.record, path);
           },
           py::arg("path"))
      .def("export_vtk",
           [](const AdaptiveResult& r, const std::string& path) {
             export_vtk(r.solution, *r.mesh, path);
           },
           py::arg("path"));

  m.def("adaptive_solve", &adaptive_solve, py::arg("config"),
        py::call_guard<py::gil_scoped_release>(),
        "Run the adaptive solve-estimate-mark-refine loop");
  m.def(
      "fit_slope",
      [](const ConvergenceRecord& rec, const std::string& column, int tail) {
        return fit_slope(rec, column_from_name(column), tail);
      },
      py::arg("record"), py::arg("column"), py::arg("tail"),
      "Log-log slope of the column against n_dofs over the last tail rows");
}
