#pragma once

#include <memory>
#include <string>

#include "emadapt/estimator.hpp"
#include "emadapt/oracle.hpp"

// The adaptive solve-estimate-mark-refine loop, run configuration parsing,
// and CSV/VTK export.

namespace emadapt {

struct RunConfig {
  WaveParams wave;

  // geometry: either a mesh file or a generated spherical shell
  std::string mesh_file;
  double obstacle_radius = 0.1;
  int shell_layers = 2;
  int shell_subdiv = 1;

  enum class Incident { none, plane_wave };
  // `none` runs the manufactured-solution mode: the exact dipole field at
  // the origin supplies the obstacle Dirichlet data and the true error.
  Incident incident = Incident::none;
  Vec3 polarization = Vec3(1, 0, 0);
  Vec3 direction = Vec3(0, 0, -1);

  int N = -1;  // truncation degree; -1 selects choose_N with n_auto_tol
  double n_auto_tol = 1e-8;
  double theta = 0.5;
  double eps_target = 1e-3;
  long max_dofs = 50000;
  int max_iters = 20;
  int boundary_quad_order = 0;  // 0 = fem default max(4, 2N+2)
  std::string output_dir = ".";
};

/// Flat key=value file; '#' starts a comment; unknown keys are errors.
/// The EMADAPT_OUTPUT_DIR environment variable overrides output_dir.
RunConfig load_config(const std::string& path);

/// Throws std::invalid_argument on out-of-range parameters.
void validate(const RunConfig& cfg);

struct ConvergenceRecord {
  struct Row {
    int iter = 0;
    std::size_t n_tets = 0, n_dofs = 0;
    double eps_h = 0.0, eps_N = 0.0;
    double true_error = std::numeric_limits<double>::quiet_NaN();
    double wall_time_s = 0.0;
  };
  std::vector<Row> rows;
  std::string stop_reason;
};

struct AdaptiveResult {
  std::shared_ptr<Mesh> mesh;
  std::shared_ptr<DofMap> dofs;
  FieldSolution solution;  // bound to mesh/dofs above
  ConvergenceRecord record;
  int N = 0;
  double f_norm = 0.0;  // div-half norm of the boundary data (or its proxy)
};

/// Adaptive loop: solve on the initial mesh, then repeat
/// {estimate, record, check targets, mark, refine, solve} until eps_h <=
/// eps_target, max_dofs, max_iters, or a zero estimate.
AdaptiveResult adaptive_solve(const RunConfig& cfg);

enum class RecordColumn { eps_h, true_error };

/// Least-squares slope of log(column) vs log(n_dofs) over the last `tail`
/// rows; throws if fewer than max(tail, 2) rows are available.
double fit_slope(const ConvergenceRecord& record, RecordColumn column,
                 int tail);

/// CSV with header iter,n_tets,n_dofs,eps_h,eps_N,true_error,wall_time_s;
/// numbers at 17 significant digits, true_error blank when not available.
void export_csv(const ConvergenceRecord& record, const std::string& path);

/// VTK legacy ASCII unstructured grid with the per-cell field at tet
/// barycenters, written as two 3-vector arrays (real and imaginary parts).
void export_vtk(const FieldSolution& sol, const Mesh& mesh,
                const std::string& path);

}  // namespace emadapt
