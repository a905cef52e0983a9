#include "emadapt/driver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace emadapt {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size())
    throw std::invalid_argument("config: bad numeric value for " + key +
                                ": '" + v + "'");
  return out;
}

long parse_long(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long out = 0;
  try {
    out = std::stol(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size())
    throw std::invalid_argument("config: bad integer value for " + key +
                                ": '" + v + "'");
  return out;
}

Vec3 parse_vec3(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  Vec3 out;
  if (!(is >> out[0] >> out[1] >> out[2]))
    throw std::invalid_argument("config: " + key +
                                " needs three numbers, got '" + v + "'");
  std::string rest;
  if (is >> rest)
    throw std::invalid_argument("config: trailing data after " + key);
  return out;
}

Vec3c cross_cr(const Vec3c& a, const Vec3& b) {
  return Vec3c(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2),
               a(0) * b(1) - a(1) * b(0));
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  RunConfig cfg;
  cfg.wave.Rprime = 0.0;  // derived from the geometry unless given
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    if (key == "kappa") cfg.wave.kappa = parse_double(key, val);
    else if (key == "R") cfg.wave.R = parse_double(key, val);
    else if (key == "Rprime") cfg.wave.Rprime = parse_double(key, val);
    else if (key == "mesh_file") cfg.mesh_file = val;
    else if (key == "obstacle_radius")
      cfg.obstacle_radius = parse_double(key, val);
    else if (key == "shell_layers")
      cfg.shell_layers = static_cast<int>(parse_long(key, val));
    else if (key == "shell_subdiv")
      cfg.shell_subdiv = static_cast<int>(parse_long(key, val));
    else if (key == "incident") {
      if (val == "none") cfg.incident = RunConfig::Incident::none;
      else if (val == "plane_wave") cfg.incident = RunConfig::Incident::plane_wave;
      else
        throw std::invalid_argument("config: incident must be none or "
                                    "plane_wave, got '" + val + "'");
    } else if (key == "polarization") cfg.polarization = parse_vec3(key, val);
    else if (key == "direction") cfg.direction = parse_vec3(key, val);
    else if (key == "N") {
      if (val == "auto") cfg.N = -1;
      else cfg.N = static_cast<int>(parse_long(key, val));
    } else if (key == "n_auto_tol") cfg.n_auto_tol = parse_double(key, val);
    else if (key == "theta") cfg.theta = parse_double(key, val);
    else if (key == "eps_target") cfg.eps_target = parse_double(key, val);
    else if (key == "max_dofs") cfg.max_dofs = parse_long(key, val);
    else if (key == "max_iters")
      cfg.max_iters = static_cast<int>(parse_long(key, val));
    else if (key == "boundary_quad_order")
      cfg.boundary_quad_order = static_cast<int>(parse_long(key, val));
    else if (key == "output_dir") cfg.output_dir = val;
    else
      throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  if (const char* env = std::getenv("EMADAPT_OUTPUT_DIR"))
    if (*env) cfg.output_dir = env;
  return cfg;
}

void validate(const RunConfig& cfg) {
  if (!(cfg.wave.kappa > 0.0))
    throw std::invalid_argument("config: kappa must be positive");
  if (!(cfg.wave.R > 0.0))
    throw std::invalid_argument("config: R must be positive");
  if (!(cfg.theta > 0.0 && cfg.theta < 1.0))
    throw std::invalid_argument("config: theta must be in (0, 1)");
  if (!(cfg.eps_target > 0.0))
    throw std::invalid_argument("config: eps_target must be positive");
  if (cfg.max_dofs <= 0)
    throw std::invalid_argument("config: max_dofs must be positive");
  if (cfg.max_iters < 0)
    throw std::invalid_argument("config: max_iters must be nonnegative");
  if (cfg.N == 0 || cfg.N < -1)
    throw std::invalid_argument("config: N must be >= 1 or auto");
  if (!(cfg.n_auto_tol > 0.0))
    throw std::invalid_argument("config: n_auto_tol must be positive");
  if (cfg.mesh_file.empty()) {
    if (!(cfg.obstacle_radius > 0.0 && cfg.obstacle_radius < cfg.wave.R))
      throw std::invalid_argument(
          "config: obstacle_radius must be in (0, R) for a generated shell");
    if (cfg.shell_layers < 1 || cfg.shell_subdiv < 0)
      throw std::invalid_argument("config: bad shell_layers/shell_subdiv");
  }
  if (cfg.incident == RunConfig::Incident::plane_wave) {
    if (cfg.direction.norm() == 0.0 || cfg.polarization.norm() == 0.0)
      throw std::invalid_argument("config: zero polarization or direction");
    const Vec3 q = cfg.direction.normalized();
    if (std::abs(cfg.polarization.dot(q)) > 1e-10 * cfg.polarization.norm())
      throw std::invalid_argument(
          "config: polarization must be orthogonal to direction");
  }
}

AdaptiveResult adaptive_solve(const RunConfig& cfg) {
  validate(cfg);
  const auto run_start = std::chrono::steady_clock::now();

  WaveParams w = cfg.wave;
  GeometryDescriptor geom;
  geom.R = w.R;
  auto mesh = std::make_shared<Mesh>();
  if (!cfg.mesh_file.empty()) {
    *mesh = load_mesh(cfg.mesh_file);
    geom.obstacle = GeometryDescriptor::Obstacle::facets;
    if (w.Rprime <= 0.0) {
      double rp = 0.0;
      for (const auto& [f, tag] : mesh->boundary_faces)
        if (tag == BoundaryTag::obstacle)
          for (int v : f) rp = std::max(rp, mesh->vertices[v].norm());
      w.Rprime = rp;
    }
  } else {
    *mesh = generate_shell_mesh(cfg.obstacle_radius, w.R, cfg.shell_layers,
                                cfg.shell_subdiv);
    geom.obstacle = GeometryDescriptor::Obstacle::sphere;
    geom.obstacle_radius = cfg.obstacle_radius;
    if (w.Rprime <= 0.0) w.Rprime = cfg.obstacle_radius;
  }
  validate(w);

  FieldSampler exact, incident;
  std::function<Vec3c(const Vec3&)> dirichlet;
  const bool manufactured = cfg.incident == RunConfig::Incident::none;
  if (manufactured) {
    exact = point_source_field(w.kappa, Vec3::Zero());
    dirichlet = exact.value;
  } else {
    incident = plane_wave_field(w.kappa, cfg.polarization,
                                cfg.direction.normalized());
    dirichlet = [inc = incident.value](const Vec3& x) -> Vec3c {
      return -inc(x);
    };
  }

  // truncation degree and boundary source; the manufactured run has f = 0,
  // so its truncation proxy is the spectral trace (curl E) x e_rho of the
  // exact field on Gamma_R
  AdaptiveResult res;
  int N = cfg.N;
  TangentialSpectrum f;
  if (manufactured) {
    const int probe = (N > 0) ? N : 12;
    const TangentSampler trace = [&](double theta, double phi) -> Vec3c {
      Vec3 e_rho, e_theta, e_phi;
      sphere_frame(theta, phi, e_rho, e_theta, e_phi);
      return cross_cr(exact.curl(w.R * e_rho), e_rho);
    };
    const TangentialSpectrum proxy =
        analyze(trace, probe, w.R, sphere_quadrature(probe + 2));
    res.f_norm = th_norm(proxy, TraceNorm::div_half());
    if (N <= 0) N = choose_N(w, res.f_norm, cfg.n_auto_tol);
  } else {
    int probe = (N > 0) ? N : 12;
    TangentialSpectrum fs = boundary_source(incident, w, probe);
    if (N <= 0) {
      N = choose_N(w, th_norm(fs, TraceNorm::div_half()), cfg.n_auto_tol);
      if (N != probe) fs = boundary_source(incident, w, N);
    }
    f = std::move(fs);
    res.f_norm = th_norm(f, TraceNorm::div_half());
  }
  res.N = N;
  const DtnFactors F = dtn_factors(w, N);
  const double eps_N = truncation_indicator(w, N, res.f_norm);

  auto dofs = std::make_shared<DofMap>(build_dof_map(*mesh));
  auto free_dofs = [](const DofMap& d) {
    std::size_t n = 0;
    for (char c : d.dirichlet)
      if (!c) ++n;
    return n;
  };

  AssembledSystem sys =
      assemble(*mesh, *dofs, w, F, f, dirichlet, cfg.boundary_quad_order);
  FieldSolution sol = solve(sys, *mesh, *dofs);

  ConvergenceRecord rec;
  int iter = 0;
  while (true) {
    try {
      const EstimatorReport rep =
          compute_indicators(sol, w, F, f, 4, &sys.traces);

      ConvergenceRecord::Row row;
      row.iter = iter;
      row.n_tets = mesh->n_tets();
      row.n_dofs = free_dofs(*dofs);
      row.eps_h = rep.eps_h;
      row.eps_N = eps_N;
      if (manufactured)
        row.true_error = hcurl_error(*mesh, *dofs, sol.coeffs, exact);
      row.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        run_start)
              .count();
      rec.rows.push_back(row);

      if (rep.eps_h <= cfg.eps_target) {
        rec.stop_reason = "eps_target";
        break;
      }
      if (row.n_dofs >= static_cast<std::size_t>(cfg.max_dofs)) {
        rec.stop_reason = "max_dofs";
        break;
      }
      if (iter >= cfg.max_iters) {
        rec.stop_reason = "max_iters";
        break;
      }
      const MarkResult mk = mark_elements(rep, cfg.theta);
      if (mk.converged) {
        rec.stop_reason = "converged";
        break;
      }
      mesh = std::make_shared<Mesh>(refine_marked(*mesh, mk.marked, geom));
      dofs = std::make_shared<DofMap>(build_dof_map(*mesh));
      sys = assemble(*mesh, *dofs, w, F, f, dirichlet,
                     cfg.boundary_quad_order);
      sol = solve(sys, *mesh, *dofs);
      ++iter;
    } catch (const std::exception& e) {
      throw std::runtime_error("adaptive_solve: iteration " +
                               std::to_string(iter) + ": " + e.what());
    }
  }

  res.mesh = mesh;
  res.dofs = dofs;
  res.solution = std::move(sol);
  res.solution.mesh = res.mesh.get();
  res.solution.dofs = res.dofs.get();
  res.record = std::move(rec);
  return res;
}

double fit_slope(const ConvergenceRecord& record, RecordColumn column,
                 int tail) {
  if (tail < 2)
    throw std::invalid_argument("fit_slope: tail must be at least 2");
  if (record.rows.size() < static_cast<std::size_t>(tail))
    throw std::invalid_argument("fit_slope: record has fewer rows than tail");
  const std::size_t begin = record.rows.size() - static_cast<std::size_t>(tail);
  std::vector<double> xs, ys;
  for (std::size_t i = begin; i < record.rows.size(); ++i) {
    const auto& r = record.rows[i];
    const double v =
        column == RecordColumn::eps_h ? r.eps_h : r.true_error;
    if (!(v > 0.0) || r.n_dofs == 0)
      throw std::invalid_argument(
          "fit_slope: nonpositive or missing value in the tail window");
    xs.push_back(std::log(static_cast<double>(r.n_dofs)));
    ys.push_back(std::log(v));
  }
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xm += xs[i];
    ym += ys[i];
  }
  xm /= static_cast<double>(xs.size());
  ym /= static_cast<double>(ys.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - xm) * (xs[i] - xm);
    sxy += (xs[i] - xm) * (ys[i] - ym);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("fit_slope: constant n_dofs in the tail");
  return sxy / sxx;
}

void export_csv(const ConvergenceRecord& record, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("export_csv: cannot open " + path);
  out << "iter,n_tets,n_dofs,eps_h,eps_N,true_error,wall_time_s\n";
  for (const auto& r : record.rows) {
    out << r.iter << ',' << r.n_tets << ',' << r.n_dofs << ','
        << format_g17(r.eps_h) << ',' << format_g17(r.eps_N) << ',';
    if (!std::isnan(r.true_error)) out << format_g17(r.true_error);
    out << ',' << format_g17(r.wall_time_s) << '\n';
  }
  if (!out) throw std::runtime_error("export_csv: write failed for " + path);
}

void export_vtk(const FieldSolution& sol, const Mesh& mesh,
                const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("export_vtk: cannot open " + path);
  out << "# vtk DataFile Version 2.0\n";
  out << "emadapt solution field at cell barycenters\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const auto& v : mesh.vertices)
    out << format_g17(v.x()) << ' ' << format_g17(v.y()) << ' '
        << format_g17(v.z()) << '\n';
  out << "CELLS " << mesh.n_tets() << ' ' << 5 * mesh.n_tets() << '\n';
  for (const auto& t : mesh.tets)
    out << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  out << "CELL_TYPES " << mesh.n_tets() << '\n';
  for (std::size_t t = 0; t < mesh.n_tets(); ++t) out << "10\n";
  out << "CELL_DATA " << mesh.n_tets() << '\n';

  std::vector<Vec3c> field(mesh.n_tets(), Vec3c::Zero());
  if (sol.mesh && sol.dofs && sol.coeffs.size() > 0) {
    for (std::size_t t = 0; t < mesh.n_tets(); ++t) {
      const auto& tet = mesh.tets[t];
      const Vec3 bary = 0.25 * (mesh.vertices[tet[0]] + mesh.vertices[tet[1]] +
                                mesh.vertices[tet[2]] + mesh.vertices[tet[3]]);
      field[t] = sol.eval(t, bary);
    }
  }
  out << "VECTORS E_real double\n";
  for (const auto& e : field)
    out << format_g17(e.x().real()) << ' ' << format_g17(e.y().real()) << ' '
        << format_g17(e.z().real()) << '\n';
  out << "VECTORS E_imag double\n";
  for (const auto& e : field)
    out << format_g17(e.x().imag()) << ' ' << format_g17(e.y().imag()) << ' '
        << format_g17(e.z().imag()) << '\n';
  if (!out) throw std::runtime_error("export_vtk: write failed for " + path);
}

}  // namespace emadapt
