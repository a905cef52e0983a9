#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "emadapt/driver.hpp"

using namespace emadapt;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  const std::string path = "/tmp/emadapt_" + name;
  std::ofstream out(path, std::ios::binary);
  out << body;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig small_dipole_config() {
  RunConfig cfg;
  cfg.wave = {2.0, 0.5, 0.1};
  cfg.obstacle_radius = 0.1;
  cfg.shell_layers = 2;
  cfg.shell_subdiv = 1;
  cfg.incident = RunConfig::Incident::none;
  cfg.N = 5;
  cfg.theta = 0.5;
  cfg.eps_target = 1e-12;
  cfg.max_dofs = 50000;
  cfg.max_iters = 3;
  return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
  const std::string path = write_temp("cfg_ok.cfg",
                                      "# run parameters\n"
                                      "kappa = 2.0\n"
                                      "R = 0.5\n"
                                      "Rprime = 0.1\n"
                                      "obstacle_radius = 0.1\n"
                                      "shell_layers = 2\n"
                                      "shell_subdiv = 1\n"
                                      "incident = plane_wave\n"
                                      "polarization = 1 0 0\n"
                                      "direction = 0 0 -1\n"
                                      "N = auto\n"
                                      "n_auto_tol = 1e-8\n"
                                      "theta = 0.6   # bulk fraction\n"
                                      "eps_target = 1e-3\n"
                                      "max_dofs = 40000\n"
                                      "max_iters = 12\n"
                                      "output_dir = /tmp/emadapt_out\n");
  const RunConfig cfg = load_config(path);
  CHECK(cfg.wave.kappa == 2.0);
  CHECK(cfg.wave.R == 0.5);
  CHECK(cfg.wave.Rprime == 0.1);
  CHECK(cfg.incident == RunConfig::Incident::plane_wave);
  CHECK((cfg.polarization - Vec3(1, 0, 0)).norm() == 0.0);
  CHECK((cfg.direction - Vec3(0, 0, -1)).norm() == 0.0);
  CHECK(cfg.N == -1);
  CHECK(cfg.theta == 0.6);
  CHECK(cfg.eps_target == 1e-3);
  CHECK(cfg.max_dofs == 40000);
  CHECK(cfg.max_iters == 12);
  CHECK(cfg.output_dir == "/tmp/emadapt_out");
  validate(cfg);

  SUBCASE("unknown keys are rejected") {
    const std::string bad = write_temp("cfg_unknown.cfg", "kapa = 2.0\n");
    CHECK_THROWS_AS(load_config(bad), std::invalid_argument);
  }
  SUBCASE("malformed values are rejected") {
    CHECK_THROWS(load_config(write_temp("cfg_badnum.cfg", "kappa = two\n")));
    CHECK_THROWS(load_config(write_temp("cfg_badvec.cfg",
                                        "polarization = 1 0\n")));
    CHECK_THROWS(load_config(write_temp("cfg_noeq.cfg", "kappa 2.0\n")));
  }
  SUBCASE("environment variable overrides output_dir") {
    setenv("EMADAPT_OUTPUT_DIR", "/tmp/emadapt_env", 1);
    const RunConfig over = load_config(path);
    CHECK(over.output_dir == "/tmp/emadapt_env");
    unsetenv("EMADAPT_OUTPUT_DIR");
    const RunConfig plain = load_config(path);
    CHECK(plain.output_dir == "/tmp/emadapt_out");
  }
}

TEST_CASE("config validation") {
  RunConfig cfg = small_dipole_config();
  validate(cfg);

  RunConfig bad = cfg;
  bad.theta = 1.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.theta = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.eps_target = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.max_dofs = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.N = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.obstacle_radius = 0.7;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.incident = RunConfig::Incident::plane_wave;
  bad.polarization = Vec3(0, 0, 1);
  bad.direction = Vec3(0, 0, -1);
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("fit_slope on synthetic records") {
  ConvergenceRecord rec;
  for (int i = 0; i < 6; ++i) {
    ConvergenceRecord::Row r;
    r.iter = i;
    r.n_dofs = static_cast<std::size_t>(100 * std::pow(2.0, i));
    r.eps_h = std::pow(static_cast<double>(r.n_dofs), -1.0 / 3.0);
    r.true_error = 0.37;
    rec.rows.push_back(r);
  }
  CHECK(std::abs(fit_slope(rec, RecordColumn::eps_h, 4) + 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(fit_slope(rec, RecordColumn::eps_h, 6) + 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(fit_slope(rec, RecordColumn::true_error, 4)) < 1e-12);

  CHECK_THROWS_AS(fit_slope(rec, RecordColumn::eps_h, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_slope(rec, RecordColumn::eps_h, 7),
                  std::invalid_argument);

  ConvergenceRecord nanrec = rec;
  nanrec.rows.back().true_error = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(fit_slope(nanrec, RecordColumn::true_error, 2),
                  std::invalid_argument);
}

TEST_CASE("csv export") {
  ConvergenceRecord rec;
  ConvergenceRecord::Row r;
  r.iter = 0;
  r.n_tets = 480;
  r.n_dofs = 990;
  r.eps_h = 0.1234567890123456789;
  r.eps_N = 1e-9;
  r.true_error = std::numeric_limits<double>::quiet_NaN();
  r.wall_time_s = 0.25;
  rec.rows.push_back(r);
  r.iter = 1;
  r.true_error = 0.5;
  rec.rows.push_back(r);

  const std::string p1 = "/tmp/emadapt_rec1.csv";
  const std::string p2 = "/tmp/emadapt_rec2.csv";
  export_csv(rec, p1);
  export_csv(rec, p2);
  const std::string body = slurp(p1);
  CHECK(body == slurp(p2));  // byte-identical on repeated export

  std::istringstream is(body);
  std::string line;
  std::getline(is, line);
  CHECK(line == "iter,n_tets,n_dofs,eps_h,eps_N,true_error,wall_time_s");
  std::getline(is, line);
  // missing true_error stays blank
  CHECK(line.find(",,") != std::string::npos);
  CHECK(line.substr(0, 10) == "0,480,990,");
  std::getline(is, line);
  CHECK(line.find(",0.5,") != std::string::npos);
  // 17 significant digits survive a round trip
  CHECK(body.find("0.12345678901234568") != std::string::npos);
}

TEST_CASE("vtk export of a zero field") {
  const Mesh m = generate_shell_mesh(0.1, 0.5, 1, 0);
  const DofMap dofs = build_dof_map(m);
  FieldSolution sol;
  sol.mesh = &m;
  sol.dofs = &dofs;
  sol.coeffs = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dofs.n_edges()));

  const std::string path = "/tmp/emadapt_zero.vtk";
  export_vtk(sol, m, path);
  const std::string body = slurp(path);

  std::istringstream is(body);
  std::string line;
  std::getline(is, line);
  CHECK(line == "# vtk DataFile Version 2.0");
  std::getline(is, line);  // title
  std::getline(is, line);
  CHECK(line == "ASCII");
  std::getline(is, line);
  CHECK(line == "DATASET UNSTRUCTURED_GRID");
  std::getline(is, line);
  CHECK(line == "POINTS " + std::to_string(m.n_vertices()) + " double");

  CHECK(body.find("CELLS " + std::to_string(m.n_tets()) + " " +
                  std::to_string(5 * m.n_tets())) != std::string::npos);
  CHECK(body.find("CELL_TYPES") != std::string::npos);
  CHECK(body.find("CELL_DATA " + std::to_string(m.n_tets())) !=
        std::string::npos);
  CHECK(body.find("VECTORS E_real double") != std::string::npos);
  CHECK(body.find("VECTORS E_imag double") != std::string::npos);

  // both per-cell vector blocks are exactly zero
  const auto vec_start = body.find("VECTORS E_real double");
  std::istringstream vs(body.substr(vec_start));
  std::getline(vs, line);
  std::size_t zero_lines = 0;
  while (std::getline(vs, line)) {
    if (line.rfind("VECTORS", 0) == 0) continue;
    CHECK(line == "0 0 0");
    ++zero_lines;
  }
  CHECK(zero_lines == 2 * m.n_tets());
}

TEST_CASE("adaptive loop stop reasons") {
  SUBCASE("immediate convergence on a loose target") {
    RunConfig cfg = small_dipole_config();
    cfg.eps_target = 1e9;
    const AdaptiveResult res = adaptive_solve(cfg);
    CHECK(res.record.rows.size() == 1);
    CHECK(res.record.stop_reason == "eps_target");
    CHECK(res.record.rows[0].iter == 0);
  }
  SUBCASE("max_iters bounds the number of refinements") {
    RunConfig cfg = small_dipole_config();
    cfg.max_iters = 2;
    const AdaptiveResult res = adaptive_solve(cfg);
    CHECK(res.record.rows.size() <= 3);
    CHECK(res.record.stop_reason == "max_iters");
  }
  SUBCASE("max_dofs stops the run") {
    RunConfig cfg = small_dipole_config();
    cfg.max_dofs = 10;
    const AdaptiveResult res = adaptive_solve(cfg);
    CHECK(res.record.rows.size() == 1);
    CHECK(res.record.stop_reason == "max_dofs");
  }
}

TEST_CASE("manufactured-solution adaptive run") {
  RunConfig cfg = small_dipole_config();
  cfg.max_iters = 3;
  const AdaptiveResult res = adaptive_solve(cfg);
  REQUIRE(res.record.rows.size() == 4);
  CHECK(res.N == 5);

  const double eps_N_expect =
      truncation_indicator(cfg.wave, res.N, res.f_norm);
  for (std::size_t i = 0; i < res.record.rows.size(); ++i) {
    const auto& row = res.record.rows[i];
    CHECK(static_cast<int>(i) == row.iter);
    CHECK(std::isfinite(row.eps_h));
    CHECK(row.eps_h > 0.0);
    CHECK(row.eps_N == eps_N_expect);
    CHECK(std::isfinite(row.true_error));
    if (i > 0) {
      CHECK(row.n_dofs > res.record.rows[i - 1].n_dofs);
      CHECK(row.true_error < res.record.rows[i - 1].true_error);
      CHECK(row.wall_time_s >= res.record.rows[i - 1].wall_time_s);
    }
  }

  // the returned solution is bound to the returned mesh
  CHECK(res.solution.mesh == res.mesh.get());
  CHECK(res.solution.dofs == res.dofs.get());
  CHECK(res.mesh->n_tets() == res.record.rows.back().n_tets);
  CHECK(res.solution.residual <= 1e-8);

  // a second identical run reproduces every column except wall time
  const AdaptiveResult res2 = adaptive_solve(cfg);
  REQUIRE(res2.record.rows.size() == res.record.rows.size());
  for (std::size_t i = 0; i < res.record.rows.size(); ++i) {
    CHECK(res2.record.rows[i].n_tets == res.record.rows[i].n_tets);
    CHECK(res2.record.rows[i].n_dofs == res.record.rows[i].n_dofs);
    CHECK(res2.record.rows[i].eps_h == res.record.rows[i].eps_h);
    CHECK(res2.record.rows[i].true_error == res.record.rows[i].true_error);
  }
}

TEST_CASE("auto truncation degree matches choose_N") {
  RunConfig cfg = small_dipole_config();
  cfg.N = -1;
  cfg.n_auto_tol = 1e-8;
  cfg.max_iters = 0;
  const AdaptiveResult res = adaptive_solve(cfg);
  CHECK(res.N == choose_N(cfg.wave, res.f_norm, cfg.n_auto_tol));
  CHECK(res.N >= 1);
}
