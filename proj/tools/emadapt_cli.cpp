#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "emadapt/driver.hpp"

// Command-line front end: `solve` runs the adaptive loop from a config file,
// `verify` runs a quick self-check suite against analytic references, and
// `sweep-n` solves one mesh for increasing truncation degrees.

namespace {

using namespace emadapt;

Vec3c cross_cr(const Vec3c& a, const Vec3& b) {
  return Vec3c(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2),
               a(0) * b(1) - a(1) * b(0));
}

cplx dot_cr(const Vec3c& a, const Vec3& b) {
  return a(0) * b(0) + a(1) * b(1) + a(2) * b(2);
}

double spectrum_norm(const TangentialSpectrum& S) {
  return th_norm(S, TraceNorm::Hs(0.0));
}

int check(const char* name, bool ok, double value, double bound) {
  std::printf("%-28s %s  (%.3e vs %.1e)\n", name, ok ? "PASS" : "FAIL", value,
              bound);
  return ok ? 0 : 1;
}

int run_verify() {
  int failures = 0;

  // transparent-boundary defect of exact radiating modes
  {
    const WaveParams w{2.0, 0.5, 0.1};
    const int N = 10;
    const DtnFactors F = dtn_factors(w, N);
    const SphereQuadrature quad = sphere_quadrature(N + 2);
    double worst = 0.0;
    for (int n = 1; n <= 8; ++n)
      for (const ModeBranch branch : {ModeBranch::TE, ModeBranch::TM}) {
        const FieldSampler E = radiating_mode_field(n, 1, w.kappa, branch);
        const TangentSampler trace = [&](double th, double ph) -> Vec3c {
          Vec3 e_rho, e_th, e_ph;
          sphere_frame(th, ph, e_rho, e_th, e_ph);
          const Vec3c Ev = E.value(w.R * e_rho);
          return Ev - dot_cr(Ev, e_rho) * e_rho.cast<cplx>();
        };
        const TangentSampler gtrace = [&](double th, double ph) -> Vec3c {
          Vec3 e_rho, e_th, e_ph;
          sphere_frame(th, ph, e_rho, e_th, e_ph);
          return cross_cr(E.curl(w.R * e_rho), e_rho);
        };
        const TangentialSpectrum SE = analyze(trace, N, w.R, quad);
        const TangentialSpectrum Sg = analyze(gtrace, N, w.R, quad);
        TangentialSpectrum TSE = apply_dtn(F, SE);
        TangentialSpectrum defect = Sg;
        const cplx ik(0.0, w.kappa);
        for (std::size_t i = 0; i < defect.phi1.size(); ++i) {
          defect.phi1[i] -= ik * TSE.phi1[i];
          defect.phi2[i] -= ik * TSE.phi2[i];
        }
        worst = std::max(worst, spectrum_norm(defect) / spectrum_norm(Sg));
      }
    failures += check("tbc-defect", worst <= 1e-8, worst, 1e-8);
  }

  // exponential decay of Hankel ratios and the auto degree selection
  {
    const double kappa = 2.0, R = 0.5, Rp = 0.1;
    double worst = 0.0;
    for (int n = 10; n <= 40; ++n) {
      const double ratio =
          std::abs(sph_hankel(HankelKind::first, n, kappa * R) /
                   sph_hankel(HankelKind::first, n, kappa * Rp));
      worst = std::max(worst, ratio / (2.0 * std::pow(Rp / R, n)));
    }
    failures += check("hankel-decay", worst <= 1.0, worst, 1.0);
    const int N = choose_N({1.0, 0.5, 0.1}, 1.0, 1e-8);
    failures += check("choose-N", N == 11, N, 11);
  }

  // orthonormality of the tangential harmonics
  {
    const int N = 6;
    const double R = 0.7;
    const SphereQuadrature quad = sphere_quadrature(N + 2);
    double worst = 0.0;
    const std::size_t nm = TangentialSpectrum::num_modes(N);
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(2 * nm, 2 * nm);
    for (const auto& node : quad.nodes) {
      const ModeBasis mb = eval_modes(N, node.theta, node.phi, R);
      const double wq = node.weight * R * R;
      for (std::size_t i = 0; i < nm; ++i)
        for (std::size_t j = 0; j < nm; ++j) {
          G(i, j) += wq * mb.U[i].dot(mb.U[j]);
          G(nm + i, nm + j) += wq * mb.V[i].dot(mb.V[j]);
          G(i, nm + j) += wq * mb.U[i].dot(mb.V[j]);
          G(nm + i, j) += wq * mb.V[i].dot(mb.U[j]);
        }
    }
    G -= Eigen::MatrixXcd::Identity(2 * nm, 2 * nm);
    worst = G.cwiseAbs().maxCoeff();
    failures += check("vsh-orthonormality", worst <= 1e-8, worst, 1e-8);
  }

  // dual-problem radial ODE closed form
  {
    const int n = 3;
    const double kappa = 2.0, R = 0.5, Rp = 0.1;
    const auto xi = [](double rho) { return cplx(rho * rho, 0.0); };
    const DualModeSolution sol = dual_ode_solve(n, kappa, R, Rp, xi, cplx(1.0));
    double worst = 0.0;
    const double h = 1e-4;
    for (double rho = Rp + 0.05; rho < R - 0.02; rho += 0.05) {
      const cplx d2 =
          (sol.v(rho + h) - 2.0 * sol.v(rho) + sol.v(rho - h)) / (h * h);
      const cplx d1 = (sol.v(rho + h) - sol.v(rho - h)) / (2.0 * h);
      const cplx res = d2 + 2.0 / rho * d1 +
                       (kappa * kappa - n * (n + 1.0) / (rho * rho)) *
                           sol.v(rho) +
                       xi(rho);
      worst = std::max(worst, std::abs(res));
    }
    const cplx dR = (sol.v(R) - sol.v(R - h)) / h;
    const cplx robin =
        dR - z_ratio(HankelKind::second, n, kappa * R) * sol.v(R) / R;
    worst = std::max(worst, std::abs(robin) / std::abs(sol.v(R)));
    failures += check("dual-ode", worst <= 1e-3, worst, 1e-3);
  }

  // gradient fields lie in the kernel of the curl-curl matrix
  {
    const Mesh m = generate_shell_mesh(0.1, 0.5, 1, 0);
    const DofMap dofs = build_dof_map(m);
    Eigen::Matrix<double, 6, 6> K, M;
    double worst = 0.0;
    for (std::size_t t = 0; t < std::min<std::size_t>(m.n_tets(), 8); ++t) {
      const auto& tet = m.tets[t];
      element_matrices({m.vertices[tet[0]], m.vertices[tet[1]],
                        m.vertices[tet[2]], m.vertices[tet[3]]},
                       K, M);
      // DOFs of grad(lambda_0) are +-1 on edges touching vertex 0
      Eigen::Matrix<double, 6, 1> g;
      for (int e = 0; e < 6; ++e) {
        const int a = kTetEdgeVerts[e][0], b = kTetEdgeVerts[e][1];
        g[e] = (a == 0) ? -1.0 : (b == 0 ? 1.0 : 0.0);
      }
      worst = std::max(worst, (K * g).cwiseAbs().maxCoeff() / K.norm());
    }
    failures += check("gradient-kernel", worst <= 1e-12, worst, 1e-12);
    (void)dofs;
  }

  std::printf("%d check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}

int run_solve(const std::string& config_path) {
  const RunConfig cfg = load_config(config_path);
  validate(cfg);
  const AdaptiveResult res = adaptive_solve(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  const std::string csv = cfg.output_dir + "/convergence.csv";
  const std::string vtk = cfg.output_dir + "/solution.vtk";
  export_csv(res.record, csv);
  export_vtk(res.solution, *res.mesh, vtk);
  const auto& last = res.record.rows.back();
  std::printf("N = %d, %zu iteration(s), stop reason: %s\n", res.N,
              res.record.rows.size(), res.record.stop_reason.c_str());
  std::printf("final: %zu tets, %zu dofs, eps_h = %.6e, eps_N = %.6e\n",
              last.n_tets, last.n_dofs, last.eps_h, last.eps_N);
  if (!std::isnan(last.true_error))
    std::printf("true H(curl) error: %.6e\n", last.true_error);
  std::printf("wrote %s and %s\n", csv.c_str(), vtk.c_str());
  return 0;
}

int run_sweep(const std::string& config_path, int nmax) {
  RunConfig cfg = load_config(config_path);
  validate(cfg);
  cfg.max_iters = 0;  // fixed mesh; only the truncation degree varies
  std::filesystem::create_directories(cfg.output_dir);
  const std::string path = cfg.output_dir + "/sweep.csv";
  std::ofstream out(path, std::ios::binary);
  out << "N,n_dofs,eps_N,eps_h,diff_hcurl\n";

  Eigen::VectorXcd prev;
  std::shared_ptr<Mesh> mesh;
  std::shared_ptr<DofMap> dofs;
  for (int N = 1; N <= nmax; ++N) {
    cfg.N = N;
    const AdaptiveResult res = adaptive_solve(cfg);
    const auto& row = res.record.rows.front();
    char buf[64];
    out << N << ',' << row.n_dofs << ',';
    std::snprintf(buf, sizeof buf, "%.17g", row.eps_N);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", row.eps_h);
    out << buf << ',';
    if (prev.size() == res.solution.coeffs.size()) {
      const double diff =
          hcurl_norm(*res.mesh, *res.dofs, res.solution.coeffs - prev);
      std::snprintf(buf, sizeof buf, "%.17g", diff);
      out << buf;
      std::printf("N = %2d: eps_N = %.3e, ||E_N - E_{N-1}|| = %.3e\n", N,
                  row.eps_N, diff);
    } else {
      std::printf("N = %2d: eps_N = %.3e\n", N, row.eps_N);
    }
    out << '\n';
    prev = res.solution.coeffs;
    mesh = res.mesh;
    dofs = res.dofs;
  }
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive edge-element solver for exterior time-harmonic "
               "Maxwell scattering with a spectral boundary condition"};
  app.require_subcommand(1);

  std::string config_path;
  int nmax = 8;

  CLI::App* solve_cmd = app.add_subcommand("solve", "run the adaptive loop");
  solve_cmd->add_option("--config", config_path, "run configuration file")
      ->required();

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run built-in self checks");

  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep-n", "solve one mesh for increasing truncation degrees");
  sweep_cmd->add_option("--config", config_path, "run configuration file")
      ->required();
  sweep_cmd->add_option("--nmax", nmax, "largest truncation degree")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return run_solve(config_path);
    if (verify_cmd->parsed()) return run_verify();
    if (sweep_cmd->parsed()) return run_sweep(config_path, nmax);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
