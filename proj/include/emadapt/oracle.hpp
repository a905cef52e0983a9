#pragma once

#include <functional>

#include "emadapt/dtn.hpp"

// Analytic reference solutions and lemma oracles used by tests and
// acceptance runs: the dipole point source, outgoing spherical modes, the
// exponential-decay ratios, the dual-problem radial ODE, and plane waves.

namespace emadapt {

/// Electric dipole field E = G + kappa^{-2} grad div G with G = (0,0,Phi),
/// Phi = e^{i kappa |x-y|} / (4 pi |x-y|). Throws within 1e-12 of the source.
FieldSampler point_source_field(double kappa, const Vec3& y);

enum class ModeBranch { TE, TM };

/// Outgoing divergence-free Maxwell mode built on h_n^{(1)}(kappa rho):
/// TE: E = h V_n^m;  TM: E = curl(h V_n^m). Angular factors use R = 1.
FieldSampler radiating_mode_field(int n, int m, double kappa,
                                  ModeBranch branch);

/// Fourier-coefficient decay ratios between Gamma_R and Gamma_R':
/// component 2 -> h_n^{(1)}(kappa R) / h_n^{(1)}(kappa R');
/// component 1 -> (R'/R) * (component 2) * (1+z_n(kappa R))/(1+z_n(kappa R')).
cplx decay_ratio(int n, double kappa, double R, double Rprime, int component);

/// Plane wave E = p e^{i kappa q.x}; requires |q| = 1 and p.q = 0.
FieldSampler plane_wave_field(double kappa, const Vec3& p, const Vec3& q);

// Closed-form solution of the dual-problem radial ODE
//   v'' + (2/rho) v' + (kappa^2 - n(n+1)/rho^2) v = -xi   on (R', R)
// with v(R') prescribed and the Robin condition
//   v'(R) - z_n^{(2)}(kappa R) v(R) / R = 0.
struct DualModeSolution {
  int n = 1;
  double kappa = 1.0, R = 1.0, Rprime = 0.5;
  std::function<cplx(double)> v;             // solution profile on [R', R]
  std::function<cplx(double)> S;             // S_n(rho) = h2(k rho)/h2(k R')
  std::function<cplx(double, double)> W;     // W_n(rho, t)

  /// C_n^m(R) = [(1+z_n^{(2)}(kR)) / z_n^{(2)}(kR)] (R/kappa^2) zeta3_at_R.
  cplx C_nm(cplx zeta3_at_R) const;

  /// w1n(R) = [ (1+z_n^{(2)}(kR)) v(R) - C ] / (sqrt(n(n+1)) R).
  cplx w1n_at_R(cplx C) const;
};

/// Evaluate the closed-form solution; integrals by adaptive Gauss quadrature.
DualModeSolution dual_ode_solve(int n, double kappa, double R, double Rprime,
                                const std::function<cplx(double)>& xi,
                                cplx v_at_Rprime);

}  // namespace emadapt
