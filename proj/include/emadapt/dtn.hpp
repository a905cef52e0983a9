#pragma once

#include <functional>

#include "emadapt/harmonics.hpp"

// The (truncated) DtN operator on Gamma_R, the boundary source f^N,
// trace-space norms, and the truncation-error indicator eps_N.

namespace emadapt {

struct WaveParams {
  double kappa = 1.0;   // wavenumber
  double R = 1.0;       // truncation sphere radius
  double Rprime = 0.5;  // radius of the smallest ball containing the obstacle
};

/// Throws std::invalid_argument unless 0 < Rprime < R and kappa > 0.
void validate(const WaveParams& w);

// Per-degree multipliers of the truncated DtN operator:
// T(phi1 U + phi2 V) = g1_n phi1 U + g2_n phi2 V with
// g1_n = i kappa R / (1 + z_n^{(1)}(kappa R)) and g2_n = 1/g1_n.
struct DtnFactors {
  int N = 0;
  double kappaR = 0.0;
  std::vector<cplx> g1, g2;  // indexed by n - 1 for 1 <= n <= N

  cplx g1_at(int n) const { return g1[static_cast<std::size_t>(n) - 1]; }
  cplx g2_at(int n) const { return g2[static_cast<std::size_t>(n) - 1]; }
};

/// Build the multiplier tables; throws if |1 + z_n| < 1e-12 for some n.
DtnFactors dtn_factors(const WaveParams& w, int N);

/// Apply the truncated DtN operator; modes above F.N are dropped.
/// Requires S.N >= F.N.
TangentialSpectrum apply_dtn(const DtnFactors& F, const TangentialSpectrum& S);

// Weighted spectral trace norms. With w_n = 1 + n(n+1):
//   hs(s):     sum w_n^s (|phi1|^2 + |phi2|^2)
//   curl_half: sum w_n^{-1/2}|phi1|^2 + w_n^{1/2}|phi2|^2   (TH^{-1/2}(curl))
//   div_half:  sum w_n^{1/2}|phi1|^2 + w_n^{-1/2}|phi2|^2   (TH^{-1/2}(div))
// all square-rooted.
struct TraceNorm {
  enum class Kind { hs, curl_half, div_half };
  Kind kind = Kind::hs;
  double s = 0.0;

  static TraceNorm Hs(double s) { return {Kind::hs, s}; }
  static TraceNorm curl_half() { return {Kind::curl_half, 0.0}; }
  static TraceNorm div_half() { return {Kind::div_half, 0.0}; }
};

double th_norm(const TangentialSpectrum& S, const TraceNorm& flavor);

// Analytic incident/exact field: value and curl at a Cartesian point.
// Either function may be empty, in which case the field is treated as zero.
struct FieldSampler {
  std::function<Vec3c(const Vec3&)> value;
  std::function<Vec3c(const Vec3&)> curl;
};

/// Boundary source f^N = (curl E_inc) x e_rho - i kappa T^N (E_inc)_Gamma on
/// Gamma_R, returned as a degree-N spectrum. quad_L = 0 selects the default
/// rule with L = N + 2 latitude nodes.
TangentialSpectrum boundary_source(const FieldSampler& Einc,
                                   const WaveParams& w, int N, int quad_L = 0);

/// eps_N = (Rprime/R)^{N+1} * f_norm.
double truncation_indicator(const WaveParams& w, int N, double f_norm);

/// Smallest N >= 1 with truncation_indicator(w, N, f_norm) <= tol.
int choose_N(const WaveParams& w, double f_norm, double tol = 1e-8);

}  // namespace emadapt
