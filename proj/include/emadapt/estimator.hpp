#pragma once

#include "emadapt/fem.hpp"

// Residual-based a posteriori error estimator: element residuals, interior
// face jumps, DtN boundary residuals on the sphere, the local indicator
// eta_K, the global discretization indicator eps_h, and maximum-strategy
// marking.

namespace emadapt {

struct EstimatorReport {
  std::vector<double> eta;  // per tet
  // squared per-tet contributions, eta^2 = element + interior + boundary
  std::vector<double> element_term, interior_term, boundary_term;
  double eps_h = 0.0;
  double eps_N = 0.0;
};

/// Per-element indicators
///   eta_K^2 = h_K^2 (|R1|^2 + |R2|^2)_K + h_K sum_F (|J1|^2 + |J2|^2)_F
/// with h_K the tet diameter; R1 = kappa^2 E_h (the curl-curl part vanishes
/// for the lowest order), R2 = 0 (pointwise divergence of a + b x x), J1/J2
/// the tangential-curl and normal jumps on interior faces, and on sphere
/// faces the TBC residuals
///   J1 = 2[-(curl E_h) x nu + i kappa T^N (E_h)_Gamma + f^N]
///   J2 = 2[kappa^2 E_h.nu - i kappa div_Gamma T^N (E_h)_Gamma - div_Gamma f^N]
/// with the spectral terms synthesized at radially projected face points.
/// eps_N = truncation_indicator with the div-half norm of f_spectrum.
/// A nonzero f_spectrum of degree below F.N is rejected. Passing the
/// already-computed trace spectra avoids rebuilding them.
EstimatorReport compute_indicators(const FieldSolution& sol,
                                   const WaveParams& w, const DtnFactors& F,
                                   const TangentialSpectrum& f_spectrum,
                                   int quad_order = 4,
                                   const BoundarySpectra* traces = nullptr);

struct MarkResult {
  std::vector<int> marked;  // ascending tet indices
  bool converged = false;   // all indicators vanish
};

/// Maximum strategy with strict inequality: { K : eta_K > theta max eta }.
MarkResult mark_elements(const EstimatorReport& report, double theta);

}  // namespace emadapt
