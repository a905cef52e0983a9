#include "emadapt/dtn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace emadapt {

void validate(const WaveParams& w) {
  if (w.kappa <= 0.0)
    throw std::invalid_argument("WaveParams: kappa must be positive");
  if (!(0.0 < w.Rprime && w.Rprime < w.R))
    throw std::invalid_argument("WaveParams: need 0 < Rprime < R, got Rprime=" +
                                std::to_string(w.Rprime) +
                                ", R=" + std::to_string(w.R));
}

DtnFactors dtn_factors(const WaveParams& w, int N) {
  validate(w);
  if (N < 1) throw std::domain_error("dtn_factors: N >= 1");
  DtnFactors F;
  F.N = N;
  F.kappaR = w.kappa * w.R;
  F.g1.resize(N);
  F.g2.resize(N);
  const cplx ikR(0.0, F.kappaR);
  for (int n = 1; n <= N; ++n) {
    const cplx zp1 = 1.0 + z_ratio(HankelKind::first, n, F.kappaR);
    if (std::abs(zp1) < 1e-12)
      throw std::runtime_error("dtn_factors: |1 + z_n| degenerate at n = " +
                               std::to_string(n));
    F.g1[n - 1] = ikR / zp1;
    F.g2[n - 1] = zp1 / ikR;
  }
  return F;
}

TangentialSpectrum apply_dtn(const DtnFactors& F, const TangentialSpectrum& S) {
  if (S.N < F.N)
    throw std::invalid_argument("apply_dtn: spectrum degree below factor degree");
  TangentialSpectrum out(F.N, S.R);
  for (int n = 1; n <= F.N; ++n)
    for (int m = -n; m <= n; ++m) {
      out.u(n, m) = F.g1_at(n) * S.u(n, m);
      out.v(n, m) = F.g2_at(n) * S.v(n, m);
    }
  return out;
}

double th_norm(const TangentialSpectrum& S, const TraceNorm& flavor) {
  double acc = 0.0;
  for (int n = 1; n <= S.N; ++n) {
    const double wn = 1.0 + double(n) * (n + 1);
    double w1, w2;
    switch (flavor.kind) {
      case TraceNorm::Kind::hs:
        w1 = w2 = std::pow(wn, flavor.s);
        break;
      case TraceNorm::Kind::curl_half:
        w1 = 1.0 / std::sqrt(wn);
        w2 = std::sqrt(wn);
        break;
      case TraceNorm::Kind::div_half:
        w1 = std::sqrt(wn);
        w2 = 1.0 / std::sqrt(wn);
        break;
    }
    for (int m = -n; m <= n; ++m) {
      acc += w1 * std::norm(S.u(n, m)) + w2 * std::norm(S.v(n, m));
    }
  }
  return std::sqrt(acc);
}

TangentialSpectrum boundary_source(const FieldSampler& Einc,
                                   const WaveParams& w, int N, int quad_L) {
  validate(w);
  if (N < 1) throw std::domain_error("boundary_source: N >= 1");
  if (!Einc.value && !Einc.curl) return TangentialSpectrum(N, w.R);
  if (!Einc.value || !Einc.curl)
    throw std::invalid_argument(
        "boundary_source: sampler must provide both value and curl");

  const auto quad = sphere_quadrature(quad_L > 0 ? quad_L : N + 2);

  TangentSampler curl_trace = [&](double theta, double phi) {
    Vec3 er, et, ep;
    sphere_frame(theta, phi, er, et, ep);
    const Vec3c c = Einc.curl(w.R * er);
    return Vec3c(c(1) * er(2) - c(2) * er(1), c(2) * er(0) - c(0) * er(2),
                 c(0) * er(1) - c(1) * er(0));
  };
  TangentSampler value_trace = [&](double theta, double phi) {
    Vec3 er, et, ep;
    sphere_frame(theta, phi, er, et, ep);
    const Vec3c E = Einc.value(w.R * er);
    const cplx radial = E(0) * er(0) + E(1) * er(1) + E(2) * er(2);
    return Vec3c(E - radial * er.cast<cplx>());
  };

  const auto curl_spec = analyze(curl_trace, N, w.R, quad);
  const auto trace_spec = analyze(value_trace, N, w.R, quad);
  const auto dtn_spec = apply_dtn(dtn_factors(w, N), trace_spec);

  TangentialSpectrum f(N, w.R);
  const cplx ik(0.0, w.kappa);
  for (std::size_t k = 0; k < f.phi1.size(); ++k) {
    f.phi1[k] = curl_spec.phi1[k] - ik * dtn_spec.phi1[k];
    f.phi2[k] = curl_spec.phi2[k] - ik * dtn_spec.phi2[k];
  }
  return f;
}

double truncation_indicator(const WaveParams& w, int N, double f_norm) {
  validate(w);
  if (f_norm < 0.0)
    throw std::domain_error("truncation_indicator: f_norm >= 0");
  return std::pow(w.Rprime / w.R, N + 1) * f_norm;
}

int choose_N(const WaveParams& w, double f_norm, double tol) {
  validate(w);
  if (!(tol > 0.0)) throw std::domain_error("choose_N: tol > 0 required");
  if (!(f_norm > 0.0)) throw std::domain_error("choose_N: f_norm > 0 required");
  constexpr int kMaxDegree = 100000;
  for (int N = 1; N <= kMaxDegree; ++N)
    if (truncation_indicator(w, N, f_norm) <= tol) return N;
  throw std::runtime_error("choose_N: no admissible degree below " +
                           std::to_string(kMaxDegree));
}

}  // namespace emadapt
