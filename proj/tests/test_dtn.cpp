#include <doctest.h>

#include <cmath>
#include <random>

#include "emadapt/dtn.hpp"
#include "emadapt/oracle.hpp"

using namespace emadapt;

TEST_CASE("wave parameter validation") {
  CHECK_NOTHROW(validate(WaveParams{2.0, 0.5, 0.1}));
  CHECK_THROWS_AS(validate(WaveParams{2.0, 0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(validate(WaveParams{2.0, 0.1, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(validate(WaveParams{-1.0, 0.5, 0.1}), std::invalid_argument);
}

TEST_CASE("DtN multipliers: closed form at kappa R = 2, n = 1") {
  const WaveParams w{2.0, 1.0, 0.5};
  const auto F = dtn_factors(w, 3);
  // g1 = 2i / (1 + z_1(2)) = 2i / (-0.2 + 1.6i)
  CHECK(std::abs(F.g1_at(1) - cplx(2.0, 0.0) * cplx(0.0, 1.0) /
                                  cplx(-0.2, 1.6)) < 1e-14);
  CHECK(std::abs(F.g1_at(1) - cplx(16.0 / 13.0, -2.0 / 13.0)) < 1e-6);
}

TEST_CASE("DtN multipliers are exact reciprocals") {
  const auto F = dtn_factors(WaveParams{2.0, 1.0, 0.5}, 40);
  for (int n = 1; n <= 40; ++n)
    CHECK(std::abs(F.g1_at(n) * F.g2_at(n) - cplx(1.0)) < 1e-14);
}

TEST_CASE("U-mode multiplier decays like kappa R / n") {
  const double kR = 2.0;
  const auto F = dtn_factors(WaveParams{2.0, 1.0, 0.5}, 40);
  const double g = std::abs(F.g1_at(40));
  CHECK(g <= 2.0 * (2.0 * kR / 40.0));
  CHECK(g >= 0.25 * (kR / 40.0));
}

TEST_CASE("apply_dtn on simple spectra") {
  const WaveParams w{2.0, 1.0, 0.5};
  const auto F = dtn_factors(w, 5);

  TangentialSpectrum zero(5, w.R);
  auto out = apply_dtn(F, zero);
  for (auto c : out.phi1) CHECK(std::abs(c) == 0.0);
  for (auto c : out.phi2) CHECK(std::abs(c) == 0.0);

  TangentialSpectrum S(5, w.R);
  S.u(1, 0) = cplx(1.0);
  out = apply_dtn(F, S);
  CHECK(std::abs(out.u(1, 0) - cplx(16.0 / 13.0, -2.0 / 13.0)) < 1e-6);

  // swapping the factor roles inverts the operator
  DtnFactors Fswap = F;
  std::swap(Fswap.g1, Fswap.g2);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TangentialSpectrum Srand(5, w.R);
  for (auto& c : Srand.phi1) c = cplx(u(rng), u(rng));
  for (auto& c : Srand.phi2) c = cplx(u(rng), u(rng));
  const auto back = apply_dtn(Fswap, apply_dtn(F, Srand));
  for (std::size_t k = 0; k < Srand.phi1.size(); ++k) {
    CHECK(std::abs(back.phi1[k] - Srand.phi1[k]) < 1e-14);
    CHECK(std::abs(back.phi2[k] - Srand.phi2[k]) < 1e-14);
  }

  // degree-N and degree-(N+k) factors agree on shared modes exactly
  const auto F8 = dtn_factors(w, 8);
  CHECK_THROWS_AS(apply_dtn(F8, S), std::invalid_argument);
  TangentialSpectrum S8(8, w.R);
  S8.u(1, 0) = cplx(0.3, -0.7);
  S8.v(4, -2) = cplx(1.0, 2.0);
  const auto o5 = apply_dtn(F, S8);
  const auto o8 = apply_dtn(F8, S8);
  for (int n = 1; n <= 5; ++n)
    for (int m = -n; m <= n; ++m) {
      CHECK(o5.u(n, m) == o8.u(n, m));
      CHECK(o5.v(n, m) == o8.v(n, m));
    }
}

TEST_CASE("trace norms of a single mode") {
  TangentialSpectrum S(1, 0.5);
  S.u(1, 0) = cplx(1.0);
  const double d = th_norm(S, TraceNorm::div_half());
  const double c = th_norm(S, TraceNorm::curl_half());
  const double h0 = th_norm(S, TraceNorm::Hs(0.0));
  CHECK(d == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-14));
  CHECK(c == doctest::Approx(std::pow(3.0, -0.25)).epsilon(1e-14));
  CHECK(c * d == doctest::Approx(h0 * h0).epsilon(1e-14));
}

TEST_CASE("DtN operator norm: div_half <= C kappa R curl_half") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double kR : {1.0, 2.5, 5.0}) {
    const WaveParams w{kR, 1.0, 0.5};
    const auto F = dtn_factors(w, 30);
    for (int trial = 0; trial < 5; ++trial) {
      TangentialSpectrum S(30, 1.0);
      for (auto& c : S.phi1) c = cplx(u(rng), u(rng));
      for (auto& c : S.phi2) c = cplx(u(rng), u(rng));
      const double num = th_norm(apply_dtn(F, S), TraceNorm::div_half());
      const double den = th_norm(S, TraceNorm::curl_half());
      CHECK(num <= 3.0 * kR * den);
    }
  }
}

TEST_CASE("radiating modes satisfy the transparent boundary condition") {
  // (curl E) x e_rho = i kappa T(E_Gamma) on Gamma_R, relative defect <= 1e-8
  const double kappa = 2.0, R = 0.5;
  const WaveParams w{kappa, R, 0.1};
  const int N = 10;
  const auto quad = sphere_quadrature(N + 2);
  const auto F = dtn_factors(w, N);
  for (int n = 1; n <= 8; ++n) {
    for (ModeBranch branch : {ModeBranch::TE, ModeBranch::TM}) {
      const int m = (n >= 2) ? ((branch == ModeBranch::TE) ? 1 : -2) : 0;
      const auto mode = radiating_mode_field(n, m, kappa, branch);

      TangentSampler curl_trace = [&](double theta, double phi) {
        Vec3 er, et, ep;
        sphere_frame(theta, phi, er, et, ep);
        const Vec3c c = mode.curl(R * er);
        return Vec3c(c(1) * er(2) - c(2) * er(1), c(2) * er(0) - c(0) * er(2),
                     c(0) * er(1) - c(1) * er(0));
      };
      TangentSampler value_trace = [&](double theta, double phi) {
        Vec3 er, et, ep;
        sphere_frame(theta, phi, er, et, ep);
        const Vec3c E = mode.value(R * er);
        const cplx radial = E(0) * er(0) + E(1) * er(1) + E(2) * er(2);
        return Vec3c(E - radial * er.cast<cplx>());
      };
      const auto lhs = analyze(curl_trace, N, R, quad);
      const auto rhs = apply_dtn(F, analyze(value_trace, N, R, quad));
      double defect2 = 0.0, scale2 = 0.0;
      const cplx ik(0.0, kappa);
      for (std::size_t k = 0; k < lhs.phi1.size(); ++k) {
        defect2 += std::norm(lhs.phi1[k] - ik * rhs.phi1[k]) +
                   std::norm(lhs.phi2[k] - ik * rhs.phi2[k]);
        scale2 += std::norm(lhs.phi1[k]) + std::norm(lhs.phi2[k]);
      }
      CHECK(std::sqrt(defect2 / scale2) < 1e-8);
    }
  }
}

TEST_CASE("boundary source") {
  const WaveParams w{2.0, 0.5, 0.1};

  SUBCASE("zero incident field") {
    const auto f = boundary_source(FieldSampler{}, w, 6);
    CHECK(f.N == 6);
    for (auto c : f.phi1) CHECK(std::abs(c) == 0.0);
    for (auto c : f.phi2) CHECK(std::abs(c) == 0.0);
  }

  SUBCASE("plane wave, stable under quadrature doubling") {
    const auto pw = plane_wave_field(2.0, Vec3(1, 0, 0), Vec3(0, 0, -1));
    const auto f1 = boundary_source(pw, w, 8);
    const auto f2 = boundary_source(pw, w, 8, 2 * 8 + 4);
    for (std::size_t k = 0; k < f1.phi1.size(); ++k) {
      CHECK(std::abs(f1.phi1[k] - f2.phi1[k]) < 1e-8);
      CHECK(std::abs(f1.phi2[k] - f2.phi2[k]) < 1e-8);
    }
  }

  SUBCASE("interior-regular single mode against the closed form") {
    // E = j_n(kappa rho) V_n^m: f = [(1/R)(rho j)' - i kappa g2 j] on phi2
    const double kappa = w.kappa, R = w.R;
    const int n = 3, m = 1, N = 6;
    FieldSampler reg;
    reg.value = [=](const Vec3& x) {
      const double rho = x.norm();
      const double theta = std::acos(std::clamp(x.z() / rho, -1.0, 1.0));
      const double phi = std::atan2(x.y(), x.x());
      return Vec3c(sph_bessel_j(n, kappa * rho) *
                   vsh(VshBasis::V, n, m, theta, phi, R));
    };
    reg.curl = [=](const Vec3& x) {
      const double rho = x.norm();
      const double theta = std::acos(std::clamp(x.z() / rho, -1.0, 1.0));
      const double phi = std::atan2(x.y(), x.x());
      const double j = sph_bessel_j(n, kappa * rho);
      const double jp = sph_bessel_j(n - 1, kappa * rho) -
                        (n + 1.0) / (kappa * rho) * j;
      const double drf = (j + rho * kappa * jp) / rho;
      Vec3 er, et, ep;
      sphere_frame(theta, phi, er, et, ep);
      const double nn = std::sqrt(double(n) * (n + 1));
      return Vec3c(-drf * vsh(VshBasis::U, n, m, theta, phi, R) -
                   (nn / rho) * j *
                       scalar_harmonic(n, m, theta, phi, R) *
                       er.cast<cplx>());
    };
    const auto f = boundary_source(reg, w, N);
    const double j = sph_bessel_j(n, kappa * R);
    const double jp =
        sph_bessel_j(n - 1, kappa * R) - (n + 1.0) / (kappa * R) * j;
    const cplx g2 = dtn_factors(w, N).g2_at(n);
    const cplx want = (j + kappa * R * jp) / R - cplx(0, kappa) * g2 * j;
    for (int nn = 1; nn <= N; ++nn)
      for (int mm = -nn; mm <= nn; ++mm) {
        const cplx ref = (nn == n && mm == m) ? want : cplx(0.0);
        CHECK(std::abs(f.v(nn, mm) - ref) < 1e-8);
        CHECK(std::abs(f.u(nn, mm)) < 1e-8);
      }
  }
}

TEST_CASE("truncation indicator and degree selection") {
  const WaveParams w{2.0, 0.5, 0.1};
  CHECK(truncation_indicator(w, 11, 1.0) ==
        doctest::Approx(std::pow(0.2, 12)).epsilon(1e-13));
  CHECK(truncation_indicator(w, 5, 0.0) == 0.0);
  CHECK(truncation_indicator(w, 5, 1.0) / truncation_indicator(w, 10, 1.0) ==
        doctest::Approx(3125.0).epsilon(1e-12));

  CHECK(choose_N(w, 1.0, 1e-8) == 11);
  CHECK(choose_N(w, 1e-8, 1e-8) == 1);
  CHECK(choose_N(WaveParams{2.0, 1.0, 0.9}, 1.0, 1e-8) == 174);
  CHECK_THROWS_AS(choose_N(WaveParams{2.0, 0.5, 0.7}, 1.0, 1e-8),
                  std::invalid_argument);
  CHECK_THROWS_AS(choose_N(w, 0.0, 1e-8), std::domain_error);
}

TEST_CASE("Fourier coefficients decay exponentially between spheres") {
  const double kappa = 2.0, R = 0.5, Rp = 0.1;
  for (int n = 10; n <= 40; ++n) {
    const double ratio = std::abs(decay_ratio(n, kappa, R, Rp, 2));
    CHECK(ratio <= 2.0 * std::pow(Rp / R, n));
  }
}
