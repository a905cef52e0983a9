#include <doctest.h>

#include <cmath>
#include <complex>
#include <algorithm>

#include "emadapt/harmonics.hpp"
#include "emadapt/specfun.hpp"

using namespace emadapt;
using doctest::Approx;

namespace {
double cnorm(cplx a, cplx b) { return std::abs(a - b); }
}  // namespace

TEST_CASE("spherical Hankel closed forms at n = 0, 1") {
  const double s1 = std::sin(1.0), c1 = std::cos(1.0);
  CHECK(cnorm(sph_hankel(HankelKind::first, 0, 1.0), cplx(s1, -c1)) < 1e-14);
  CHECK(cnorm(sph_hankel(HankelKind::first, 1, 1.0),
              cplx(s1 - c1, -(s1 + c1))) < 1e-14);
  // h_2(x) = (3/x^3 - 1/x) e^{ix} type closed form, checked via recurrence def
  const cplx h2 = sph_hankel(HankelKind::first, 2, 1.0);
  const cplx ref = 3.0 * sph_hankel(HankelKind::first, 1, 1.0) -
                   sph_hankel(HankelKind::first, 0, 1.0);
  CHECK(cnorm(h2, ref) < 1e-14);
}

TEST_CASE("spherical Hankel large-order magnitude ~ (2n-1)!!/x^{n+1}") {
  double dfac = 1.0;
  for (int k = 1; k <= 10; ++k) dfac *= 2 * k - 1;  // (2*10-1)!! = 654729075
  CHECK(dfac == 654729075.0);
  const double mag = std::abs(sph_hankel(HankelKind::first, 10, 1.0));
  CHECK(mag == Approx(dfac).epsilon(0.05));
}

TEST_CASE("spherical Hankel domain errors") {
  CHECK_THROWS_AS(sph_hankel(HankelKind::first, 0, 0.0), std::domain_error);
  CHECK_THROWS_AS(sph_hankel(HankelKind::first, 2, -1.0), std::domain_error);
  CHECK_THROWS_AS(sph_hankel(HankelKind::first, -1, 1.0), std::domain_error);
  // extreme order/argument ratios must fail loudly, not return inf
  CHECK_THROWS_AS(sph_hankel(HankelKind::first, 400, 1e-3),
                  std::overflow_error);
}

TEST_CASE("second kind is the conjugate of the first") {
  for (double x : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    auto h1 = sph_hankel_table(HankelKind::first, 60, x);
    auto h2 = sph_hankel_table(HankelKind::second, 60, x);
    for (int n = 0; n <= 60; ++n) {
      const double rel = std::abs(h2[n] - std::conj(h1[n])) / std::abs(h1[n]);
      CHECK(rel < 1e-12);
    }
  }
}

TEST_CASE("spherical Bessel j_n against closed forms and Wronskian") {
  CHECK(sph_bessel_j(0, 1.3) == Approx(std::sin(1.3) / 1.3).epsilon(1e-14));
  CHECK(sph_bessel_j(1, 0.7) ==
        Approx(std::sin(0.7) / 0.49 - std::cos(0.7) / 0.7).epsilon(1e-13));
  CHECK(sph_bessel_j(5, 0.0) == 0.0);
  CHECK(sph_bessel_j(0, 0.0) == 1.0);
  // j_n is the real part of h_n^{(1)}; the achievable absolute accuracy of
  // Re h_n is limited by |h_n| ~ |y_n|, which dwarfs j_n for n >> x
  for (double x : {0.5, 2.0, 9.0}) {
    auto h = sph_hankel_table(HankelKind::first, 30, x);
    for (int n = 0; n <= 30; ++n) {
      const double jn = sph_bessel_j(n, x);
      CHECK(std::abs(jn - h[n].real()) < 1e-11 * std::abs(h[n]));
    }
  }
}

TEST_CASE("z_ratio closed forms") {
  CHECK(cnorm(z_ratio(HankelKind::first, 0, 2.0), cplx(-1.0, 2.0)) < 1e-14);
  CHECK(cnorm(z_ratio(HankelKind::first, 1, 2.0), cplx(-1.2, 1.6)) < 1e-14);
}

TEST_CASE("z_ratio large-order behaviour: Re z ~ -(n+1), Re z <= -1") {
  const cplx z50 = z_ratio(HankelKind::first, 50, 2.0);
  CHECK(z50.real() >= -52.0);
  CHECK(z50.real() <= -50.0);
  for (int n = 1; n <= 60; ++n)
    for (double x : {0.5, 2.0, 10.0})
      CHECK(z_ratio(HankelKind::first, n, x).real() <= -1.0);
}

TEST_CASE("|1 + z_n| grows linearly in n") {
  // Measured over n in [5, 60], x in [0.5, 10]: the upper constant stays
  // below 2; the lower constant dips to ~0.37 in the transition region
  // x ~ n and recovers to ~0.84 once x <= n/2.
  for (int n = 5; n <= 60; ++n) {
    for (double x = 0.5; x <= 10.0; x += 0.5) {
      const double a = std::abs(1.0 + z_ratio(HankelKind::first, n, x));
      CHECK(a <= 2.0 * n);
      CHECK(a >= 0.35 * n);
      if (x <= 0.5 * n) CHECK(a >= 0.5 * n);
    }
  }
}

TEST_CASE("z_n large-n expansion at t = 2") {
  // z_n(t) = -(n+1) + t^2/(2n) + O(1/n^2); measured remainder * n^2 stays
  // near t^2/4 and decreases monotonically over n in [20, 60].
  const double t = 2.0;
  auto err = [&](int n) {
    const cplx z = z_ratio(HankelKind::first, n, t);
    return std::abs(z - cplx(-(n + 1.0) + t * t / (2.0 * n), 0.0));
  };
  const double K = err(20) * 20.0 * 20.0;  // fit the constant once at n = 20
  for (int n = 20; n <= 60; ++n) {
    CHECK(err(n) <= 1.05 * K / (double(n) * n));
    CHECK(err(n) >= 0.5 * K / (double(n) * n));
  }
}

TEST_CASE("associated Legendre closed forms") {
  CHECK(assoc_legendre(1, 1, 0.0) == Approx(1.0).epsilon(1e-15));
  CHECK(assoc_legendre(2, 0, 0.5) == Approx(-0.125).epsilon(1e-15));
  // P_5^3(t) = (1-t^2)^{3/2} (3780 t^2 - 420)/8
  const double t = 0.3;
  const double ref = std::pow(1.0 - t * t, 1.5) * (3780.0 * t * t - 420.0) / 8.0;
  CHECK(assoc_legendre(5, 3, t) == Approx(ref).epsilon(1e-13));
  CHECK_THROWS_AS(assoc_legendre(2, 3, 0.0), std::domain_error);
  CHECK_THROWS_AS(assoc_legendre(2, 1, 1.5), std::domain_error);
}

TEST_CASE("normalized Legendre table matches small-n closed forms") {
  const double theta = 1.1;
  const double t = std::cos(theta);
  const auto tab = legendre_table(6, theta);
  for (int n = 0; n <= 6; ++n) {
    for (int m = 0; m <= n; ++m) {
      double ratio = 1.0;
      for (int k = n - m + 1; k <= n + m; ++k) ratio *= k;  // (n+m)!/(n-m)!
      const double norm = std::sqrt((2.0 * n + 1.0) / (4.0 * M_PI * ratio));
      const double ref = norm * assoc_legendre(n, m, t);
      CHECK(tab.p[LegendreTable::idx(n, m)] == Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("Legendre table derivative against finite differences") {
  const double theta = 0.8, h = 1e-6;
  const auto tp = legendre_table(8, theta + h);
  const auto tm = legendre_table(8, theta - h);
  const auto t0 = legendre_table(8, theta);
  for (int n = 1; n <= 8; ++n)
    for (int m = 0; m <= n; ++m) {
      const auto i = LegendreTable::idx(n, m);
      const double fd = (tp.p[i] - tm.p[i]) / (2.0 * h);
      CHECK(t0.dp[i] == Approx(fd).epsilon(1e-7).scale(1.0));
    }
}

TEST_CASE("Legendre table is pole-safe") {
  for (double theta : {0.0, M_PI}) {
    const auto tab = legendre_table(10, theta);
    for (double v : tab.p) CHECK(std::isfinite(v));
    for (double v : tab.dp) CHECK(std::isfinite(v));
    for (double v : tab.p_sin) CHECK(std::isfinite(v));
    // m P_n^m / sin(theta) -> 0 for m != 1 at the poles, finite for m = 1
    CHECK(tab.p_sin[LegendreTable::idx(3, 2)] == Approx(0.0).scale(1.0));
    CHECK(std::abs(tab.p_sin[LegendreTable::idx(1, 1)]) > 0.1);
  }
}

TEST_CASE("scalar harmonic closed forms") {
  CHECK(cnorm(scalar_harmonic(0, 0, 0.4, 1.7, 1.0),
              cplx(1.0 / std::sqrt(4.0 * M_PI), 0.0)) < 1e-14);
  const double theta = 0.9, phi = 2.1;
  CHECK(cnorm(scalar_harmonic(1, 0, theta, phi, 1.0),
              cplx(std::sqrt(3.0 / (4.0 * M_PI)) * std::cos(theta), 0.0)) <
        1e-14);
  // Y_n^{-m} = conj(Y_n^m) in this convention (no Condon-Shortley phase)
  CHECK(cnorm(scalar_harmonic(3, -2, theta, phi, 2.0),
              std::conj(scalar_harmonic(3, 2, theta, phi, 2.0))) < 1e-14);
}

TEST_CASE("scalar harmonics are orthonormal on Gamma_R") {
  const double R = 2.0;
  const auto quad = sphere_quadrature(14);
  auto inner = [&](int n, int m, int np, int mp) {
    cplx acc(0);
    for (const auto& nd : quad.nodes)
      acc += nd.weight * R * R * scalar_harmonic(n, m, nd.theta, nd.phi, R) *
             std::conj(scalar_harmonic(np, mp, nd.theta, nd.phi, R));
    return acc;
  };
  CHECK(cnorm(inner(2, 1, 2, 1), cplx(1.0)) < 1e-10);
  for (int n = 0; n <= 12; ++n)
    for (int m = -n; m <= n; m += std::max(1, n)) {
      CHECK(cnorm(inner(n, m, n, m), cplx(1.0)) < 1e-8);
      if (n >= 2) {
        CHECK(std::abs(inner(n, m, n - 1, std::clamp(m, 1 - n, n - 1))) <
              1e-8);
        CHECK(std::abs(inner(n, m, n - 2, std::clamp(m, 2 - n, n - 2))) <
              1e-8);
      }
    }
}
