#include "emadapt/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace emadapt {

namespace {
constexpr double kOverflowGuard = 1e250;
constexpr double kFourPi = 4.0 * M_PI;
}  // namespace

double sph_bessel_j(int n, double x) {
  if (n < 0) throw std::domain_error("sph_bessel_j: n must be nonnegative");
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (x < 0.0) throw std::domain_error("sph_bessel_j: x must be nonnegative");
  const double j0 = std::sin(x) / x;
  if (n == 0) return j0;
  const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  if (n == 1) return j1;
  if (x > n) {
    // upward recurrence is stable when x dominates the order
    double jm = j0, jc = j1;
    for (int k = 1; k < n; ++k) {
      double jn = (2 * k + 1) / x * jc - jm;
      jm = jc;
      jc = jn;
    }
    return jc;
  }
  // Miller's downward recurrence, normalized against j_0
  int start = n + 16 + static_cast<int>(std::sqrt(40.0 * n));
  double fp = 0.0, fc = 1e-30, target = 0.0;
  for (int k = start; k >= 1; --k) {
    double fm = (2 * k + 1) / x * fc - fp;  // f_{k-1}
    fp = fc;
    fc = fm;
    if (k - 1 == n) target = fc;
    if (std::abs(fc) > kOverflowGuard) {
      fc /= kOverflowGuard;
      fp /= kOverflowGuard;
      target /= kOverflowGuard;
    }
  }
  return target * (j0 / fc);
}

std::vector<cplx> sph_hankel_table(HankelKind kind, int nmax, double x) {
  if (x <= 0.0) throw std::domain_error("sph_hankel: x must be positive");
  if (nmax < 0) throw std::domain_error("sph_hankel: n must be nonnegative");
  std::vector<cplx> h(static_cast<std::size_t>(nmax) + 1);
  const cplx i(0.0, 1.0);
  const cplx e = std::exp(i * x);
  // h_0^{(1)} = -i e^{ix}/x,  h_1^{(1)} = -e^{ix}(x+i)/x^2
  cplx h0 = -i * e / x;
  cplx h1 = -e * (x + i) / (x * x);
  if (kind == HankelKind::second) {
    h0 = std::conj(h0);
    h1 = std::conj(h1);
  }
  h[0] = h0;
  if (nmax >= 1) h[1] = h1;
  for (int n = 1; n < nmax; ++n) {
    h[n + 1] = (2 * n + 1) / x * h[n] - h[n - 1];
    if (std::abs(h[n + 1]) > kOverflowGuard)
      throw std::overflow_error("sph_hankel: recurrence overflow at n=" +
                                std::to_string(n + 1));
  }
  return h;
}

cplx sph_hankel(HankelKind kind, int n, double x) {
  return sph_hankel_table(kind, n, x)[static_cast<std::size_t>(n)];
}

cplx z_ratio(HankelKind kind, int n, double x) {
  auto h = sph_hankel_table(kind, n, x);
  const cplx hn = h[static_cast<std::size_t>(n)];
  cplx dh;
  if (n == 0) {
    // h_0' = -h_1
    auto h1 = sph_hankel_table(kind, 1, x);
    dh = -h1[1];
  } else {
    dh = h[static_cast<std::size_t>(n) - 1] - (n + 1) / x * hn;
  }
  return x * dh / hn;
}

double assoc_legendre(int n, int m, double t) {
  if (m < 0 || m > n) throw std::domain_error("assoc_legendre: need 0 <= m <= n");
  if (std::abs(t) > 1.0) throw std::domain_error("assoc_legendre: |t| <= 1 required");
  const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
  // P_m^m = (2m-1)!! s^m, then upward in degree
  double pmm = 1.0;
  for (int k = 1; k <= m; ++k) pmm *= (2 * k - 1) * s;
  if (n == m) return pmm;
  double pm1 = pmm, pc = (2 * m + 1) * t * pmm;
  for (int k = m + 2; k <= n; ++k) {
    double pn = ((2 * k - 1) * t * pc - (k + m - 1) * pm1) / (k - m);
    pm1 = pc;
    pc = pn;
  }
  return pc;
}

LegendreTable legendre_table(int nmax, double theta) {
  if (nmax < 0) throw std::domain_error("legendre_table: nmax >= 0");
  LegendreTable tab;
  tab.nmax = nmax;
  const std::size_t sz = LegendreTable::idx(nmax, nmax) + 1;
  tab.p.assign(sz, 0.0);
  tab.dp.assign(sz, 0.0);
  tab.p_sin.assign(sz, 0.0);

  const double x = std::cos(theta);
  const double s = std::sin(theta);
  const auto I = LegendreTable::idx;

  // Pbar for m = 0
  tab.p[I(0, 0)] = std::sqrt(1.0 / kFourPi);
  if (nmax >= 1) tab.p[I(1, 0)] = std::sqrt(3.0 / kFourPi) * x;
  for (int n = 2; n <= nmax; ++n) {
    const double a = std::sqrt((4.0 * n * n - 1.0) / (double(n) * n));
    const double b = std::sqrt((double(n - 1) * (n - 1)) /
                               (4.0 * double(n - 1) * (n - 1) - 1.0));
    tab.p[I(n, 0)] = a * (x * tab.p[I(n - 1, 0)] - b * tab.p[I(n - 2, 0)]);
  }

  // Q_n^m = Pbar_n^m / sin(theta) for m >= 1, built without dividing by sin
  std::vector<double> q(sz, 0.0);
  if (nmax >= 1) {
    double prev_pmm = tab.p[I(0, 0)];  // Pbar_{m-1}^{m-1}
    for (int m = 1; m <= nmax; ++m) {
      const double qmm = prev_pmm * std::sqrt((2.0 * m + 1.0) / (2.0 * m));
      q[I(m, m)] = qmm;
      if (m + 1 <= nmax) q[I(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * qmm;
      for (int n = m + 2; n <= nmax; ++n) {
        const double a =
            std::sqrt((4.0 * n * n - 1.0) / (double(n) * n - double(m) * m));
        const double b =
            std::sqrt((double(n - 1) * (n - 1) - double(m) * m) /
                      (4.0 * double(n - 1) * (n - 1) - 1.0));
        q[I(n, m)] = a * (x * q[I(n - 1, m)] - b * q[I(n - 2, m)]);
      }
      prev_pmm = s * qmm;  // Pbar_m^m
    }
  }

  for (int n = 1; n <= nmax; ++n) {
    for (int m = 1; m <= n; ++m) {
      tab.p[I(n, m)] = s * q[I(n, m)];
      tab.p_sin[I(n, m)] = m * q[I(n, m)];
      const double c =
          std::sqrt((2.0 * n + 1.0) * (double(n) * n - double(m) * m) /
                    (2.0 * n - 1.0));
      const double qprev = (n - 1 >= m) ? q[I(n - 1, m)] : 0.0;
      tab.dp[I(n, m)] = n * x * q[I(n, m)] - c * qprev;
    }
    // d/dtheta Pbar_n^0 = -sqrt(n(n+1)) Pbar_n^1
    tab.dp[I(n, 0)] = -std::sqrt(double(n) * (n + 1)) * tab.p[I(n, 1)];
  }
  return tab;
}

cplx scalar_harmonic(int n, int m, double theta, double phi, double R) {
  if (n < 0 || std::abs(m) > n) throw std::domain_error("scalar_harmonic: |m| <= n");
  if (R <= 0.0) throw std::domain_error("scalar_harmonic: R > 0 required");
  const auto tab = legendre_table(n, theta);
  const double pbar = tab.p[LegendreTable::idx(n, std::abs(m))];
  return pbar * std::exp(cplx(0.0, m * phi)) / R;
}

}  // namespace emadapt
