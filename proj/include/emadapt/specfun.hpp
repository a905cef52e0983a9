#pragma once

#include <complex>
#include <vector>

// Spherical Bessel/Hankel functions, logarithmic-derivative ratios and
// (normalized) associated Legendre functions / scalar spherical harmonics.

namespace emadapt {

using cplx = std::complex<double>;

enum class HankelKind { first, second };

struct ModeDegree {
  int n = 0;  // harmonic degree, n >= 0
  int m = 0;  // order, |m| <= n
};

/// Spherical Bessel function j_n(x), downward recurrence for stability.
double sph_bessel_j(int n, double x);

/// Spherical Hankel function h_n^{(1)} or h_n^{(2)} at x > 0.
/// Upward recurrence seeded by the closed forms for n = 0, 1.
cplx sph_hankel(HankelKind kind, int n, double x);

/// All of h_0..h_nmax in one sweep.
std::vector<cplx> sph_hankel_table(HankelKind kind, int nmax, double x);

/// z_n(x) = x h_n'(x) / h_n(x), with h_n' = h_{n-1} - (n+1)/x * h_n.
cplx z_ratio(HankelKind kind, int n, double x);

/// Unnormalized associated Legendre P_n^m(t) = (1-t^2)^{m/2} d^m/dt^m P_n(t),
/// no Condon-Shortley phase. Intended for small n only (factorial growth).
double assoc_legendre(int n, int m, double t);

// Fully normalized associated Legendre values
// Pbar_n^m(cos theta) = sqrt((2n+1)(n-m)!/(4 pi (n+m)!)) P_n^m(cos theta),
// so that Y_n^m = Pbar_n^{|m|}(cos theta) e^{i m phi} is L^2(S^2)-orthonormal.
// Filled for 0 <= m <= n <= nmax, indexed by idx(n, m) = n(n+1)/2 + m.
struct LegendreTable {
  int nmax = 0;
  std::vector<double> p;      // Pbar_n^m
  std::vector<double> dp;     // d/dtheta Pbar_n^m
  std::vector<double> p_sin;  // m * Pbar_n^m / sin(theta), analytic at poles

  static std::size_t idx(int n, int m) {
    return static_cast<std::size_t>(n) * (n + 1) / 2 + m;
  }
};

/// Evaluate the normalized Legendre table at colatitude theta in [0, pi].
LegendreTable legendre_table(int nmax, double theta);

/// Scalar harmonic X_n^m(theta, phi) = Y_n^m(theta, phi) / R on the sphere
/// of radius R.
cplx scalar_harmonic(int n, int m, double theta, double phi, double R);

}  // namespace emadapt
