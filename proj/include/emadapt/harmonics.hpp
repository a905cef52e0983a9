#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "emadapt/specfun.hpp"

// Vector spherical harmonics U_n^m, V_n^m on the sphere Gamma_R, surface
// differential operators, and forward/inverse transforms of tangential fields.
//
// Conventions: U_n^m = grad_Gamma X_n^m / sqrt(n(n+1)), V_n^m = e_rho x U_n^m,
// with grad_Gamma carrying pure angular derivatives (no 1/R metric factor).
// The n = 0 mode vanishes identically and is excluded everywhere.

namespace emadapt {

using Vec3 = Eigen::Vector3d;
using Vec3c = Eigen::Vector3cd;

enum class VshBasis { U, V };

// Coefficients of a tangential field on Gamma_R in the (U, V) basis,
// stored densely for 1 <= n <= N, |m| <= n.
struct TangentialSpectrum {
  int N = 0;
  double R = 1.0;
  std::vector<cplx> phi1;  // U-components
  std::vector<cplx> phi2;  // V-components

  TangentialSpectrum() = default;
  TangentialSpectrum(int N_, double R_)
      : N(N_), R(R_), phi1(num_modes(N_), cplx(0)), phi2(num_modes(N_), cplx(0)) {}

  static std::size_t num_modes(int N) {
    return static_cast<std::size_t>(N) * (N + 2);
  }
  // modes of degree n occupy [n^2 - 1, n^2 - 1 + 2n]
  static std::size_t index(int n, int m) {
    return static_cast<std::size_t>(n) * n - 1 + (m + n);
  }
  cplx& u(int n, int m) { return phi1[index(n, m)]; }
  cplx& v(int n, int m) { return phi2[index(n, m)]; }
  cplx u(int n, int m) const { return phi1[index(n, m)]; }
  cplx v(int n, int m) const { return phi2[index(n, m)]; }
};

struct SphereQuadrature {
  struct Node {
    double theta, phi, weight;  // weight on the unit sphere, sum = 4 pi
  };
  std::vector<Node> nodes;
  int order = 0;  // polynomial exactness degree
};

/// Product rule: L-point Gauss-Legendre in cos(theta) x 2L-point trapezoid
/// in phi; exact for spherical polynomials of degree <= 2L - 1.
SphereQuadrature sphere_quadrature(int L);

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

/// Single vector spherical harmonic in Cartesian components (n >= 1).
Vec3c vsh(VshBasis basis, int n, int m, double theta, double phi, double R);

// All U, V modes with 1 <= n <= N at one point, laid out per
// TangentialSpectrum::index.
struct ModeBasis {
  std::vector<Vec3c> U, V;
};
ModeBasis eval_modes(int N, double theta, double phi, double R);

/// Local spherical frame at (theta, phi).
void sphere_frame(double theta, double phi, Vec3& e_rho, Vec3& e_theta,
                  Vec3& e_phi);

using TangentSampler = std::function<Vec3c(double theta, double phi)>;

/// Forward transform: phi1 = <f, U_n^m>, phi2 = <f, V_n^m> over Gamma_R.
/// Throws if the sampler is not tangential at some quadrature node.
TangentialSpectrum analyze(const TangentSampler& field, int N, double R,
                           const SphereQuadrature& quad,
                           bool check_tangential = true);

/// Inverse transform at a point.
Vec3c synthesize(const TangentialSpectrum& S, double theta, double phi);

/// Coefficients of div_Gamma(S) against X_n^m: c_n^m = -sqrt(n(n+1)) phi1.
std::vector<cplx> surface_div_spectrum(const TangentialSpectrum& S);

/// Evaluate a scalar X_n^m-spectrum (laid out per TangentialSpectrum::index).
cplx synthesize_scalar(const std::vector<cplx>& coeffs, int N, double R,
                       double theta, double phi);

// Differential identities of separable radial fields f(rho) A_n^m.
enum class RadialIdentity {
  curlU, curlV, curlX,
  curlcurlU, curlcurlV, curlcurlX,
  divU, divV, divX
};

struct RadialProfile {
  std::function<double(double)> f, df, d2f;
};

/// |FD differential of f(rho) A_n^m  -  closed-form right side| at a point.
double radial_identity_residual(RadialIdentity id, const RadialProfile& prof,
                                int n, int m, double rho, double theta,
                                double phi, double fd_step = 1e-4);

}  // namespace emadapt
