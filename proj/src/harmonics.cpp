#include "emadapt/harmonics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace emadapt {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton from the Chebyshev-like initial guess
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0, p1;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    p0 = 1.0;
    p1 = t;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

SphereQuadrature sphere_quadrature(int L) {
  if (L < 1) throw std::domain_error("sphere_quadrature: L >= 1");
  std::vector<double> gx, gw;
  gauss_legendre(L, gx, gw);
  SphereQuadrature quad;
  quad.order = 2 * L - 1;
  const int nphi = 2 * L;
  const double wphi = 2.0 * M_PI / nphi;
  quad.nodes.reserve(static_cast<std::size_t>(L) * nphi);
  for (int i = 0; i < L; ++i) {
    const double theta = std::acos(gx[i]);
    for (int j = 0; j < nphi; ++j)
      quad.nodes.push_back({theta, 2.0 * M_PI * j / nphi, gw[i] * wphi});
  }
  return quad;
}

void sphere_frame(double theta, double phi, Vec3& e_rho, Vec3& e_theta,
                  Vec3& e_phi) {
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  e_rho = Vec3(st * cp, st * sp, ct);
  e_theta = Vec3(ct * cp, ct * sp, -st);
  e_phi = Vec3(-sp, cp, 0.0);
}

ModeBasis eval_modes(int N, double theta, double phi, double R) {
  if (N < 1) throw std::domain_error("eval_modes: N >= 1");
  ModeBasis basis;
  const std::size_t nm = TangentialSpectrum::num_modes(N);
  basis.U.resize(nm);
  basis.V.resize(nm);
  const auto tab = legendre_table(N, theta);
  Vec3 er, et, ep;
  sphere_frame(theta, phi, er, et, ep);
  const cplx i(0.0, 1.0);
  for (int n = 1; n <= N; ++n) {
    const double scale = 1.0 / (std::sqrt(double(n) * (n + 1)) * R);
    for (int m = -n; m <= n; ++m) {
      const int am = std::abs(m);
      const std::size_t li = LegendreTable::idx(n, am);
      const cplx eimp = std::exp(cplx(0.0, m * phi));
      const cplx utheta = tab.dp[li] * eimp * scale;
      const double sgn = (m >= 0) ? 1.0 : -1.0;
      const cplx uphi = i * sgn * tab.p_sin[li] * eimp * scale;
      const std::size_t k = TangentialSpectrum::index(n, m);
      Vec3c U = utheta * et.cast<cplx>() + uphi * ep.cast<cplx>();
      basis.U[k] = U;
      basis.V[k] = utheta * ep.cast<cplx>() - uphi * et.cast<cplx>();
    }
  }
  return basis;
}

Vec3c vsh(VshBasis basis, int n, int m, double theta, double phi, double R) {
  if (n < 1) throw std::domain_error("vsh: degenerate mode n = 0");
  if (std::abs(m) > n) throw std::domain_error("vsh: |m| <= n required");
  auto mb = eval_modes(n, theta, phi, R);
  const std::size_t k = TangentialSpectrum::index(n, m);
  return basis == VshBasis::U ? mb.U[k] : mb.V[k];
}

TangentialSpectrum analyze(const TangentSampler& field, int N, double R,
                           const SphereQuadrature& quad,
                           bool check_tangential) {
  TangentialSpectrum S(N, R);
  double worst_normal = 0.0;
  double field_scale = 0.0;
  SphereQuadrature::Node worst_node{0, 0, 0};
  for (const auto& node : quad.nodes) {
    const Vec3c f = field(node.theta, node.phi);
    Vec3 er, et, ep;
    sphere_frame(node.theta, node.phi, er, et, ep);
    const double normal = std::abs(f.dot(er.cast<cplx>()));
    field_scale = std::max(field_scale, f.norm());
    if (normal > worst_normal) {
      worst_normal = normal;
      worst_node = node;
    }
    const double w = node.weight * R * R;  // ds on Gamma_R
    const auto mb = eval_modes(N, node.theta, node.phi, R);
    for (std::size_t k = 0; k < S.phi1.size(); ++k) {
      // Eigen's a.dot(b) = conj(a)^T b, so this is the inner product <f, U>
      S.phi1[k] += w * mb.U[k].dot(f);
      S.phi2[k] += w * mb.V[k].dot(f);
    }
  }
  if (check_tangential && worst_normal > 1e-10 * std::max(1.0, field_scale))
    throw std::invalid_argument(
        "analyze: sampler is not tangential, worst |f.e_rho| = " +
        std::to_string(worst_normal) + " at theta = " +
        std::to_string(worst_node.theta) + ", phi = " +
        std::to_string(worst_node.phi));
  return S;
}

Vec3c synthesize(const TangentialSpectrum& S, double theta, double phi) {
  if (S.N < 1) return Vec3c::Zero();
  const auto mb = eval_modes(S.N, theta, phi, S.R);
  Vec3c out = Vec3c::Zero();
  for (std::size_t k = 0; k < S.phi1.size(); ++k)
    out += S.phi1[k] * mb.U[k] + S.phi2[k] * mb.V[k];
  return out;
}

std::vector<cplx> surface_div_spectrum(const TangentialSpectrum& S) {
  std::vector<cplx> c(S.phi1.size(), cplx(0));
  for (int n = 1; n <= S.N; ++n) {
    const double factor = -std::sqrt(double(n) * (n + 1));
    for (int m = -n; m <= n; ++m) {
      const std::size_t k = TangentialSpectrum::index(n, m);
      c[k] = factor * S.phi1[k];
    }
  }
  return c;
}

cplx synthesize_scalar(const std::vector<cplx>& coeffs, int N, double R,
                       double theta, double phi) {
  cplx out(0);
  if (N < 1) return out;
  const auto tab = legendre_table(N, theta);
  for (int n = 1; n <= N; ++n)
    for (int m = -n; m <= n; ++m) {
      const std::size_t k = TangentialSpectrum::index(n, m);
      const cplx X = tab.p[LegendreTable::idx(n, std::abs(m))] *
                     std::exp(cplx(0.0, m * phi)) / R;
      out += coeffs[k] * X;
    }
  return out;
}

namespace {

// f(rho) * basis at a Cartesian point; basis in {U, V, X e_rho} with R = 1.
Vec3c radial_field(RadialIdentity id, const RadialProfile& prof, int n, int m,
                   const Vec3& x) {
  const double rho = x.norm();
  const double theta = std::acos(std::clamp(x.z() / rho, -1.0, 1.0));
  const double phi = std::atan2(x.y(), x.x());
  const double f = prof.f(rho);
  Vec3 er, et, ep;
  sphere_frame(theta, phi, er, et, ep);
  switch (id) {
    case RadialIdentity::curlU:
    case RadialIdentity::curlcurlU:
    case RadialIdentity::divU:
      return f * vsh(VshBasis::U, n, m, theta, phi, 1.0);
    case RadialIdentity::curlV:
    case RadialIdentity::curlcurlV:
    case RadialIdentity::divV:
      return f * vsh(VshBasis::V, n, m, theta, phi, 1.0);
    default:
      return f * scalar_harmonic(n, m, theta, phi, 1.0) * er.cast<cplx>();
  }
}

// 4th-order central difference of A along coordinate j
Vec3c fd_partial(const std::function<Vec3c(const Vec3&)>& A, const Vec3& x,
                 int j, double h) {
  Vec3 e = Vec3::Zero();
  e[j] = h;
  return (-A(x + 2.0 * e) + 8.0 * A(x + e) - 8.0 * A(x - e) + A(x - 2.0 * e)) /
         (12.0 * h);
}

Vec3c fd_curl(const std::function<Vec3c(const Vec3&)>& A, const Vec3& x,
              double h) {
  Vec3c d[3];
  for (int j = 0; j < 3; ++j) d[j] = fd_partial(A, x, j, h);
  return Vec3c(d[1][2] - d[2][1], d[2][0] - d[0][2], d[0][1] - d[1][0]);
}

cplx fd_div(const std::function<Vec3c(const Vec3&)>& A, const Vec3& x,
            double h) {
  cplx out(0);
  for (int j = 0; j < 3; ++j) out += fd_partial(A, x, j, h)[j];
  return out;
}

}  // namespace

double radial_identity_residual(RadialIdentity id, const RadialProfile& prof,
                                int n, int m, double rho, double theta,
                                double phi, double fd_step) {
  Vec3 er, et, ep;
  sphere_frame(theta, phi, er, et, ep);
  const Vec3 x = rho * er;
  auto A = [&](const Vec3& p) { return radial_field(id, prof, n, m, p); };

  const double f = prof.f(rho), df = prof.df(rho), d2f = prof.d2f(rho);
  const double nn = std::sqrt(double(n) * (n + 1));
  const Vec3c U = vsh(VshBasis::U, n, m, theta, phi, 1.0);
  const Vec3c V = vsh(VshBasis::V, n, m, theta, phi, 1.0);
  const Vec3c Xer = scalar_harmonic(n, m, theta, phi, 1.0) * er.cast<cplx>();
  const double drf = f + rho * df;          // (rho f)'
  const double d2rf = 2.0 * df + rho * d2f; // (rho f)''

  switch (id) {
    case RadialIdentity::curlU:
      return (fd_curl(A, x, fd_step) - (drf / rho) * V).norm();
    case RadialIdentity::curlV:
      return (fd_curl(A, x, fd_step) + (drf / rho) * U + (nn / rho) * f * Xer)
          .norm();
    case RadialIdentity::curlX:
      return (fd_curl(A, x, fd_step) + (nn / rho) * f * V).norm();
    case RadialIdentity::curlcurlU: {
      auto C = [&](const Vec3& p) { return fd_curl(A, p, fd_step); };
      const Vec3c lhs = fd_curl(C, x, fd_step);
      return (lhs + (d2rf / rho) * U + (nn / (rho * rho)) * drf * Xer).norm();
    }
    case RadialIdentity::curlcurlV: {
      auto C = [&](const Vec3& p) { return fd_curl(A, p, fd_step); };
      const Vec3c lhs = fd_curl(C, x, fd_step);
      return (lhs -
              (-d2rf / rho + double(n) * (n + 1) / (rho * rho) * f) * V)
          .norm();
    }
    case RadialIdentity::curlcurlX: {
      auto C = [&](const Vec3& p) { return fd_curl(A, p, fd_step); };
      const Vec3c lhs = fd_curl(C, x, fd_step);
      return (lhs - (nn / rho) * df * U -
              double(n) * (n + 1) / (rho * rho) * f * Xer)
          .norm();
    }
    case RadialIdentity::divU: {
      const cplx X = scalar_harmonic(n, m, theta, phi, 1.0);
      return std::abs(fd_div(A, x, fd_step) + nn * f / rho * X);
    }
    case RadialIdentity::divV:
      return std::abs(fd_div(A, x, fd_step));
    case RadialIdentity::divX: {
      const cplx X = scalar_harmonic(n, m, theta, phi, 1.0);
      const double drho2f = 2.0 * rho * f + rho * rho * df;  // (rho^2 f)'
      return std::abs(fd_div(A, x, fd_step) - drho2f / (rho * rho) * X);
    }
  }
  return 0.0;
}

}  // namespace emadapt
