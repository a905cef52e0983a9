#include "emadapt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

namespace emadapt {

namespace {

constexpr double kFourPi = 4.0 * M_PI;

void to_spherical(const Vec3& x, double& rho, double& theta, double& phi) {
  rho = x.norm();
  theta = std::acos(std::clamp(x.z() / rho, -1.0, 1.0));
  phi = std::atan2(x.y(), x.x());
}

// adaptive composite 16-point Gauss-Legendre quadrature
cplx integrate(const std::function<cplx(double)>& f, double a, double b) {
  if (a == b) return cplx(0.0);
  static const auto rule = [] {
    std::pair<std::vector<double>, std::vector<double>> r;
    gauss_legendre(16, r.first, r.second);
    return r;
  }();
  const auto& gx = rule.first;
  const auto& gw = rule.second;

  cplx prev(0.0);
  for (int panels = 1; panels <= 512; panels *= 2) {
    cplx acc(0.0);
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double c = a + (p + 0.5) * h;
      for (int i = 0; i < 16; ++i)
        acc += 0.5 * h * gw[i] * f(c + 0.5 * h * gx[i]);
    }
    if (panels > 1 && std::abs(acc - prev) <= 1e-12 * std::max(1.0, std::abs(acc)))
      return acc;
    prev = acc;
  }
  throw std::runtime_error("integrate: quadrature did not converge");
}

}  // namespace

FieldSampler point_source_field(double kappa, const Vec3& y) {
  const cplx ik(0.0, kappa);
  auto hessian_phi = [=](const Vec3& x) {
    const Vec3 d = x - y;
    const double r = d.norm();
    if (r < 1e-12)
      throw std::domain_error("point_source_field: evaluation at the source");
    const Vec3 rh = d / r;
    const cplx phi = std::exp(ik * r) / (kFourPi * r);
    const cplx dphi = (ik - 1.0 / r) * phi;
    const cplx d2phi = ((ik - 1.0 / r) * (ik - 1.0 / r) + 1.0 / (r * r)) * phi;
    return std::tuple<cplx, cplx, cplx, Vec3>(phi, dphi, d2phi, rh);
  };
  FieldSampler F;
  F.value = [=](const Vec3& x) {
    auto [phi, dphi, d2phi, rh] = hessian_phi(x);
    // E = G + kappa^{-2} grad(dPhi/dz), G = (0, 0, Phi)
    Vec3c E(cplx(0.0), cplx(0.0), phi);
    for (int i = 0; i < 3; ++i) {
      const double delta = (i == 2) ? 1.0 : 0.0;
      const cplx hess_iz =
          d2phi * rh(i) * rh(2) + dphi * (delta - rh(i) * rh(2)) / (x - y).norm();
      E(i) += hess_iz / (kappa * kappa);
    }
    return E;
  };
  F.curl = [=](const Vec3& x) {
    auto [phi, dphi, d2phi, rh] = hessian_phi(x);
    (void)phi;
    (void)d2phi;
    // curl E = curl G = (dPhi/dy, -dPhi/dx, 0)
    return Vec3c(dphi * rh(1), -dphi * rh(0), cplx(0.0));
  };
  return F;
}

FieldSampler radiating_mode_field(int n, int m, double kappa,
                                  ModeBranch branch) {
  if (n < 1) throw std::domain_error("radiating_mode_field: n >= 1");
  if (std::abs(m) > n)
    throw std::domain_error("radiating_mode_field: |m| <= n");
  const double nn = std::sqrt(double(n) * (n + 1));

  // common radial/angular data at a point
  struct Local {
    double rho;
    cplx h, drhoh;  // h_n^{(1)}(kappa rho) and its rho-derivative
    Vec3c U, V, Xer;
  };
  auto eval = [=](const Vec3& x) {
    Local L;
    double theta, phi;
    to_spherical(x, L.rho, theta, phi);
    const auto ht = sph_hankel_table(HankelKind::first, n, kappa * L.rho);
    L.h = ht[n];
    const cplx hp = (n == 0 ? -ht[0]
                            : ht[n - 1] - (n + 1.0) / (kappa * L.rho) * ht[n]);
    L.drhoh = kappa * hp;
    const auto mb = eval_modes(n, theta, phi, 1.0);
    const std::size_t k = TangentialSpectrum::index(n, m);
    L.U = mb.U[k];
    L.V = mb.V[k];
    Vec3 er, et, ep;
    sphere_frame(theta, phi, er, et, ep);
    L.Xer = scalar_harmonic(n, m, theta, phi, 1.0) * er.cast<cplx>();
    return L;
  };

  FieldSampler F;
  if (branch == ModeBranch::TE) {
    F.value = [=](const Vec3& x) {
      const Local L = eval(x);
      return Vec3c(L.h * L.V);
    };
    F.curl = [=](const Vec3& x) {
      const Local L = eval(x);
      const cplx drf = (L.h + L.rho * L.drhoh) / L.rho;  // (rho h)'/rho
      return Vec3c(-drf * L.U - (nn / L.rho) * L.h * L.Xer);
    };
  } else {
    F.value = [=](const Vec3& x) {
      const Local L = eval(x);
      const cplx drf = (L.h + L.rho * L.drhoh) / L.rho;
      return Vec3c(-drf * L.U - (nn / L.rho) * L.h * L.Xer);
    };
    F.curl = [=](const Vec3& x) {
      const Local L = eval(x);
      return Vec3c(kappa * kappa * L.h * L.V);
    };
  }
  return F;
}

cplx decay_ratio(int n, double kappa, double R, double Rprime, int component) {
  if (!(0.0 < Rprime && Rprime <= R))
    throw std::domain_error("decay_ratio: need 0 < Rprime <= R");
  const cplx hR = sph_hankel(HankelKind::first, n, kappa * R);
  const cplx hRp = sph_hankel(HankelKind::first, n, kappa * Rprime);
  const cplx ratio2 = hR / hRp;
  if (component == 2) return ratio2;
  if (component != 1)
    throw std::domain_error("decay_ratio: component must be 1 or 2");
  const cplx zR = 1.0 + z_ratio(HankelKind::first, n, kappa * R);
  const cplx zRp = 1.0 + z_ratio(HankelKind::first, n, kappa * Rprime);
  return (Rprime / R) * ratio2 * zR / zRp;
}

FieldSampler plane_wave_field(double kappa, const Vec3& p, const Vec3& q) {
  if (std::abs(q.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("plane_wave_field: |q| must be 1");
  if (std::abs(p.dot(q)) > 1e-12)
    throw std::invalid_argument("plane_wave_field: polarization p.q != 0");
  const cplx ik(0.0, kappa);
  const Vec3 qxp = q.cross(p);
  FieldSampler F;
  F.value = [=](const Vec3& x) {
    return Vec3c(std::exp(ik * q.dot(x)) * p.cast<cplx>());
  };
  F.curl = [=](const Vec3& x) {
    return Vec3c(ik * std::exp(ik * q.dot(x)) * qxp.cast<cplx>());
  };
  return F;
}

cplx DualModeSolution::C_nm(cplx zeta3_at_R) const {
  const cplx z2 = z_ratio(HankelKind::second, n, kappa * R);
  return (1.0 + z2) / z2 * (R / (kappa * kappa)) * zeta3_at_R;
}

cplx DualModeSolution::w1n_at_R(cplx C) const {
  const cplx z2 = z_ratio(HankelKind::second, n, kappa * R);
  const double nn = std::sqrt(double(n) * (n + 1));
  return ((1.0 + z2) * v(R) - C) / (nn * R);
}

DualModeSolution dual_ode_solve(int n, double kappa, double R, double Rprime,
                                const std::function<cplx(double)>& xi,
                                cplx v_at_Rprime) {
  if (!(0.0 < Rprime && Rprime < R))
    throw std::domain_error("dual_ode_solve: need 0 < Rprime < R");
  if (n < 1) throw std::domain_error("dual_ode_solve: n >= 1");

  DualModeSolution sol;
  sol.n = n;
  sol.kappa = kappa;
  sol.R = R;
  sol.Rprime = Rprime;

  const cplx h2Rp = sph_hankel(HankelKind::second, n, kappa * Rprime);
  auto S = [=](double rho) {
    return sph_hankel(HankelKind::second, n, kappa * rho) / h2Rp;
  };
  // W = h1(a)h2(b) - h2(a)h1(b) = -2i (j(a)y(b) - j(b)y(a)); the j/y form
  // avoids the catastrophic cancellation of the huge y*y products
  auto W = [=](double rho, double t) {
    const double a = kappa * rho, b = kappa * t;
    const double ja = sph_bessel_j(n, a), jb = sph_bessel_j(n, b);
    const double ya = sph_hankel(HankelKind::first, n, a).imag();
    const double yb = sph_hankel(HankelKind::first, n, b).imag();
    return cplx(0.0, -2.0) * (ja * yb - jb * ya);
  };
  sol.S = S;
  sol.W = W;

  const cplx ik2(0.0, 0.5 * kappa);
  cplx tail(0.0);
  if (xi) tail = integrate([&](double t) { return t * t * S(t) * xi(t); },
                           Rprime, R);
  auto xi_copy = xi;
  sol.v = [=](double rho) {
    cplx val = S(rho) * v_at_Rprime;
    if (xi_copy) {
      const cplx head = integrate(
          [&](double t) { return t * t * W(rho, t) * xi_copy(t); }, Rprime,
          rho);
      val += ik2 * head + ik2 * W(Rprime, rho) * tail;
    }
    return val;
  };
  return sol;
}

}  // namespace emadapt
