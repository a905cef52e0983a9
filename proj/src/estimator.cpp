#include "emadapt/estimator.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace emadapt {

namespace {

// bilinear cross product (Eigen's cross() conjugates complex operands)
Vec3c cross_cr(const Vec3c& a, const Vec3& b) {
  return Vec3c(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2),
               a(0) * b(1) - a(1) * b(0));
}

cplx dot_cr(const Vec3c& a, const Vec3& b) {
  return a(0) * b(0) + a(1) * b(1) + a(2) * b(2);
}

}  // namespace

EstimatorReport compute_indicators(const FieldSolution& sol,
                                   const WaveParams& w, const DtnFactors& F,
                                   const TangentialSpectrum& f_spectrum,
                                   int quad_order,
                                   const BoundarySpectra* traces) {
  if (!sol.mesh || !sol.dofs)
    throw std::invalid_argument("compute_indicators: unbound solution");
  const Mesh& m = *sol.mesh;
  const DofMap& dofs = *sol.dofs;
  if (f_spectrum.N > 0 && f_spectrum.N < F.N)
    throw std::invalid_argument(
        "compute_indicators: boundary source degree below the DtN degree");

  const std::size_t nt = m.n_tets();
  EstimatorReport rep;
  rep.eta.assign(nt, 0.0);
  rep.element_term.assign(nt, 0.0);
  rep.interior_term.assign(nt, 0.0);
  rep.boundary_term.assign(nt, 0.0);

  // constant curl per tet; element residual R1 = kappa^2 E_h (the curl of
  // the constant curl vanishes for the lowest order) and R2 = 0 (Whitney
  // fields a + b x x are divergence free)
  std::vector<Vec3c> curls(nt);
  const double k2 = w.kappa * w.kappa;
  Eigen::Matrix<double, 6, 6> K, M;
  for (std::size_t t = 0; t < nt; ++t) {
    curls[t] = sol.eval_curl(t);
    const auto& tet = m.tets[t];
    element_matrices({m.vertices[tet[0]], m.vertices[tet[1]],
                      m.vertices[tet[2]], m.vertices[tet[3]]},
                     K, M);
    Eigen::Matrix<cplx, 6, 1> c;
    for (int e = 0; e < 6; ++e)
      c[e] = dofs.tet_signs[t][e] * sol.coeffs[dofs.tet_edges[t][e]];
    const double l2sq = (c.adjoint() * M.cast<cplx>() * c)(0, 0).real();
    rep.element_term[t] = k2 * k2 * l2sq;
  }

  std::map<FaceKey, std::vector<int>> face_tets;
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tet = m.tets[t];
    face_tets[make_face(tet[0], tet[1], tet[2])].push_back(static_cast<int>(t));
    face_tets[make_face(tet[0], tet[1], tet[3])].push_back(static_cast<int>(t));
    face_tets[make_face(tet[0], tet[2], tet[3])].push_back(static_cast<int>(t));
    face_tets[make_face(tet[1], tet[2], tet[3])].push_back(static_cast<int>(t));
  }

  const TriQuadrature fquad = triangle_quadrature(std::max(quad_order, 4));
  for (const auto& [f, tets] : face_tets) {
    if (tets.size() != 2) continue;
    const std::array<Vec3, 3> q = {m.vertices[f[0]], m.vertices[f[1]],
                                   m.vertices[f[2]]};
    const Vec3 cross = (q[1] - q[0]).cross(q[2] - q[0]);
    const double area = 0.5 * cross.norm();
    const Vec3 nu = cross.normalized();

    const Vec3c dcurl = curls[tets[0]] - curls[tets[1]];
    const Vec3c j1 = cross_cr(dcurl, nu);
    const double j1_sq = area * j1.squaredNorm();

    double j2_sq = 0.0;
    for (std::size_t p = 0; p < fquad.bary.size(); ++p) {
      Vec3 x = Vec3::Zero();
      for (int i = 0; i < 3; ++i) x += fquad.bary[p][i] * q[i];
      const cplx jump =
          dot_cr(sol.eval(tets[0], x) - sol.eval(tets[1], x), nu);
      j2_sq += fquad.weight[p] * area * k2 * k2 * std::norm(jump);
    }
    rep.interior_term[tets[0]] += j1_sq + j2_sq;
    rep.interior_term[tets[1]] += j1_sq + j2_sq;
  }

  // sphere boundary: spectral TBC residual terms from the global trace
  bool have_sphere = false;
  for (const auto& [f, tag] : m.boundary_faces)
    if (tag == BoundaryTag::sphere) have_sphere = true;
  if (have_sphere) {
    BoundarySpectra local;
    if (!traces) {
      local = boundary_trace_spectra(m, dofs, F.N, w.R);
      traces = &local;
    }
    if (traces->N < F.N)
      throw std::invalid_argument(
          "compute_indicators: trace spectra degree below the DtN degree");

    TangentialSpectrum TS(F.N, w.R);
    if (F.N > 0) {
      const auto ns = static_cast<Eigen::Index>(traces->sphere_edges.size());
      const auto nm = static_cast<Eigen::Index>(
          TangentialSpectrum::num_modes(F.N));
      Eigen::VectorXcd c(ns);
      for (Eigen::Index r = 0; r < ns; ++r)
        c[r] = sol.coeffs[traces->sphere_edges[static_cast<std::size_t>(r)]];
      const Eigen::VectorXcd s1 =
          traces->P1.leftCols(nm).transpose() * c;
      const Eigen::VectorXcd s2 =
          traces->P2.leftCols(nm).transpose() * c;
      TangentialSpectrum SEh(F.N, w.R);
      for (Eigen::Index i = 0; i < nm; ++i) {
        SEh.phi1[static_cast<std::size_t>(i)] = s1[i];
        SEh.phi2[static_cast<std::size_t>(i)] = s2[i];
      }
      TS = apply_dtn(F, SEh);
    }
    const std::vector<cplx> divT = surface_div_spectrum(TS);
    const std::vector<cplx> divf = surface_div_spectrum(f_spectrum);

    const TriQuadrature bquad =
        triangle_quadrature(std::max(quad_order, 2 * F.N + 2));
    const cplx ik(0.0, w.kappa);
    for (const auto& [f, tag] : m.boundary_faces) {
      if (tag != BoundaryTag::sphere) continue;
      const int t = face_tets.at(f).front();
      const std::array<Vec3, 3> q = {m.vertices[f[0]], m.vertices[f[1]],
                                     m.vertices[f[2]]};
      const Vec3 cross = (q[1] - q[0]).cross(q[2] - q[0]);
      const double area = 0.5 * cross.norm();
      Vec3 nu = cross.normalized();
      if (nu.dot(q[0] + q[1] + q[2]) < 0.0) nu = -nu;  // outward

      double j_sq = 0.0;
      for (std::size_t p = 0; p < bquad.bary.size(); ++p) {
        Vec3 x = Vec3::Zero();
        for (int i = 0; i < 3; ++i) x += bquad.bary[p][i] * q[i];
        const Vec3 e_rho = x.normalized();
        const double theta = std::acos(std::clamp(e_rho.z(), -1.0, 1.0));
        const double phi = std::atan2(e_rho.y(), e_rho.x());

        Vec3c J1 = -cross_cr(curls[static_cast<std::size_t>(t)], nu);
        if (F.N > 0) J1 += ik * synthesize(TS, theta, phi);
        if (f_spectrum.N > 0) J1 += synthesize(f_spectrum, theta, phi);
        J1 *= 2.0;

        cplx J2 = k2 * dot_cr(sol.eval(static_cast<std::size_t>(t), x), nu);
        if (F.N > 0)
          J2 -= ik * synthesize_scalar(divT, F.N, w.R, theta, phi);
        if (f_spectrum.N > 0)
          J2 -= synthesize_scalar(divf, f_spectrum.N, w.R, theta, phi);
        J2 *= 2.0;

        j_sq += bquad.weight[p] * area *
                (J1.squaredNorm() + std::norm(J2));
      }
      rep.boundary_term[static_cast<std::size_t>(t)] += j_sq;
    }
  }

  double total = 0.0;
  for (std::size_t t = 0; t < nt; ++t) {
    const double h = tet_diameter(m, t);
    const double eta_sq =
        h * h * rep.element_term[t] +
        h * (rep.interior_term[t] + rep.boundary_term[t]);
    rep.eta[t] = std::sqrt(eta_sq);
    total += eta_sq;
  }
  rep.eps_h = std::sqrt(total);
  rep.eps_N = (f_spectrum.N > 0)
                  ? truncation_indicator(w, F.N,
                                         th_norm(f_spectrum,
                                                 TraceNorm::div_half()))
                  : 0.0;
  return rep;
}

MarkResult mark_elements(const EstimatorReport& report, double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("mark_elements: theta must be in (0, 1)");
  if (report.eta.empty())
    throw std::invalid_argument("mark_elements: empty report");
  double max_eta = 0.0;
  for (double e : report.eta) max_eta = std::max(max_eta, e);
  MarkResult out;
  if (max_eta == 0.0) {
    out.converged = true;
    return out;
  }
  for (std::size_t t = 0; t < report.eta.size(); ++t)
    if (report.eta[t] > theta * max_eta)
      out.marked.push_back(static_cast<int>(t));
  return out;
}

}  // namespace emadapt
