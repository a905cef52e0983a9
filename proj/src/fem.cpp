#include "emadapt/fem.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace emadapt {

namespace {

int ascending_sign(const std::array<int, 4>& tet, int local_a, int local_b) {
  return tet[local_a] < tet[local_b] ? 1 : -1;
}

}  // namespace

std::vector<int> DofMap::sphere_dofs() const {
  std::vector<int> out;
  for (std::size_t e = 0; e < on_sphere.size(); ++e)
    if (on_sphere[e]) out.push_back(static_cast<int>(e));
  return out;
}

DofMap build_dof_map(const Mesh& m) {
  DofMap dofs;
  std::map<EdgeKey, int> index;
  for (const auto& tet : m.tets)
    for (const auto& le : kTetEdgeVerts)
      index.emplace(make_edge(tet[le[0]], tet[le[1]]), 0);
  dofs.edges.reserve(index.size());
  for (auto& [key, id] : index) {
    id = static_cast<int>(dofs.edges.size());
    dofs.edges.push_back(key);
  }
  dofs.tet_edges.resize(m.n_tets());
  dofs.tet_signs.resize(m.n_tets());
  for (std::size_t t = 0; t < m.n_tets(); ++t)
    for (int e = 0; e < 6; ++e) {
      const auto& le = kTetEdgeVerts[e];
      dofs.tet_edges[t][e] =
          index.at(make_edge(m.tets[t][le[0]], m.tets[t][le[1]]));
      dofs.tet_signs[t][e] = ascending_sign(m.tets[t], le[0], le[1]);
    }
  dofs.dirichlet.assign(dofs.edges.size(), 0);
  dofs.on_sphere.assign(dofs.edges.size(), 0);
  for (const auto& [f, tag] : m.boundary_faces) {
    auto& flags =
        (tag == BoundaryTag::obstacle) ? dofs.dirichlet : dofs.on_sphere;
    flags[index.at(make_edge(f[0], f[1]))] = 1;
    flags[index.at(make_edge(f[0], f[2]))] = 1;
    flags[index.at(make_edge(f[1], f[2]))] = 1;
  }
  return dofs;
}

std::array<double, 4> WhitneyBasis::barycentric(const Vec3& x) const {
  std::array<double, 4> lam;
  lam[0] = 1.0;
  for (int i = 1; i < 4; ++i) {
    lam[i] = grad[i].dot(x - p[0]);
    lam[0] -= lam[i];
  }
  return lam;
}

Vec3 WhitneyBasis::value(int e, const Vec3& x) const {
  const auto lam = barycentric(x);
  const int a = kTetEdgeVerts[e][0], b = kTetEdgeVerts[e][1];
  return lam[a] * grad[b] - lam[b] * grad[a];
}

Vec3 WhitneyBasis::curl(int e) const {
  const int a = kTetEdgeVerts[e][0], b = kTetEdgeVerts[e][1];
  return 2.0 * grad[a].cross(grad[b]);
}

WhitneyBasis whitney_basis(const std::array<Vec3, 4>& p) {
  WhitneyBasis w;
  w.p = p;
  Eigen::Matrix3d T;
  for (int i = 0; i < 3; ++i) T.col(i) = p[i + 1] - p[0];
  const double det = T.determinant();
  double scale = 0.0;
  for (int i = 0; i < 3; ++i) scale = std::max(scale, T.col(i).norm());
  if (std::abs(det) <= 1e-14 * scale * scale * scale)
    throw std::invalid_argument("whitney_basis: degenerate tet");
  w.volume = std::abs(det) / 6.0;
  const Eigen::Matrix3d Tinv = T.inverse();
  w.grad[0] = Vec3::Zero();
  for (int i = 1; i < 4; ++i) {
    w.grad[i] = Tinv.row(i - 1);
    w.grad[0] -= w.grad[i];
  }
  return w;
}

void element_matrices(const std::array<Vec3, 4>& p,
                      Eigen::Matrix<double, 6, 6>& K,
                      Eigen::Matrix<double, 6, 6>& M) {
  const WhitneyBasis w = whitney_basis(p);
  for (int e = 0; e < 6; ++e)
    for (int f = e; f < 6; ++f) {
      K(e, f) = w.volume * w.curl(e).dot(w.curl(f));
      K(f, e) = K(e, f);
    }
  // 4-point degree-2 rule, exact for the quadratic integrand
  const double a = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0;
  const double b = (5.0 - std::sqrt(5.0)) / 20.0;
  M.setZero();
  for (int q = 0; q < 4; ++q) {
    std::array<double, 4> lam = {b, b, b, b};
    lam[q] = a;
    Vec3 x = Vec3::Zero();
    for (int i = 0; i < 4; ++i) x += lam[i] * w.p[i];
    std::array<Vec3, 6> vals;
    for (int e = 0; e < 6; ++e) vals[e] = w.value(e, x);
    for (int e = 0; e < 6; ++e)
      for (int f = e; f < 6; ++f) {
        M(e, f) += 0.25 * w.volume * vals[e].dot(vals[f]);
        M(f, e) = M(e, f);
      }
  }
}

TriQuadrature triangle_quadrature(int order) {
  if (order < 1) throw std::invalid_argument("triangle_quadrature: order < 1");
  const int n = (order + 3) / 2;
  std::vector<double> x, wt;
  gauss_legendre(n, x, wt);
  TriQuadrature q;
  // collapsed coordinates: l1 = u, l2 = (1-u) v, l0 = rest, Jacobian (1-u)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = 0.5 * (x[i] + 1.0), v = 0.5 * (x[j] + 1.0);
      const double l1 = u, l2 = (1.0 - u) * v;
      q.bary.push_back({1.0 - l1 - l2, l1, l2});
      q.weight.push_back(0.25 * wt[i] * wt[j] * (1.0 - u) * 2.0);
    }
  return q;
}

TetQuadrature tet_quadrature(int order) {
  if (order < 1) throw std::invalid_argument("tet_quadrature: order < 1");
  const int n = (order + 4) / 2;
  std::vector<double> x, wt;
  gauss_legendre(n, x, wt);
  TetQuadrature q;
  // l1 = u, l2 = (1-u) v, l3 = (1-u)(1-v) w, Jacobian (1-u)^2 (1-v)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double u = 0.5 * (x[i] + 1.0), v = 0.5 * (x[j] + 1.0),
                     w = 0.5 * (x[k] + 1.0);
        const double l1 = u, l2 = (1.0 - u) * v,
                     l3 = (1.0 - u) * (1.0 - v) * w;
        q.bary.push_back({1.0 - l1 - l2 - l3, l1, l2, l3});
        q.weight.push_back(0.125 * wt[i] * wt[j] * wt[k] *
                           (1.0 - u) * (1.0 - u) * (1.0 - v) * 6.0);
      }
  return q;
}

BoundarySpectra boundary_trace_spectra(const Mesh& m, const DofMap& dofs,
                                       int N, double R, int quad_order) {
  if (N < 0) throw std::invalid_argument("boundary_trace_spectra: N < 0");
  if (R <= 0.0) throw std::invalid_argument("boundary_trace_spectra: R <= 0");
  if (quad_order == 0) quad_order = std::max(4, 2 * N + 2);
  if (quad_order < 2 * N + 2)
    throw std::invalid_argument(
        "boundary_trace_spectra: quadrature order below 2N+2");

  BoundarySpectra S;
  S.N = N;
  S.R = R;
  S.sphere_edges = dofs.sphere_dofs();
  const auto n_modes = static_cast<Eigen::Index>(
      TangentialSpectrum::num_modes(N));
  const auto n_rows = static_cast<Eigen::Index>(S.sphere_edges.size());
  S.P1 = Eigen::MatrixXcd::Zero(n_rows, n_modes);
  S.P2 = Eigen::MatrixXcd::Zero(n_rows, n_modes);
  if (N == 0 || n_rows == 0) return S;

  std::map<EdgeKey, int> row_of;
  for (std::size_t r = 0; r < S.sphere_edges.size(); ++r)
    row_of.emplace(dofs.edges[static_cast<std::size_t>(S.sphere_edges[r])],
                   static_cast<int>(r));

  const TriQuadrature quad = triangle_quadrature(quad_order);
  for (const auto& [f, tag] : m.boundary_faces) {
    if (tag != BoundaryTag::sphere) continue;
    // order corners by coordinates so the (asymmetric) collapsed quadrature
    // rule is independent of the vertex numbering
    std::array<int, 3> fi = {f[0], f[1], f[2]};
    std::sort(fi.begin(), fi.end(), [&](int a, int b) {
      const Vec3 &pa = m.vertices[a], &pb = m.vertices[b];
      if (pa.x() != pb.x()) return pa.x() < pb.x();
      if (pa.y() != pb.y()) return pa.y() < pb.y();
      return pa.z() < pb.z();
    });
    const std::array<Vec3, 3> q = {m.vertices[fi[0]], m.vertices[fi[1]],
                                   m.vertices[fi[2]]};
    const Vec3 cross = (q[1] - q[0]).cross(q[2] - q[0]);
    const double area = 0.5 * cross.norm();
    Vec3 n_out = cross.normalized();
    if (n_out.dot(q[0] + q[1] + q[2]) < 0.0) n_out = -n_out;
    std::array<Vec3, 3> grad;  // in-plane barycentric gradients
    for (int i = 0; i < 3; ++i) {
      grad[i] = n_out.cross(q[(i + 2) % 3] - q[(i + 1) % 3]) / (2.0 * area);
      if (grad[i].dot(q[i] - q[(i + 1) % 3]) < 0.0) grad[i] = -grad[i];
    }
    const int rows[3] = {row_of.at(make_edge(fi[0], fi[1])),
                         row_of.at(make_edge(fi[0], fi[2])),
                         row_of.at(make_edge(fi[1], fi[2]))};
    static constexpr int kFaceEdge[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (std::size_t p = 0; p < quad.bary.size(); ++p) {
      Vec3 x = Vec3::Zero();
      for (int i = 0; i < 3; ++i) x += quad.bary[p][i] * q[i];
      const double r = x.norm();
      const Vec3 e_rho = x / r;
      const double jac = (R / r) * (R / r) * e_rho.dot(n_out);
      const double theta = std::acos(std::clamp(e_rho.z(), -1.0, 1.0));
      const double phi = std::atan2(e_rho.y(), e_rho.x());
      const ModeBasis modes = eval_modes(N, theta, phi, R);
      const double wq = quad.weight[p] * area * jac;
      for (int le = 0; le < 3; ++le) {
        const int u = kFaceEdge[le][0], v = kFaceEdge[le][1];
        // match the ascending-global-index edge orientation
        const double sign = (fi[u] < fi[v]) ? 1.0 : -1.0;
        const Vec3 wval =
            sign * (quad.bary[p][u] * grad[v] - quad.bary[p][v] * grad[u]);
        const Vec3 trace = wval - wval.dot(e_rho) * e_rho;
        const Vec3c tc = trace.cast<cplx>();
        for (Eigen::Index idx = 0; idx < n_modes; ++idx) {
          S.P1(rows[le], idx) += wq * modes.U[static_cast<std::size_t>(idx)]
                                          .dot(tc);
          S.P2(rows[le], idx) += wq * modes.V[static_cast<std::size_t>(idx)]
                                          .dot(tc);
        }
      }
    }
  }
  return S;
}

namespace {

// DtN factor per mode column: the g1 block then the g2 block, each laid out
// per TangentialSpectrum::index.
std::vector<cplx> factor_columns(const DtnFactors& F) {
  const std::size_t M = TangentialSpectrum::num_modes(F.N);
  std::vector<cplx> g(2 * M);
  for (int n = 1; n <= F.N; ++n)
    for (int m = -n; m <= n; ++m) {
      const std::size_t idx = TangentialSpectrum::index(n, m);
      g[idx] = F.g1_at(n);
      g[M + idx] = F.g2_at(n);
    }
  return g;
}

}  // namespace

Eigen::MatrixXcd dtn_coupling_block(const BoundarySpectra& S,
                                    const DtnFactors& F) {
  const auto n_rows = S.P1.rows();
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(n_rows, n_rows);
  if (F.N < 1) return B;
  if (S.N < F.N)
    throw std::invalid_argument("dtn_coupling_block: spectra below F.N");
  const std::vector<cplx> g = factor_columns(F);
  const std::size_t M = TangentialSpectrum::num_modes(F.N);
  Eigen::VectorXcd g1(static_cast<Eigen::Index>(M)),
      g2(static_cast<Eigen::Index>(M));
  for (std::size_t i = 0; i < M; ++i) {
    g1[static_cast<Eigen::Index>(i)] = g[i];
    g2[static_cast<Eigen::Index>(i)] = g[M + i];
  }
  const auto cols = static_cast<Eigen::Index>(M);
  B = S.P1.leftCols(cols).conjugate() * g1.asDiagonal() *
          S.P1.leftCols(cols).transpose() +
      S.P2.leftCols(cols).conjugate() * g2.asDiagonal() *
          S.P2.leftCols(cols).transpose();
  return B;
}

Eigen::VectorXcd interpolate_edge_dofs(
    const Mesh& m, const DofMap& dofs,
    const std::function<Vec3c(const Vec3&)>& field) {
  Eigen::VectorXcd out =
      Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dofs.n_edges()));
  if (!field) return out;
  const double s0 = 0.5 - 0.5 / std::sqrt(3.0);
  const double s1 = 0.5 + 0.5 / std::sqrt(3.0);
  for (std::size_t e = 0; e < dofs.n_edges(); ++e) {
    const Vec3 a = m.vertices[dofs.edges[e][0]];
    const Vec3 b = m.vertices[dofs.edges[e][1]];
    const Vec3c t = (b - a).cast<cplx>();
    // bilinear product, no conjugation: the DOF is the line integral of E.t
    out[static_cast<Eigen::Index>(e)] =
        0.5 * ((field(a + s0 * (b - a)).array() * t.array()).sum() +
               (field(a + s1 * (b - a)).array() * t.array()).sum());
  }
  return out;
}

AssembledSystem assemble(const Mesh& m, const DofMap& dofs,
                         const WaveParams& w, const DtnFactors& F,
                         const TangentialSpectrum& f_spectrum,
                         const std::function<Vec3c(const Vec3&)>&
                             dirichlet_data,
                         int boundary_quad_order, int dense_threshold) {
  validate(w);
  AssembledSystem sys;
  sys.kappa = w.kappa;
  const auto n = static_cast<Eigen::Index>(dofs.n_edges());

  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(m.n_tets() * 36);
  Eigen::Matrix<double, 6, 6> K, M;
  for (std::size_t t = 0; t < m.n_tets(); ++t) {
    const auto& tet = m.tets[t];
    element_matrices({m.vertices[tet[0]], m.vertices[tet[1]],
                      m.vertices[tet[2]], m.vertices[tet[3]]},
                     K, M);
    for (int e = 0; e < 6; ++e)
      for (int f = 0; f < 6; ++f) {
        const double val = dofs.tet_signs[t][e] * dofs.tet_signs[t][f] *
                           (K(e, f) - w.kappa * w.kappa * M(e, f));
        trip.emplace_back(dofs.tet_edges[t][e], dofs.tet_edges[t][f],
                          cplx(val));
      }
  }
  sys.A.resize(n, n);
  sys.A.setFromTriplets(trip.begin(), trip.end());

  sys.traces = boundary_trace_spectra(m, dofs, F.N, w.R, boundary_quad_order);
  sys.g1g2 = factor_columns(F);
  if (static_cast<int>(sys.traces.sphere_edges.size()) <= dense_threshold)
    sys.B = dtn_coupling_block(sys.traces, F);

  sys.rhs = Eigen::VectorXcd::Zero(n);
  if (f_spectrum.N > 0) {
    if (f_spectrum.N > sys.traces.N)
      throw std::invalid_argument(
          "assemble: boundary source has more modes than the trace spectra");
    const auto cols = static_cast<Eigen::Index>(
        TangentialSpectrum::num_modes(f_spectrum.N));
    for (std::size_t r = 0; r < sys.traces.sphere_edges.size(); ++r) {
      cplx acc(0.0);
      for (Eigen::Index idx = 0; idx < cols; ++idx) {
        acc += f_spectrum.phi1[static_cast<std::size_t>(idx)] *
               std::conj(sys.traces.P1(static_cast<Eigen::Index>(r), idx));
        acc += f_spectrum.phi2[static_cast<std::size_t>(idx)] *
               std::conj(sys.traces.P2(static_cast<Eigen::Index>(r), idx));
      }
      sys.rhs[sys.traces.sphere_edges[r]] += acc;
    }
  }

  sys.is_dirichlet.assign(dofs.dirichlet.begin(), dofs.dirichlet.end());
  sys.dirichlet_values = Eigen::VectorXcd::Zero(n);
  if (dirichlet_data) {
    const Eigen::VectorXcd all = interpolate_edge_dofs(m, dofs, dirichlet_data);
    for (Eigen::Index e = 0; e < n; ++e)
      if (sys.is_dirichlet[static_cast<std::size_t>(e)])
        sys.dirichlet_values[e] = all[e];
  }
  return sys;
}

Vec3c FieldSolution::eval(std::size_t t, const Vec3& x) const {
  const auto& tet = mesh->tets[t];
  const WhitneyBasis w = whitney_basis({mesh->vertices[tet[0]],
                                        mesh->vertices[tet[1]],
                                        mesh->vertices[tet[2]],
                                        mesh->vertices[tet[3]]});
  Vec3c out = Vec3c::Zero();
  for (int e = 0; e < 6; ++e)
    out += dofs->tet_signs[t][e] * coeffs[dofs->tet_edges[t][e]] *
           w.value(e, x).cast<cplx>();
  return out;
}

Vec3c FieldSolution::eval_curl(std::size_t t) const {
  const auto& tet = mesh->tets[t];
  const WhitneyBasis w = whitney_basis({mesh->vertices[tet[0]],
                                        mesh->vertices[tet[1]],
                                        mesh->vertices[tet[2]],
                                        mesh->vertices[tet[3]]});
  Vec3c out = Vec3c::Zero();
  for (int e = 0; e < 6; ++e)
    out += dofs->tet_signs[t][e] * coeffs[dofs->tet_edges[t][e]] *
           w.curl(e).cast<cplx>();
  return out;
}

FieldSolution solve(const AssembledSystem& sys, const Mesh& m,
                    const DofMap& dofs) {
  const auto n = static_cast<Eigen::Index>(dofs.n_edges());
  if (sys.A.rows() != n)
    throw std::invalid_argument("solve: system does not match the DofMap");

  std::vector<Eigen::Index> free_index(static_cast<std::size_t>(n), -1);
  std::vector<Eigen::Index> free_list;
  for (Eigen::Index e = 0; e < n; ++e)
    if (!sys.is_dirichlet[static_cast<std::size_t>(e)]) {
      free_index[static_cast<std::size_t>(e)] =
          static_cast<Eigen::Index>(free_list.size());
      free_list.push_back(e);
    }
  const auto nf = static_cast<Eigen::Index>(free_list.size());

  // reduced volume matrix and constrained rhs
  std::vector<Eigen::Triplet<cplx>> trip;
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(nf);
  for (Eigen::Index e = 0; e < nf; ++e) b[e] = sys.rhs[free_list[e]];
  for (int col = 0; col < sys.A.outerSize(); ++col)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(sys.A, col); it; ++it) {
      const Eigen::Index fr = free_index[static_cast<std::size_t>(it.row())];
      if (fr < 0) continue;
      const Eigen::Index fc = free_index[static_cast<std::size_t>(it.col())];
      if (fc >= 0)
        trip.emplace_back(fr, fc, it.value());
      else
        b[fr] -= it.value() * sys.dirichlet_values[it.col()];
    }
  Eigen::SparseMatrix<cplx> Aff(nf, nf);
  Aff.setFromTriplets(trip.begin(), trip.end());

  Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
  lu.compute(Aff);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error(
        "solve: singular factorization (resonance or broken constraints)");

  // DtN boundary block via its low-rank factors: the full matrix is
  // Aff - i kappa conj(P) diag(g) P^T restricted to the free DOFs.
  const auto M2 = static_cast<Eigen::Index>(sys.g1g2.size());
  Eigen::MatrixXcd U, W;
  if (M2 > 0 && !sys.traces.sphere_edges.empty()) {
    const auto M = M2 / 2;
    const auto ns = static_cast<Eigen::Index>(sys.traces.sphere_edges.size());
    U = Eigen::MatrixXcd::Zero(nf, M2);
    W = Eigen::MatrixXcd::Zero(nf, M2);
    const cplx ik(0.0, sys.kappa);
    for (Eigen::Index r = 0; r < ns; ++r) {
      const Eigen::Index fr =
          free_index[static_cast<std::size_t>(
              sys.traces.sphere_edges[static_cast<std::size_t>(r)])];
      if (fr < 0) continue;  // obstacle touching the sphere is excluded
      for (Eigen::Index mu = 0; mu < M; ++mu) {
        U(fr, mu) = -ik * sys.g1g2[static_cast<std::size_t>(mu)] *
                    std::conj(sys.traces.P1(r, mu));
        U(fr, M + mu) = -ik * sys.g1g2[static_cast<std::size_t>(M + mu)] *
                        std::conj(sys.traces.P2(r, mu));
        W(fr, mu) = sys.traces.P1(r, mu);
        W(fr, M + mu) = sys.traces.P2(r, mu);
      }
    }
  }

  Eigen::MatrixXcd X;
  Eigen::PartialPivLU<Eigen::MatrixXcd> cap_lu;
  if (U.size() > 0) {
    X = lu.solve(U);
    Eigen::MatrixXcd cap = Eigen::MatrixXcd::Identity(M2, M2);
    cap += W.transpose() * X;
    cap_lu.compute(cap);
  }
  const auto apply = [&](const Eigen::VectorXcd& v) {
    Eigen::VectorXcd out = Aff * v;
    if (U.size() > 0) out += U * (W.transpose() * v);
    return out;
  };
  const auto direct_solve = [&](const Eigen::VectorXcd& v) {
    Eigen::VectorXcd out = lu.solve(v);
    if (U.size() > 0)
      out -= X * cap_lu.solve(W.transpose() * out);
    return out;
  };

  Eigen::VectorXcd x = direct_solve(b);
  const double bnorm = b.norm();
  double residual = (bnorm > 0.0) ? (apply(x) - b).norm() / bnorm : 0.0;
  // iterative refinement: the factorization error is amplified by the
  // condition number, a couple of corrections push the residual to round-off
  for (int pass = 0; pass < 2 && residual > 1e-14; ++pass) {
    x += direct_solve(b - apply(x));
    const double next = (apply(x) - b).norm() / bnorm;
    if (next >= residual) break;
    residual = next;
  }

  FieldSolution sol;
  sol.mesh = &m;
  sol.dofs = &dofs;
  sol.coeffs = sys.dirichlet_values;
  for (Eigen::Index e = 0; e < nf; ++e) sol.coeffs[free_list[e]] = x[e];
  sol.residual = residual;
  return sol;
}

double hcurl_norm(const Mesh& m, const DofMap& dofs,
                  const Eigen::VectorXcd& coeffs) {
  Eigen::Matrix<double, 6, 6> K, M;
  double total = 0.0;
  for (std::size_t t = 0; t < m.n_tets(); ++t) {
    const auto& tet = m.tets[t];
    element_matrices({m.vertices[tet[0]], m.vertices[tet[1]],
                      m.vertices[tet[2]], m.vertices[tet[3]]},
                     K, M);
    Eigen::Matrix<cplx, 6, 1> c;
    for (int e = 0; e < 6; ++e)
      c[e] = dofs.tet_signs[t][e] * coeffs[dofs.tet_edges[t][e]];
    total += (c.adjoint() * (K + M).cast<cplx>() * c)(0, 0).real();
  }
  return std::sqrt(std::max(total, 0.0));
}

double hcurl_error(const Mesh& m, const DofMap& dofs,
                   const Eigen::VectorXcd& coeffs, const FieldSampler& exact,
                   int quad_order) {
  const TetQuadrature quad = tet_quadrature(std::max(quad_order, 4));
  double acc = 0.0;
  for (std::size_t t = 0; t < m.n_tets(); ++t) {
    const auto& tet = m.tets[t];
    const WhitneyBasis w = whitney_basis({m.vertices[tet[0]],
                                          m.vertices[tet[1]],
                                          m.vertices[tet[2]],
                                          m.vertices[tet[3]]});
    Vec3c curl_h = Vec3c::Zero();
    for (int e = 0; e < 6; ++e)
      curl_h += dofs.tet_signs[t][e] * coeffs[dofs.tet_edges[t][e]] *
                w.curl(e).cast<cplx>();
    for (std::size_t p = 0; p < quad.bary.size(); ++p) {
      Vec3 x = Vec3::Zero();
      for (int i = 0; i < 4; ++i) x += quad.bary[p][i] * w.p[i];
      Vec3c val_h = Vec3c::Zero();
      for (int e = 0; e < 6; ++e)
        val_h += dofs.tet_signs[t][e] * coeffs[dofs.tet_edges[t][e]] *
                 w.value(e, x).cast<cplx>();
      const Vec3c dv = (exact.value ? exact.value(x) : Vec3c::Zero()) - val_h;
      const Vec3c dc = (exact.curl ? exact.curl(x) : Vec3c::Zero()) - curl_h;
      acc += quad.weight[p] * w.volume * (dv.squaredNorm() + dc.squaredNorm());
    }
  }
  return std::sqrt(acc);
}

}  // namespace emadapt
