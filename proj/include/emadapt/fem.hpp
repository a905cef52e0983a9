#pragma once

#include <Eigen/Sparse>

#include "emadapt/dtn.hpp"
#include "emadapt/mesh.hpp"

// Lowest-order Nedelec edge-element discretization on the shell mesh:
// edge DOF management, curl-curl and mass element matrices, the dense
// DtN boundary block over the sphere edges, assembly with eliminated
// Dirichlet constraints on the obstacle, and the direct sparse solve.
//
// Global edges are oriented from the lower to the higher vertex index;
// the DOF of an edge e is the line integral of the tangential component
// along e in that orientation.

namespace emadapt {

// Local edges of a tet, in the order used by element matrices and DofMap.
inline constexpr int kTetEdgeVerts[6][2] = {{0, 1}, {0, 2}, {0, 3},
                                            {1, 2}, {1, 3}, {2, 3}};

struct DofMap {
  std::vector<EdgeKey> edges;                  // ascending vertex pairs
  std::vector<std::array<int, 6>> tet_edges;   // global edge index per tet
  std::vector<std::array<double, 6>> tet_signs;
  std::vector<char> dirichlet;  // edge lies on an obstacle face
  std::vector<char> on_sphere;  // edge lies on a sphere face

  std::size_t n_edges() const { return edges.size(); }
  /// Global indices of sphere edges, ascending.
  std::vector<int> sphere_dofs() const;
};

DofMap build_dof_map(const Mesh& m);

// Constant barycentric gradients of a tet, used to evaluate the Whitney
// edge basis w_e = lambda_a grad lambda_b - lambda_b grad lambda_a and its
// (constant) curl 2 grad lambda_a x grad lambda_b.
struct WhitneyBasis {
  std::array<Vec3, 4> p;
  std::array<Vec3, 4> grad;
  double volume = 0.0;

  std::array<double, 4> barycentric(const Vec3& x) const;
  Vec3 value(int e, const Vec3& x) const;
  Vec3 curl(int e) const;
};

/// Throws std::invalid_argument for a degenerate tet.
WhitneyBasis whitney_basis(const std::array<Vec3, 4>& p);

/// K_e = integral (curl w_i).(curl w_j) via the constant-curl closed form;
/// M_e = integral w_i.w_j via a degree-2 (4-point) rule, exact here.
void element_matrices(const std::array<Vec3, 4>& p,
                      Eigen::Matrix<double, 6, 6>& K,
                      Eigen::Matrix<double, 6, 6>& M);

// Quadrature on the reference simplex in barycentric coordinates, built by
// a collapsed-coordinate Gauss product rule; weights sum to 1, so they are
// multiplied by the physical area/volume by the caller. `order` is the
// polynomial exactness degree.
struct TriQuadrature {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weight;
};
TriQuadrature triangle_quadrature(int order);

struct TetQuadrature {
  std::vector<std::array<double, 4>> bary;
  std::vector<double> weight;
};
TetQuadrature tet_quadrature(int order);

// Tangential-trace spectra of the sphere-edge basis functions: row j of
// (P1, P2) holds the degree-N (U, V) coefficients of the trace of the j-th
// sphere-edge basis function, computed by face quadrature at planar points
// radially projected to rho = R with the area-ratio Jacobian.
struct BoundarySpectra {
  int N = 0;
  double R = 0.0;
  std::vector<int> sphere_edges;  // global edge index per row, ascending
  Eigen::MatrixXcd P1, P2;        // (#sphere edges) x N(N+2)
};

/// quad_order = 0 selects the default max(4, 2N+2); anything positive below
/// 2N+2 is rejected.
BoundarySpectra boundary_trace_spectra(const Mesh& m, const DofMap& dofs,
                                       int N, double R, int quad_order = 0);

/// Dense DtN block over sphere edges:
/// B_jk = sum_nm g1_n p1_k conj(p1_j) + g2_n p2_k conj(p2_j); the assembled
/// boundary term is -i kappa B. Complex symmetric for real basis functions.
Eigen::MatrixXcd dtn_coupling_block(const BoundarySpectra& S,
                                    const DtnFactors& F);

struct AssembledSystem {
  Eigen::SparseMatrix<cplx> A;  // curl-curl minus kappa^2 mass, all DOFs
  BoundarySpectra traces;
  std::vector<cplx> g1g2;  // DtN factor per mode: g1 block then g2 block
  Eigen::MatrixXcd B;      // dense DtN block; empty above dense_threshold
  Eigen::VectorXcd rhs;
  Eigen::VectorXcd dirichlet_values;  // full size, zero on free DOFs
  std::vector<char> is_dirichlet;
  double kappa = 0.0;
};

/// Edge DOFs of a field: 2-point Gauss line integrals along each edge.
Eigen::VectorXcd interpolate_edge_dofs(
    const Mesh& m, const DofMap& dofs,
    const std::function<Vec3c(const Vec3&)>& field);

/// Assemble the truncated variational problem. f_spectrum is the boundary
/// source f^N (pass a default-constructed spectrum for f = 0); dirichlet_data
/// is the prescribed tangential field on the obstacle (empty = PEC, zero).
/// Above dense_threshold sphere DOFs the DtN block is kept only in factored
/// form (traces + factors) and applied implicitly by solve().
AssembledSystem assemble(const Mesh& m, const DofMap& dofs,
                         const WaveParams& w, const DtnFactors& F,
                         const TangentialSpectrum& f_spectrum,
                         const std::function<Vec3c(const Vec3&)>&
                             dirichlet_data = {},
                         int boundary_quad_order = 0,
                         int dense_threshold = 4000);

struct FieldSolution {
  const Mesh* mesh = nullptr;
  const DofMap* dofs = nullptr;
  Eigen::VectorXcd coeffs;
  double residual = 0.0;  // ||Ax - b|| / ||b|| of the constrained system

  Vec3c eval(std::size_t t, const Vec3& x) const;
  Vec3c eval_curl(std::size_t t) const;
};

/// Direct sparse LU on the constrained system; the DtN block enters through
/// its low-rank factorization (rank 2 N(N+2)) via a bordered solve, so the
/// sparse factorization only sees the volume terms. Throws on a singular
/// factorization.
FieldSolution solve(const AssembledSystem& sys, const Mesh& m,
                    const DofMap& dofs);

/// H(curl) norm of a coefficient vector: sqrt(c^H (K + M) c) elementwise.
double hcurl_norm(const Mesh& m, const DofMap& dofs,
                  const Eigen::VectorXcd& coeffs);

/// H(curl) norm of (exact - discrete) by elementwise quadrature.
double hcurl_error(const Mesh& m, const DofMap& dofs,
                   const Eigen::VectorXcd& coeffs, const FieldSampler& exact,
                   int quad_order = 4);

}  // namespace emadapt
