#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "emadapt/harmonics.hpp"

// Tetrahedral meshes of the shell between an obstacle and the sphere of
// radius R, with tagged boundary faces and conforming marked-edge bisection
// refinement. Meshes are immutable values; refinement returns a new mesh.

namespace emadapt {

enum class BoundaryTag : int { obstacle = 1, sphere = 2 };

using EdgeKey = std::array<int, 2>;  // sorted vertex pair
using FaceKey = std::array<int, 3>;  // sorted vertex triple

EdgeKey make_edge(int a, int b);
FaceKey make_face(int a, int b, int c);

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> tets;
  std::map<FaceKey, BoundaryTag> boundary_faces;
  // Refinement bookkeeping for marked-edge bisection: every face carries a
  // marked edge (initially its longest edge), so neighboring tets agree on
  // shared faces by construction. A tet's refinement edge is the edge marked
  // by both of the faces containing it. Split faces hand the edge opposite
  // the bisection vertex to their halves; the new interior face marks the
  // edge between the two off-vertices, except in flagged planar tets where
  // it marks the edge from the bisection vertex to the common endpoint of
  // the other two face marks. The planar flag alternates so descendants
  // cycle through finitely many similarity classes. The state is rebuilt
  // from edge lengths after file I/O.
  std::map<FaceKey, EdgeKey> face_marks;
  std::vector<char> tet_flags;
  // refinement edge per tet, derived from face_marks
  std::vector<EdgeKey> marked_edges;

  std::size_t n_vertices() const { return vertices.size(); }
  std::size_t n_tets() const { return tets.size(); }
};

struct GeometryDescriptor {
  enum class Obstacle { sphere, facets };
  Obstacle obstacle = Obstacle::sphere;
  double obstacle_radius = 0.0;  // used when obstacle == sphere
  double R = 0.0;                // outer sphere radius
};

struct ValidationReport {
  bool ok = true;
  std::string message;
};

/// Signed volume of tet t (positive for correctly oriented tets).
double tet_volume(const Mesh& m, std::size_t t);

/// Longest edge length of tet t (the element diameter h_K).
double tet_diameter(const Mesh& m, std::size_t t);

/// Circumradius / inradius ratio of tet t.
double tet_shape_ratio(const Mesh& m, std::size_t t);

/// Worst circumradius / inradius ratio over the mesh.
double shape_regularity(const Mesh& m);

/// Sum of tet volumes.
double total_volume(const Mesh& m);

/// Marked edge of a tet: longest edge, ties broken by the lexicographically
/// smallest sorted vertex pair.
EdgeKey longest_edge(const Mesh& m, std::size_t t);

/// Icosahedron-based shell mesh between the spheres of the given radii:
/// the surface triangulation is subdivided `subdiv` times and extruded in
/// `layers` radial shells, each prism split into 3 tets with globally
/// consistent diagonals. Inner faces are tagged obstacle, outer tagged sphere.
Mesh generate_shell_mesh(double inner_radius, double outer_radius, int layers,
                         int subdiv);

/// Desk-scale fixture: a U-shaped piecewise-linear obstacle carved from a
/// Kuhn-triangulated box grid, extruded radially to the sphere of radius
/// `outer_radius`. The obstacle fits inside the box [-0.16, 0.16]^3.
Mesh generate_ushape_mesh(double outer_radius = 0.5);

/// ASCII format: line 1 "nv nt nbf"; nv vertex lines "x y z"; nt tet lines
/// "v0 v1 v2 v3"; nbf boundary-face lines "v0 v1 v2 tag" with tag 1 =
/// obstacle, 2 = sphere. Indices are 0-based.
Mesh load_mesh(const std::string& path);
void save_mesh(const Mesh& m, const std::string& path);

/// Conforming bisection refinement: every marked tet is bisected at its
/// marked edge, with recursive closure so the result is conforming. New
/// vertices on sphere-tagged faces are projected to |x| = R; new vertices on
/// a spherical obstacle are projected to its radius; piecewise-linear
/// obstacles keep edge midpoints. Throws if the closure cascade exceeds 20x
/// the input mesh size.
Mesh refine_marked(const Mesh& m, const std::vector<int>& marked,
                   const GeometryDescriptor& geom);

/// Checks all mesh invariants: index ranges, positive volumes, conformity
/// (interior faces shared by exactly 2 tets, boundary faces by exactly 1 and
/// listed in boundary_faces), and sphere-tagged vertices at a common radius.
ValidationReport validate(const Mesh& m);

}  // namespace emadapt
