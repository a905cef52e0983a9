#include "emadapt/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace emadapt {

EdgeKey make_edge(int a, int b) {
  return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

FaceKey make_face(int a, int b, int c) {
  FaceKey f{a, b, c};
  std::sort(f.begin(), f.end());
  return f;
}

namespace {

constexpr std::array<std::array<int, 2>, 6> kTetEdges = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c,
                     const Vec3& d) {
  return (b - a).cross(c - a).dot(d - a) / 6.0;
}

void orient_positive(const std::vector<Vec3>& verts,
                     std::array<int, 4>& T) {
  if (signed_volume(verts[T[0]], verts[T[1]], verts[T[2]], verts[T[3]]) < 0.0)
    std::swap(T[2], T[3]);
}

// Total order on edges: length first, vertex pair as tie-break. Closure
// recursion follows strictly increasing edges, so it terminates.
bool edge_less(const std::vector<Vec3>& verts, const EdgeKey& a,
               const EdgeKey& b) {
  const double la = (verts[a[0]] - verts[a[1]]).squaredNorm();
  const double lb = (verts[b[0]] - verts[b[1]]).squaredNorm();
  if (la != lb) return la < lb;
  return a < b;
}

EdgeKey longest_edge_of(const std::vector<Vec3>& verts,
                        const std::array<int, 4>& T) {
  EdgeKey best = make_edge(T[0], T[1]);
  for (std::size_t i = 1; i < kTetEdges.size(); ++i) {
    const EdgeKey e = make_edge(T[kTetEdges[i][0]], T[kTetEdges[i][1]]);
    if (edge_less(verts, best, e)) best = e;
  }
  return best;
}

// Splits the prism (w0 w1 w2 | w3 w4 w5), with w(i+3) above w(i), into 3
// tets whose quad diagonals pass through each quad's smallest global vertex,
// so decompositions of neighboring prisms agree on shared quads.
std::array<std::array<int, 4>, 3> split_prism(const std::array<int, 6>& w) {
  static const int rot[6][6] = {{0, 1, 2, 3, 4, 5}, {1, 2, 0, 4, 5, 3},
                                {2, 0, 1, 5, 3, 4}, {3, 5, 4, 0, 2, 1},
                                {4, 3, 5, 1, 0, 2}, {5, 4, 3, 2, 1, 0}};
  int p = 0;
  for (int i = 1; i < 6; ++i)
    if (w[i] < w[p]) p = i;
  std::array<int, 6> I;
  for (int i = 0; i < 6; ++i) I[i] = w[rot[p][i]];
  if (std::min(I[1], I[5]) < std::min(I[2], I[4]))
    return {{{I[0], I[1], I[2], I[5]},
             {I[0], I[1], I[5], I[4]},
             {I[0], I[4], I[5], I[3]}}};
  return {{{I[0], I[1], I[2], I[4]},
           {I[0], I[4], I[2], I[5]},
           {I[0], I[4], I[5], I[3]}}};
}

EdgeKey longest_face_edge(const std::vector<Vec3>& verts, const FaceKey& f) {
  EdgeKey best = make_edge(f[0], f[1]);
  for (const EdgeKey e : {make_edge(f[0], f[2]), make_edge(f[1], f[2])})
    if (edge_less(verts, best, e)) best = e;
  return best;
}

constexpr std::array<std::array<int, 3>, 4> kTetFaces = {
    {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};

// The refinement edge is the edge marked by both faces containing it; when
// two such edges exist, the larger one in the global edge order wins.
EdgeKey refinement_edge_of(const std::vector<Vec3>& verts,
                           const std::map<FaceKey, EdgeKey>& marks,
                           const std::array<int, 4>& T) {
  std::map<EdgeKey, int> tally;
  for (const auto& f : kTetFaces)
    tally[marks.at(make_face(T[f[0]], T[f[1]], T[f[2]]))]++;
  bool found = false;
  EdgeKey best{};
  for (const auto& [e, c] : tally)
    if (c == 2 && (!found || edge_less(verts, best, e))) {
      best = e;
      found = true;
    }
  if (!found)
    throw std::logic_error("refinement_edge_of: no doubly marked edge");
  return best;
}

void init_face_marks(const std::vector<Vec3>& verts,
                     const std::vector<std::array<int, 4>>& tets,
                     std::map<FaceKey, EdgeKey>& marks) {
  marks.clear();
  for (const auto& T : tets)
    for (const auto& f : kTetFaces) {
      const FaceKey key = make_face(T[f[0]], T[f[1]], T[f[2]]);
      if (!marks.count(key)) marks[key] = longest_face_edge(verts, key);
    }
}

void finalize(Mesh& m) {
  for (auto& T : m.tets) orient_positive(m.vertices, T);
  init_face_marks(m.vertices, m.tets, m.face_marks);
  m.tet_flags.assign(m.tets.size(), 0);
  m.marked_edges.resize(m.tets.size());
  for (std::size_t t = 0; t < m.tets.size(); ++t)
    m.marked_edges[t] =
        refinement_edge_of(m.vertices, m.face_marks, m.tets[t]);
}

// Tags all once-shared faces: sphere when every vertex sits at the given
// radius, obstacle otherwise.
void tag_boundary_by_radius(Mesh& m, double R) {
  std::map<FaceKey, int> count;
  for (const auto& T : m.tets) {
    count[make_face(T[0], T[1], T[2])]++;
    count[make_face(T[0], T[1], T[3])]++;
    count[make_face(T[0], T[2], T[3])]++;
    count[make_face(T[1], T[2], T[3])]++;
  }
  m.boundary_faces.clear();
  for (const auto& [f, c] : count) {
    if (c != 1) continue;
    bool on_sphere = true;
    for (int v : f)
      if (std::abs(m.vertices[v].norm() - R) > 1e-9 * R) on_sphere = false;
    m.boundary_faces[f] =
        on_sphere ? BoundaryTag::sphere : BoundaryTag::obstacle;
  }
}

}  // namespace

double tet_volume(const Mesh& m, std::size_t t) {
  const auto& T = m.tets[t];
  return signed_volume(m.vertices[T[0]], m.vertices[T[1]], m.vertices[T[2]],
                       m.vertices[T[3]]);
}

double tet_diameter(const Mesh& m, std::size_t t) {
  const auto& T = m.tets[t];
  double d2 = 0.0;
  for (const auto& e : kTetEdges)
    d2 = std::max(d2,
                  (m.vertices[T[e[0]]] - m.vertices[T[e[1]]]).squaredNorm());
  return std::sqrt(d2);
}

double tet_shape_ratio(const Mesh& m, std::size_t t) {
  const auto& T = m.tets[t];
  const Vec3 p0 = m.vertices[T[0]];
  Eigen::Matrix3d A;
  Eigen::Vector3d rhs;
  for (int i = 0; i < 3; ++i) {
    const Vec3 d = m.vertices[T[i + 1]] - p0;
    A.row(i) = 2.0 * d;
    rhs(i) = m.vertices[T[i + 1]].squaredNorm() - p0.squaredNorm();
  }
  const Vec3 center = A.partialPivLu().solve(rhs);
  const double circum = (center - p0).norm();
  const double vol = std::abs(tet_volume(m, t));
  double area = 0.0;
  static const int faces[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  for (const auto& f : faces) {
    const Vec3 a = m.vertices[T[f[0]]], b = m.vertices[T[f[1]]],
               c = m.vertices[T[f[2]]];
    area += 0.5 * (b - a).cross(c - a).norm();
  }
  const double inradius = 3.0 * vol / area;
  return circum / inradius;
}

double shape_regularity(const Mesh& m) {
  double worst = 0.0;
  for (std::size_t t = 0; t < m.tets.size(); ++t)
    worst = std::max(worst, tet_shape_ratio(m, t));
  return worst;
}

double total_volume(const Mesh& m) {
  double v = 0.0;
  for (std::size_t t = 0; t < m.tets.size(); ++t) v += tet_volume(m, t);
  return v;
}

EdgeKey longest_edge(const Mesh& m, std::size_t t) {
  return longest_edge_of(m.vertices, m.tets[t]);
}

Mesh generate_shell_mesh(double inner_radius, double outer_radius, int layers,
                         int subdiv) {
  if (!(0.0 < inner_radius && inner_radius < outer_radius))
    throw std::invalid_argument(
        "generate_shell_mesh: need 0 < inner_radius < outer_radius");
  if (layers < 1) throw std::invalid_argument("generate_shell_mesh: layers >= 1");
  if (subdiv < 0) throw std::invalid_argument("generate_shell_mesh: subdiv >= 0");

  // unit icosahedron
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> surf = {
      {-1, t, 0}, {1, t, 0},   {-1, -t, 0}, {1, -t, 0},
      {0, -1, t}, {0, 1, t},   {0, -1, -t}, {0, 1, -t},
      {t, 0, -1}, {t, 0, 1},   {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : surf) v.normalize();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int s = 0; s < subdiv; ++s) {
    std::map<EdgeKey, int> mid;
    auto midpoint = [&](int a, int b) {
      const EdgeKey e = make_edge(a, b);
      auto it = mid.find(e);
      if (it != mid.end()) return it->second;
      const int id = static_cast<int>(surf.size());
      surf.push_back((0.5 * (surf[a] + surf[b])).normalized());
      mid.emplace(e, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(4 * faces.size());
    for (const auto& f : faces) {
      const int ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]),
                ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  const int Vs = static_cast<int>(surf.size());
  Mesh m;
  m.vertices.reserve(static_cast<std::size_t>(Vs) * (layers + 1));
  for (int l = 0; l <= layers; ++l) {
    const double r =
        inner_radius + (outer_radius - inner_radius) * l / layers;
    for (const auto& v : surf) m.vertices.push_back(r * v);
  }
  auto vid = [&](int layer, int s) { return layer * Vs + s; };

  for (int l = 0; l < layers; ++l)
    for (const auto& f : faces) {
      const std::array<int, 6> w = {vid(l, f[0]),     vid(l, f[1]),
                                    vid(l, f[2]),     vid(l + 1, f[0]),
                                    vid(l + 1, f[1]), vid(l + 1, f[2])};
      for (const auto& T : split_prism(w)) m.tets.push_back(T);
    }

  for (const auto& f : faces) {
    m.boundary_faces[make_face(vid(0, f[0]), vid(0, f[1]), vid(0, f[2]))] =
        BoundaryTag::obstacle;
    m.boundary_faces[make_face(vid(layers, f[0]), vid(layers, f[1]),
                               vid(layers, f[2]))] = BoundaryTag::sphere;
  }
  finalize(m);
  return m;
}

Mesh generate_ushape_mesh(double outer_radius) {
  constexpr int n = 6;
  constexpr double h = 0.08, lo = -0.24;
  if (outer_radius <= lo * -std::sqrt(3.0) + 1e-12)
    throw std::invalid_argument(
        "generate_ushape_mesh: outer radius must enclose the box");

  auto is_obstacle = [](int i, int j, int k) {
    const bool thick = (j == 2 || j == 3);
    const bool arm = (i == 1 || i == 4) && k >= 1 && k <= 4;
    const bool bar = (i == 2 || i == 3) && k == 1;
    return thick && (arm || bar);
  };

  Mesh m;
  auto grid_id = [&](int i, int j, int k) {
    return (i * (n + 1) + j) * (n + 1) + k;
  };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k)
        m.vertices.push_back(Vec3(lo + h * i, lo + h * j, lo + h * k));

  // Kuhn triangulation of each kept cell: one tet per axis permutation,
  // walking from the cell's low corner to its high corner
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (is_obstacle(i, j, k)) continue;
        for (const auto& p : perms) {
          std::array<int, 3> c = {i, j, k};
          std::array<int, 4> T;
          T[0] = grid_id(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            c[p[s]]++;
            T[s + 1] = grid_id(c[0], c[1], c[2]);
          }
          m.tets.push_back(T);
        }
      }

  // box-surface triangles become prism bottoms, extruded radially
  std::map<FaceKey, int> count;
  for (const auto& T : m.tets) {
    count[make_face(T[0], T[1], T[2])]++;
    count[make_face(T[0], T[1], T[3])]++;
    count[make_face(T[0], T[2], T[3])]++;
    count[make_face(T[1], T[2], T[3])]++;
  }
  const double box = -lo;
  auto on_box_surface = [&](const FaceKey& f) {
    for (int axis = 0; axis < 3; ++axis)
      for (double side : {-box, box}) {
        bool all = true;
        for (int v : f)
          if (std::abs(m.vertices[v](axis) - side) > 1e-12) all = false;
        if (all) return true;
      }
    return false;
  };
  std::map<int, int> lifted;
  auto lift = [&](int v) {
    auto it = lifted.find(v);
    if (it != lifted.end()) return it->second;
    const int id = static_cast<int>(m.vertices.size());
    m.vertices.push_back(outer_radius * m.vertices[v].normalized());
    lifted.emplace(v, id);
    return id;
  };
  std::vector<FaceKey> surface;
  for (const auto& [f, c] : count)
    if (c == 1 && on_box_surface(f)) surface.push_back(f);
  for (const auto& f : surface) {
    const std::array<int, 6> w = {f[0], f[1], f[2],
                                  lift(f[0]), lift(f[1]), lift(f[2])};
    for (const auto& T : split_prism(w)) m.tets.push_back(T);
  }

  // drop grid vertices interior to the carved obstacle
  std::vector<char> used(m.vertices.size(), 0);
  for (const auto& T : m.tets)
    for (int v : T) used[v] = 1;
  std::vector<int> remap(m.vertices.size(), -1);
  std::vector<Vec3> kept;
  for (std::size_t v = 0; v < m.vertices.size(); ++v)
    if (used[v]) {
      remap[v] = static_cast<int>(kept.size());
      kept.push_back(m.vertices[v]);
    }
  m.vertices = std::move(kept);
  for (auto& T : m.tets)
    for (auto& v : T) v = remap[v];

  tag_boundary_by_radius(m, outer_radius);
  finalize(m);
  return m;
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("load_mesh: cannot open '" + path + "'");
  int lineno = 0;
  std::string line;
  auto next_line = [&]() -> std::istringstream {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r\n") != std::string::npos)
        return std::istringstream(line);
    }
    throw std::runtime_error("load_mesh: unexpected end of file after line " +
                             std::to_string(lineno));
  };
  auto parse_error = [&](const std::string& what) {
    throw std::runtime_error("load_mesh: parse error at line " +
                             std::to_string(lineno) + ": " + what);
  };

  long nv = 0, nt = 0, nbf = 0;
  {
    auto ss = next_line();
    if (!(ss >> nv >> nt >> nbf) || nv < 0 || nt < 0 || nbf < 0)
      parse_error("expected header 'nv nt nbf'");
  }
  Mesh m;
  m.vertices.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    auto ss = next_line();
    double x, y, z;
    if (!(ss >> x >> y >> z)) parse_error("expected vertex 'x y z'");
    m.vertices.push_back(Vec3(x, y, z));
  }
  m.tets.reserve(nt);
  for (long i = 0; i < nt; ++i) {
    auto ss = next_line();
    std::array<int, 4> T;
    if (!(ss >> T[0] >> T[1] >> T[2] >> T[3]))
      parse_error("expected tet 'v0 v1 v2 v3'");
    for (int v : T)
      if (v < 0 || v >= nv) parse_error("tet vertex index out of range");
    m.tets.push_back(T);
  }
  for (long i = 0; i < nbf; ++i) {
    auto ss = next_line();
    int a, b, c, tag;
    if (!(ss >> a >> b >> c >> tag))
      parse_error("expected boundary face 'v0 v1 v2 tag'");
    for (int v : {a, b, c})
      if (v < 0 || v >= nv) parse_error("face vertex index out of range");
    if (tag != 1 && tag != 2) parse_error("tag must be 1 or 2");
    m.boundary_faces[make_face(a, b, c)] = static_cast<BoundaryTag>(tag);
  }

  const auto report = validate(m);
  if (!report.ok)
    throw std::runtime_error("load_mesh: validation failed for '" + path +
                             "': " + report.message);
  finalize(m);
  return m;
}

void save_mesh(const Mesh& m, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("save_mesh: cannot open '" + path + "'");
  out << m.vertices.size() << ' ' << m.tets.size() << ' '
      << m.boundary_faces.size() << '\n';
  char buf[96];
  for (const auto& v : m.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", v.x(), v.y(),
                  v.z());
    out << buf;
  }
  for (const auto& T : m.tets)
    out << T[0] << ' ' << T[1] << ' ' << T[2] << ' ' << T[3] << '\n';
  for (const auto& [f, tag] : m.boundary_faces)
    out << f[0] << ' ' << f[1] << ' ' << f[2] << ' ' << static_cast<int>(tag)
        << '\n';
  if (!out)
    throw std::runtime_error("save_mesh: write failed for '" + path + "'");
}

namespace {

struct Refiner {
  std::vector<Vec3> verts;
  std::vector<std::array<int, 4>> tets;
  std::vector<char> flags;
  std::vector<char> alive;
  std::vector<std::vector<int>> v2t;
  std::map<FaceKey, BoundaryTag> bfaces;
  std::map<FaceKey, EdgeKey> marks;
  const GeometryDescriptor* geom = nullptr;
  std::size_t live_count = 0;
  std::size_t max_live = 0;

  EdgeKey marked(int t) const {
    return refinement_edge_of(verts, marks, tets[t]);
  }

  std::vector<int> star_of_edge(const EdgeKey& e) const {
    std::vector<int> out;
    for (int t : v2t[e[0]]) {
      if (!alive[t]) continue;
      const auto& T = tets[t];
      if (T[0] == e[1] || T[1] == e[1] || T[2] == e[1] || T[3] == e[1])
        out.push_back(t);
    }
    return out;
  }

  void add_tet(const std::array<int, 4>& T, char flag) {
    const int id = static_cast<int>(tets.size());
    tets.push_back(T);
    flags.push_back(flag);
    alive.push_back(1);
    ++live_count;
    for (int v : T) v2t[v].push_back(id);
    if (live_count > max_live)
      throw std::runtime_error(
          "refine_marked: closure cascade exceeded the 20x safety bound");
  }

  // Bisects e once every tet around it is marked at e; tets marked elsewhere
  // are bisected at their own marked edge first (conformity closure). Every
  // pass through the loop splits at least one tet, so the 20x size bound
  // caps the cascade.
  void bisect_edge(const EdgeKey& e, int depth = 0) {
    if (depth > 200)
      throw std::runtime_error(
          "refine_marked: closure recursion depth exceeded (incompatible "
          "refinement-edge tags)");
    for (;;) {
      const auto star = star_of_edge(e);
      if (star.empty()) return;  // already split by an earlier closure step
      bool ready = true;
      for (int t : star) {
        if (marked(t) != e) {
          bisect_edge(marked(t), depth + 1);
          ready = false;
          break;
        }
      }
      if (ready) {
        split(e, star);
        return;
      }
    }
  }

  void split(const EdgeKey& e, const std::vector<int>& star) {
    bool on_sphere = false, on_obstacle = false;
    std::vector<std::pair<FaceKey, BoundaryTag>> faces_to_split;
    std::set<FaceKey> seen;
    for (int t : star) {
      const auto& T = tets[t];
      for (int v : T) {
        if (v == e[0] || v == e[1]) continue;
        const FaceKey f = make_face(e[0], e[1], v);
        if (!seen.insert(f).second) continue;
        const auto it = bfaces.find(f);
        if (it == bfaces.end()) continue;
        faces_to_split.push_back(*it);
        if (it->second == BoundaryTag::sphere)
          on_sphere = true;
        else
          on_obstacle = true;
      }
    }

    Vec3 mid = 0.5 * (verts[e[0]] + verts[e[1]]);
    if (on_sphere)
      mid *= geom->R / mid.norm();
    else if (on_obstacle &&
             geom->obstacle == GeometryDescriptor::Obstacle::sphere)
      mid *= geom->obstacle_radius / mid.norm();
    const int mv = static_cast<int>(verts.size());
    verts.push_back(mid);
    v2t.emplace_back();

    for (const auto& [f, tag] : faces_to_split) {
      int c = -1;
      for (int v : f)
        if (v != e[0] && v != e[1]) c = v;
      bfaces.erase(f);
      bfaces[make_face(e[0], mv, c)] = tag;
      bfaces[make_face(mv, e[1], c)] = tag;
    }

    // split every tet around e = (a, b) into the two halves meeting at the
    // bisection vertex mv; halves of split faces mark the edge opposite mv
    const int a = e[0], b = e[1];
    for (int t : star) {
      alive[t] = 0;
      --live_count;
      const auto T = tets[t];
      int c = -1, d = -1;
      for (int v : T) {
        if (v == a || v == b) continue;
        (c < 0 ? c : d) = v;
      }
      const EdgeKey m1 = marks.at(make_face(a, c, d));
      const EdgeKey m2 = marks.at(make_face(b, c, d));

      // planar tet: the marks of the faces not containing the refinement
      // edge touch it and share their off-edge endpoint w
      int w = -1;
      if (m1 != make_edge(c, d) && m2 != make_edge(c, d)) {
        const int w1 = (m1[0] == a) ? m1[1] : m1[0];
        const int w2 = (m2[0] == b) ? m2[1] : m2[0];
        if (w1 == w2) w = w1;
      }
      const bool planar = (w >= 0);

      marks.erase(make_face(a, b, c));
      marks.erase(make_face(a, b, d));
      marks[make_face(a, mv, c)] = make_edge(a, c);
      marks[make_face(b, mv, c)] = make_edge(b, c);
      marks[make_face(a, mv, d)] = make_edge(a, d);
      marks[make_face(b, mv, d)] = make_edge(b, d);
      marks[make_face(mv, c, d)] = (planar && flags[t])
                                       ? make_edge(mv, w)
                                       : make_edge(c, d);
      const char child_flag = (planar && !flags[t]) ? 1 : 0;
      add_tet({a, mv, c, d}, child_flag);
      add_tet({b, mv, c, d}, child_flag);
    }
  }
};

}  // namespace

Mesh refine_marked(const Mesh& m, const std::vector<int>& marked,
                   const GeometryDescriptor& geom) {
  for (int t : marked)
    if (t < 0 || static_cast<std::size_t>(t) >= m.tets.size())
      throw std::invalid_argument("refine_marked: marked tet index " +
                                  std::to_string(t) + " out of range");
  if (marked.empty()) return m;

  bool has_sphere = false, has_obstacle = false;
  for (const auto& [f, tag] : m.boundary_faces)
    (tag == BoundaryTag::sphere ? has_sphere : has_obstacle) = true;
  if (has_sphere && geom.R <= 0.0)
    throw std::invalid_argument("refine_marked: geometry outer radius R > 0 required");
  if (has_obstacle && geom.obstacle == GeometryDescriptor::Obstacle::sphere &&
      geom.obstacle_radius <= 0.0)
    throw std::invalid_argument(
        "refine_marked: spherical obstacle radius > 0 required");

  Refiner r;
  r.verts = m.vertices;
  r.tets = m.tets;
  if (m.face_marks.empty())
    init_face_marks(r.verts, r.tets, r.marks);  // hand-assembled mesh
  else
    r.marks = m.face_marks;
  r.flags = (m.tet_flags.size() == m.tets.size())
                ? std::vector<char>(m.tet_flags)
                : std::vector<char>(m.tets.size(), 0);
  r.alive.assign(m.tets.size(), 1);
  r.v2t.resize(m.vertices.size());
  for (std::size_t t = 0; t < m.tets.size(); ++t)
    for (int v : r.tets[t]) r.v2t[v].push_back(static_cast<int>(t));
  r.bfaces = m.boundary_faces;
  r.geom = &geom;
  r.live_count = m.tets.size();
  r.max_live = 20 * m.tets.size();

  for (int t : marked)
    if (r.alive[t]) r.bisect_edge(r.marked(t));

  Mesh out;
  out.vertices = std::move(r.verts);
  out.boundary_faces = std::move(r.bfaces);
  for (std::size_t t = 0; t < r.tets.size(); ++t)
    if (r.alive[t]) {
      out.tets.push_back(r.tets[t]);
      orient_positive(out.vertices, out.tets.back());
      out.tet_flags.push_back(r.flags[t]);
      out.marked_edges.push_back(
          refinement_edge_of(out.vertices, r.marks, r.tets[t]));
    }
  // keep only marks of faces that still exist
  for (const auto& T : out.tets)
    for (const auto& f : kTetFaces) {
      const FaceKey key = make_face(T[f[0]], T[f[1]], T[f[2]]);
      out.face_marks[key] = r.marks.at(key);
    }
  return out;
}

ValidationReport validate(const Mesh& m) {
  auto fail = [](const std::string& msg) {
    return ValidationReport{false, msg};
  };
  const int nv = static_cast<int>(m.vertices.size());
  for (std::size_t t = 0; t < m.tets.size(); ++t) {
    const auto& T = m.tets[t];
    for (int v : T)
      if (v < 0 || v >= nv)
        return fail("tet " + std::to_string(t) + " has vertex index out of range");
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (T[i] == T[j])
          return fail("tet " + std::to_string(t) + " has repeated vertices");
    if (tet_volume(m, t) <= 0.0)
      return fail("tet " + std::to_string(t) + " has non-positive volume");
  }

  std::map<FaceKey, int> count;
  for (const auto& T : m.tets) {
    count[make_face(T[0], T[1], T[2])]++;
    count[make_face(T[0], T[1], T[3])]++;
    count[make_face(T[0], T[2], T[3])]++;
    count[make_face(T[1], T[2], T[3])]++;
  }
  auto face_str = [](const FaceKey& f) {
    return "(" + std::to_string(f[0]) + ", " + std::to_string(f[1]) + ", " +
           std::to_string(f[2]) + ")";
  };
  for (const auto& [f, c] : count) {
    if (c > 2)
      return fail("face " + face_str(f) + " shared by " + std::to_string(c) +
                  " tets");
    const bool tagged = m.boundary_faces.count(f) > 0;
    if (c == 1 && !tagged)
      return fail("face " + face_str(f) + " is on the boundary but untagged");
    if (c == 2 && tagged)
      return fail("face " + face_str(f) + " is interior but tagged as boundary");
  }
  for (const auto& [f, tag] : m.boundary_faces)
    if (!count.count(f))
      return fail("tagged face " + face_str(f) + " is not a face of any tet");

  double R = 0.0;
  for (const auto& [f, tag] : m.boundary_faces)
    if (tag == BoundaryTag::sphere)
      for (int v : f) R = std::max(R, m.vertices[v].norm());
  if (R > 0.0)
    for (const auto& [f, tag] : m.boundary_faces) {
      if (tag != BoundaryTag::sphere) continue;
      for (int v : f)
        if (std::abs(m.vertices[v].norm() - R) > 1e-12 * R)
          return fail("sphere-tagged face " + face_str(f) +
                      " has a vertex off the sphere of radius " +
                      std::to_string(R));
    }
  return {};
}

}  // namespace emadapt
