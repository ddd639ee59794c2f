#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "vec.hpp"

namespace meshlines {

using Triangle = std::array<int, 3>;

/// Indexed triangle mesh. Triangles are counter-clockwise seen from the
/// side the surface normal points to.
struct MeshBuffer {
  std::vector<Vec3> positions;
  std::vector<Triangle> triangles;

  std::size_t vertex_count() const { return positions.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
};

/// Undirected edge with `a < b`.
struct Edge {
  int a = 0;
  int b = 0;
  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

inline Edge make_edge(int i, int j) { return i < j ? Edge{i, j} : Edge{j, i}; }

inline std::uint64_t edge_key(int i, int j) {
  const auto e = make_edge(i, j);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(e.a)) << 32) | static_cast<std::uint32_t>(e.b);
}

struct BoundingBox {
  Vec3 lo;
  Vec3 hi;
  double diagonal() const { return distance(lo, hi); }
  Vec3 center() const { return (lo + hi) * 0.5; }
};

inline BoundingBox bounding_box(const std::vector<Vec3>& pts) {
  BoundingBox box;
  if (pts.empty()) return box;
  box.lo = box.hi = pts.front();
  for (const auto& p : pts) {
    for (int k = 0; k < 3; ++k) {
      box.lo[k] = std::min(box.lo[k], p[k]);
      box.hi[k] = std::max(box.hi[k], p[k]);
    }
  }
  return box;
}

/// Area-weighted, un-normalized triangle normal (twice the area in length).
inline Vec3 triangle_cross(const MeshBuffer& mesh, const Triangle& t) {
  const Vec3& p0 = mesh.positions[t[0]];
  return cross(mesh.positions[t[1]] - p0, mesh.positions[t[2]] - p0);
}

inline double triangle_area(const MeshBuffer& mesh, const Triangle& t) { return 0.5 * norm(triangle_cross(mesh, t)); }

inline double total_area(const MeshBuffer& mesh) {
  double a = 0.0;
  for (const auto& t : mesh.triangles) a += triangle_area(mesh, t);
  return a;
}

/// Area below which a triangle counts as degenerate: 1e-12 * diag^2.
inline double degenerate_area_tolerance(const MeshBuffer& mesh) {
  const double d = bounding_box(mesh.positions).diagonal();
  return 1e-12 * d * d;
}

/// Connectivity derived from a MeshBuffer. Edge ids index `edges`, which is
/// sorted lexicographically; neighbor lists are sorted by vertex index.
struct Adjacency {
  std::vector<Edge> edges;
  std::vector<std::array<int, 2>> edge_triangles;       // second entry -1 on boundary edges
  std::vector<std::array<int, 3>> triangle_edges;       // edges (t0,t1), (t1,t2), (t2,t0)
  std::vector<std::vector<int>> vertex_triangles;
  std::vector<std::vector<int>> neighbors;
  std::vector<char> boundary_vertex;
  std::unordered_map<std::uint64_t, int> edge_lookup;

  /// Edge id of (i, j) or -1.
  int edge_id(int i, int j) const {
    const auto it = edge_lookup.find(edge_key(i, j));
    return it == edge_lookup.end() ? -1 : it->second;
  }
  bool is_boundary_edge(int e) const { return edge_triangles[e][1] < 0; }
  bool is_boundary_vertex(int v) const { return boundary_vertex[v] != 0; }
};

inline Adjacency build_adjacency(const MeshBuffer& mesh) {
  const std::size_t nv = mesh.positions.size();
  Adjacency adj;
  std::vector<std::pair<Edge, int>> incidences;
  incidences.reserve(mesh.triangles.size() * 3);
  adj.vertex_triangles.assign(nv, {});
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      incidences.emplace_back(make_edge(tri[k], tri[(k + 1) % 3]), static_cast<int>(t));
      adj.vertex_triangles[tri[k]].push_back(static_cast<int>(t));
    }
  }
  std::sort(incidences.begin(), incidences.end());
  std::vector<std::string> offending;
  for (std::size_t i = 0; i < incidences.size();) {
    std::size_t j = i;
    while (j < incidences.size() && incidences[j].first == incidences[i].first) ++j;
    const int id = static_cast<int>(adj.edges.size());
    adj.edges.push_back(incidences[i].first);
    std::array<int, 2> tris{incidences[i].second, -1};
    if (j - i >= 2) tris[1] = incidences[i + 1].second;
    if (j - i > 2) {
      const auto& e = incidences[i].first;
      offending.push_back("edge " + std::to_string(id) + " (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                          ") with " + std::to_string(j - i) + " triangles");
    }
    adj.edge_triangles.push_back(tris);
    adj.edge_lookup.emplace(edge_key(incidences[i].first.a, incidences[i].first.b), id);
    i = j;
  }
  if (!offending.empty()) {
    std::ostringstream os;
    os << "non-manifold configuration:";
    for (const auto& s : offending) os << ' ' << s << ';';
    throw GeometryError(os.str());
  }
  adj.triangle_edges.resize(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) adj.triangle_edges[t][k] = adj.edge_id(tri[k], tri[(k + 1) % 3]);
  }
  adj.neighbors.assign(nv, {});
  adj.boundary_vertex.assign(nv, 0);
  for (std::size_t e = 0; e < adj.edges.size(); ++e) {
    const auto& edge = adj.edges[e];
    adj.neighbors[edge.a].push_back(edge.b);
    adj.neighbors[edge.b].push_back(edge.a);
    if (adj.edge_triangles[e][1] < 0) adj.boundary_vertex[edge.a] = adj.boundary_vertex[edge.b] = 1;
  }
  for (auto& n : adj.neighbors) std::sort(n.begin(), n.end());
  return adj;
}

/// Checks index range, degeneracy, manifoldness and orientation consistency.
/// Throws GeometryError naming the offending triangle or edge.
inline void validate_mesh(const MeshBuffer& mesh) {
  if (mesh.positions.empty() || mesh.triangles.empty()) throw GeometryError("empty mesh");
  const int n = static_cast<int>(mesh.positions.size());
  const double tol = degenerate_area_tolerance(mesh);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int v : tri)
      if (v < 0 || v >= n)
        throw GeometryError("triangle " + std::to_string(t) + " references vertex " + std::to_string(v) +
                            " out of range (vertex count " + std::to_string(n) + ")");
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw GeometryError("triangle " + std::to_string(t) + " repeats a vertex index");
    if (triangle_area(mesh, tri) <= tol) throw GeometryError("triangle " + std::to_string(t) + " has zero area");
  }
  build_adjacency(mesh);  // throws on non-manifold edges, naming edge ids
  // Adjacent triangles must traverse a shared edge in opposite directions.
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(mesh.triangles.size() * 3);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int i = tri[k];
      const int j = tri[(k + 1) % 3];
      const std::uint64_t dkey = (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j);
      if (++directed[dkey] > 1)
        throw GeometryError("inconsistent orientation at edge (" + std::to_string(i) + "," + std::to_string(j) +
                            "), triangle " + std::to_string(t));
    }
  }
}

/// Per-vertex and per-triangle unit normals.
struct NormalField {
  std::vector<Vec3> vertex;
  std::vector<Vec3> face;
};

/// Interior angle of triangle `t` at local corner `k`.
inline double corner_angle(const MeshBuffer& mesh, const Triangle& t, int k) {
  const Vec3& p = mesh.positions[t[k]];
  return angle_between(mesh.positions[t[(k + 1) % 3]] - p, mesh.positions[t[(k + 2) % 3]] - p);
}

inline std::vector<Vec3> face_normals(const MeshBuffer& mesh) {
  std::vector<Vec3> out(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Vec3 c = triangle_cross(mesh, mesh.triangles[t]);
    const double n = norm(c);
    if (n == 0.0) throw GeometryError("triangle " + std::to_string(t) + " has zero area");
    out[t] = c / n;
  }
  return out;
}

/// Vertex normal weights: incident angle (default), or Max's
/// sin(angle) / (|a| |b|) weights, which are exact for vertices on a sphere.
enum class NormalWeighting { angle, max };

/// Face normals from edge cross products; vertex normals as the weighted
/// sum of incident face normals, normalized.
inline NormalField vertex_normals(const MeshBuffer& mesh, const Adjacency& adj,
                                  NormalWeighting weighting = NormalWeighting::angle) {
  NormalField nf;
  nf.face = face_normals(mesh);
  nf.vertex.assign(mesh.positions.size(), Vec3{});
  for (std::size_t v = 0; v < mesh.positions.size(); ++v) {
    if (adj.vertex_triangles[v].empty()) throw GeometryError("isolated vertex " + std::to_string(v));
    Vec3 acc;
    for (int t : adj.vertex_triangles[v]) {
      const auto& tri = mesh.triangles[t];
      const int k = tri[0] == static_cast<int>(v) ? 0 : (tri[1] == static_cast<int>(v) ? 1 : 2);
      if (weighting == NormalWeighting::angle) {
        acc += nf.face[t] * corner_angle(mesh, tri, k);
      } else {
        const Vec3& p = mesh.positions[v];
        const Vec3 a = mesh.positions[tri[(k + 1) % 3]] - p, b = mesh.positions[tri[(k + 2) % 3]] - p;
        acc += cross(a, b) / (norm2(a) * norm2(b));
      }
    }
    const double n = norm(acc);
    if (n < 1e-300) throw NumericError("vertex " + std::to_string(v) + " has a vanishing normal");
    nf.vertex[v] = acc / n;
  }
  return nf;
}

inline double mean_edge_length(const MeshBuffer& mesh, const Adjacency& adj) {
  if (adj.edges.empty()) return 0.0;
  double s = 0.0;
  for (const auto& e : adj.edges) s += distance(mesh.positions[e.a], mesh.positions[e.b]);
  return s / static_cast<double>(adj.edges.size());
}

inline int euler_characteristic(const MeshBuffer& mesh, const Adjacency& adj) {
  return static_cast<int>(mesh.positions.size()) - static_cast<int>(adj.edges.size()) +
         static_cast<int>(mesh.triangles.size());
}

/// Number of boundary loops' vertices (vertices on at least one boundary edge).
inline std::size_t boundary_vertex_count(const Adjacency& adj) {
  return static_cast<std::size_t>(std::count(adj.boundary_vertex.begin(), adj.boundary_vertex.end(), 1));
}

/// Applies `f` to every vertex position.
template <class F>
MeshBuffer transformed(MeshBuffer mesh, F&& f) {
  for (auto& p : mesh.positions) p = f(p);
  return mesh;
}

/// Reverses every triangle's orientation.
inline MeshBuffer flipped(MeshBuffer mesh) {
  for (auto& t : mesh.triangles) std::swap(t[1], t[2]);
  return mesh;
}

}  // namespace meshlines
