#pragma once

// Discrete differential operators: mixed Voronoi areas, triangle and vertex
// shape operators, the curvature-derivative tensor and discrete gradients.
// Shape operators follow S e = dn along edges, so convex regions with
// outward normals have positive curvature.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dense.hpp"
#include "error.hpp"
#include "mesh.hpp"

namespace meshlines {

/// Mixed Voronoi area of the triangle (pi, pj, pk) at corner pi.
inline double mixed_voronoi_area(const Vec3& pi, const Vec3& pj, const Vec3& pk) {
  const Vec3 eij = pj - pi, eik = pk - pi, ejk = pk - pj;
  const double area = 0.5 * norm(cross(eij, eik));
  if (!(area > 0.0)) throw GeometryError("degenerate triangle in mixed Voronoi area");
  const double di = dot(eij, eik);     // angle at i
  const double dj = dot(-eij, ejk);    // angle at j
  const double dk = dot(-eik, -ejk);   // angle at k
  if (di < 0.0) return area / 2.0;
  if (dj < 0.0 || dk < 0.0) return area / 4.0;
  // cot = dot / |cross|, |cross| = 2 area for every corner
  const double cot_j = dj / (2.0 * area);
  const double cot_k = dk / (2.0 * area);
  return (norm2(eij) * cot_k + norm2(eik) * cot_j) / 8.0;
}

inline std::array<double, 3> corner_areas(const MeshBuffer& mesh, const Triangle& t) {
  const Vec3 &a = mesh.positions[t[0]], &b = mesh.positions[t[1]], &c = mesh.positions[t[2]];
  return {mixed_voronoi_area(a, b, c), mixed_voronoi_area(b, c, a), mixed_voronoi_area(c, a, b)};
}

struct TriangleBasis {
  Vec3 x, y, n;
};

/// x along e1 = pi - pj, y the part of e2 = pj - pk orthogonal to x.
inline TriangleBasis triangle_basis(const Vec3& pi, const Vec3& pj, const Vec3& pk) {
  const Vec3 e1 = pi - pj, e2 = pj - pk;
  const Vec3 c = cross(pj - pi, pk - pi);
  const double scale = std::max(norm2(e1), norm2(e2));
  if (norm(c) <= 1e-12 * scale) throw GeometryError("degenerate triangle in triangle basis");
  TriangleBasis b;
  b.x = e1 / norm(e1);
  const Vec3 e2n = e2 / norm(e2);
  b.y = normalized(cross(b.x, cross(e2n, b.x)));
  b.n = c / norm(c);
  return b;
}

/// Orthonormal tangent frames per vertex.
struct VertexFrame {
  std::vector<Vec3> x, y, n;
};

/// x: projection of the seed axis (1,0,0) onto the tangent plane, with
/// (0,1,0) as the seed when the normal is within ~25 degrees of it.
inline void frame_from_normal(const Vec3& n, Vec3& x, Vec3& y) {
  Vec3 seed{1, 0, 0};
  if (std::abs(n.x) > 0.9) seed = {0, 1, 0};
  x = normalized(seed - n * dot(seed, n));
  y = cross(n, x);
}

inline VertexFrame vertex_frames(const std::vector<Vec3>& normals) {
  VertexFrame f;
  f.n = normals;
  f.x.resize(normals.size());
  f.y.resize(normals.size());
  for (std::size_t i = 0; i < normals.size(); ++i) frame_from_normal(normals[i], f.x[i], f.y[i]);
  return f;
}

/// Least-squares triangle shape operator in the basis (x, y). `rank` < 3
/// signals collinear constraints.
struct TriangleShape {
  Sym2 s;
  std::size_t rank = 0;
};

inline TriangleShape triangle_shape_operator(const std::array<Vec3, 3>& p, const std::array<Vec3, 3>& n,
                                             const TriangleBasis& b) {
  std::array<double, 9> ata{};
  std::array<double, 3> atb{};
  auto row = [&](double c0, double c1, double c2, double rhs) {
    const double r[3] = {c0, c1, c2};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) ata[i * 3 + j] += r[i] * r[j];
      atb[i] += r[i] * rhs;
    }
  };
  for (int k = 0; k < 3; ++k) {
    const int a = k, c = (k + 1) % 3;
    const Vec3 e = p[a] - p[c];
    const Vec3 dn = n[a] - n[c];
    const double u = dot(e, b.x), v = dot(e, b.y);
    row(u, v, 0.0, dot(dn, b.x));  // e u + f v
    row(0.0, u, v, dot(dn, b.y));  // f u + g v
  }
  const auto sol = solve_normal_equations<3>(ata, atb);
  return {{sol.x[0], sol.x[1], sol.x[2]}, sol.rank};
}

/// Rotation taking a triangle frame onto a vertex tangent plane, expressed as
/// the 2x2 matrix R with R * (triangle coords) = (vertex coords).
struct CornerTransform {
  Mat2 r;
  bool valid = false;
};

inline CornerTransform corner_transform(const TriangleBasis& tb, const Vec3& xi, const Vec3& yi, const Vec3& ni) {
  CornerTransform ct;
  const Vec3 axis = cross(tb.n, ni);
  const double s = norm(axis);
  const double angle = std::atan2(s, dot(tb.n, ni));
  if (angle > 179.0 * M_PI / 180.0) return ct;
  Vec3 x = tb.x, y = tb.y;
  if (s > 1e-15) {
    const Vec3 a = axis / s;
    x = rotate(x, a, angle);
    y = rotate(y, a, angle);
  }
  ct.r = {dot(xi, x), dot(xi, y), dot(yi, x), dot(yi, y)};
  ct.valid = true;
  return ct;
}

/// S in vertex coordinates from S in triangle coordinates: R S R^T.
inline Sym2 to_vertex(const Sym2& s, const Mat2& r) {
  const Mat2 m = r * Mat2::from(s) * r.transposed();
  return {m.a, 0.5 * (m.b + m.c), m.d};
}

/// Packed symmetric 3-tensor (a, b, c, d): D_v S = (a b; b c), D_w S = (b c; c d).
struct Cubic2 {
  double a = 0, b = 0, c = 0, d = 0;

  Cubic2 operator+(const Cubic2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  Cubic2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
  Cubic2& operator+=(const Cubic2& o) { return *this = *this + o; }
  bool is_zero() const { return a == 0 && b == 0 && c == 0 && d == 0; }
};

/// D_u kappa = sum C_ijk u_i u_j u_k.
inline double directional_curvature_derivative(const Cubic2& c, const Vec2& u) {
  const double x = u.x, y = u.y;
  return c.a * x * x * x + 3 * c.b * x * x * y + 3 * c.c * x * y * y + c.d * y * y * y;
}

/// Change of basis for the packed tensor: C'(u) = C(R^T u).
inline Cubic2 transform(const Cubic2& c, const Mat2& r) {
  const double t[2][2][2] = {{{c.a, c.b}, {c.b, c.c}}, {{c.b, c.c}, {c.c, c.d}}};
  const double m[2][2] = {{r.a, r.b}, {r.c, r.d}};
  auto comp = [&](int p, int q, int s) {
    double acc = 0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) acc += m[p][i] * m[q][j] * m[s][k] * t[i][j][k];
    return acc;
  };
  return {comp(0, 0, 0), comp(0, 0, 1), comp(0, 1, 1), comp(1, 1, 1)};
}

/// Mesh with everything the operators share: adjacency, normals, frames,
/// triangle bases, corner areas and corner transforms.
struct MeshGeometry {
  MeshBuffer mesh;
  Adjacency adj;
  NormalField normals;
  VertexFrame frames;
  std::vector<TriangleBasis> tri_basis;
  std::vector<std::array<double, 3>> corner_area;
  std::vector<std::array<CornerTransform, 3>> corner;
  std::vector<double> vertex_area;
  std::size_t dropped_corners = 0;
};

/// Builds the shared geometry; `normals` overrides the vertex normals (e.g. after smoothing).
inline MeshGeometry make_geometry(MeshBuffer mesh, const std::vector<Vec3>* normals = nullptr,
                                  Diagnostics* diag = nullptr) {
  MeshGeometry g;
  g.mesh = std::move(mesh);
  g.adj = build_adjacency(g.mesh);
  g.normals = vertex_normals(g.mesh, g.adj);
  if (normals) g.normals.vertex = *normals;
  g.frames = vertex_frames(g.normals.vertex);
  const std::size_t nt = g.mesh.triangles.size();
  g.tri_basis.resize(nt);
  g.corner_area.resize(nt);
  g.corner.resize(nt);
  g.vertex_area.assign(g.mesh.positions.size(), 0.0);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = g.mesh.triangles[t];
    const Vec3 &pi = g.mesh.positions[tri[0]], &pj = g.mesh.positions[tri[1]], &pk = g.mesh.positions[tri[2]];
    g.tri_basis[t] = triangle_basis(pi, pj, pk);
    g.corner_area[t] = corner_areas(g.mesh, tri);
    for (int k = 0; k < 3; ++k) {
      const int v = tri[k];
      g.vertex_area[v] += g.corner_area[t][k];
      g.corner[t][k] = corner_transform(g.tri_basis[t], g.frames.x[v], g.frames.y[v], g.frames.n[v]);
      if (!g.corner[t][k].valid) {
        ++g.dropped_corners;
        note(diag, "triangle " + std::to_string(t) + " folds over vertex " + std::to_string(v) +
                       " (normal angle > 179 degrees); contribution dropped");
      }
    }
  }
  return g;
}

struct CurvatureField {
  std::vector<Sym2> shape;  // in the vertex frame
  std::vector<double> kappa1, kappa2;  // |kappa1| >= |kappa2|
  std::vector<Vec3> k1, k2;
  std::vector<Vec2> k1_local;  // k1 in vertex frame coordinates
  std::vector<double> area;   // mixed Voronoi area
  std::vector<std::size_t> rank_deficient_triangles;
};

inline void accumulate_check(double weight, std::size_t v) {
  if (!(weight > 0.0)) throw NumericError("vertex " + std::to_string(v) + " has zero total weight");
}

/// Per-vertex shape operators: each incident triangle's S rotated into the
/// vertex frame, weighted by its mixed Voronoi area, then averaged.
inline CurvatureField vertex_shape_operators(const MeshGeometry& g, Diagnostics* diag = nullptr) {
  const std::size_t nv = g.mesh.positions.size();
  CurvatureField cf;
  cf.shape.assign(nv, Sym2{});
  cf.area = g.vertex_area;
  std::vector<double> weight(nv, 0.0);
  for (std::size_t t = 0; t < g.mesh.triangles.size(); ++t) {
    const auto& tri = g.mesh.triangles[t];
    const std::array<Vec3, 3> p{g.mesh.positions[tri[0]], g.mesh.positions[tri[1]], g.mesh.positions[tri[2]]};
    const std::array<Vec3, 3> n{g.normals.vertex[tri[0]], g.normals.vertex[tri[1]], g.normals.vertex[tri[2]]};
    const TriangleShape ts = triangle_shape_operator(p, n, g.tri_basis[t]);
    if (ts.rank < 3) {
      cf.rank_deficient_triangles.push_back(t);
      note(diag, "triangle " + std::to_string(t) + " has rank-deficient shape constraints; weight set to zero");
      continue;
    }
    for (int k = 0; k < 3; ++k) {
      const auto& ct = g.corner[t][k];
      if (!ct.valid) continue;
      const double w = g.corner_area[t][k];
      cf.shape[tri[k]] += to_vertex(ts.s, ct.r) * w;
      weight[tri[k]] += w;
    }
  }
  cf.kappa1.resize(nv);
  cf.kappa2.resize(nv);
  cf.k1.resize(nv);
  cf.k2.resize(nv);
  cf.k1_local.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    accumulate_check(weight[v], v);
    cf.shape[v] = cf.shape[v] * (1.0 / weight[v]);
    const Eigen2 e = eigen(cf.shape[v]);
    Vec2 d1 = e.dir_hi, d2 = e.dir_lo;
    double l1 = e.value_hi, l2 = e.value_lo;
    if (std::abs(l2) > std::abs(l1)) std::swap(l1, l2), std::swap(d1, d2);
    cf.kappa1[v] = l1;
    cf.kappa2[v] = l2;
    cf.k1_local[v] = d1;
    cf.k1[v] = g.frames.x[v] * d1.x + g.frames.y[v] * d1.y;
    cf.k2[v] = g.frames.x[v] * d2.x + g.frames.y[v] * d2.y;
  }
  return cf;
}

using CurvatureDerivative = std::vector<Cubic2>;

/// Per-triangle least-squares fit of C from the edge differences of the vertex
/// shape operators (expressed in the triangle frame), then Voronoi-weighted
/// accumulation into the vertex frames.
inline CurvatureDerivative curvature_derivative(const MeshGeometry& g, const CurvatureField& cf) {
  const std::size_t nv = g.mesh.positions.size();
  CurvatureDerivative out(nv);
  std::vector<double> weight(nv, 0.0);
  for (std::size_t t = 0; t < g.mesh.triangles.size(); ++t) {
    const auto& tri = g.mesh.triangles[t];
    const auto& tb = g.tri_basis[t];
    bool ok = true;
    std::array<Sym2, 3> s;
    for (int k = 0; k < 3; ++k) {
      const auto& ct = g.corner[t][k];
      if (!ct.valid) {
        ok = false;
        break;
      }
      // vertex coords -> triangle coords: R^T S R
      const Mat2 m = ct.r.transposed() * Mat2::from(cf.shape[tri[k]]) * ct.r;
      s[k] = {m.a, 0.5 * (m.b + m.c), m.d};
    }
    if (!ok) continue;
    std::array<double, 16> ata{};
    std::array<double, 4> atb{};
    auto row = [&](std::array<double, 4> r, double rhs) {
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) ata[i * 4 + j] += r[i] * r[j];
        atb[i] += r[i] * rhs;
      }
    };
    for (int k = 0; k < 3; ++k) {
      const int a = k, c = (k + 1) % 3;
      const Vec3 e = g.mesh.positions[tri[a]] - g.mesh.positions[tri[c]];
      const double u = dot(e, tb.x), v = dot(e, tb.y);
      const Sym2 ds = s[a] - s[c];
      row({u, v, 0, 0}, ds.e);
      row({0, u, v, 0}, ds.f);
      row({0, 0, u, v}, ds.g);
    }
    const auto sol = solve_normal_equations<4>(ata, atb);
    if (sol.rank < 4) continue;
    const Cubic2 ctri{sol.x[0], sol.x[1], sol.x[2], sol.x[3]};
    for (int k = 0; k < 3; ++k) {
      const double w = g.corner_area[t][k];
      out[tri[k]] += transform(ctri, g.corner[t][k].r) * w;
      weight[tri[k]] += w;
    }
  }
  for (std::size_t v = 0; v < nv; ++v) {
    accumulate_check(weight[v], v);
    out[v] = out[v] * (1.0 / weight[v]);
  }
  return out;
}

/// Gradient of the linear interpolant of (phi_i, phi_j, phi_k) over the triangle.
inline Vec3 triangle_gradient(const Vec3& pi, const Vec3& pj, const Vec3& pk, double phi_i, double phi_j,
                              double phi_k, const TriangleBasis& b) {
  const Vec2 qj{dot(pj - pi, b.x), dot(pj - pi, b.y)};
  const Vec2 qk{dot(pk - pi, b.x), dot(pk - pi, b.y)};
  const Mat2 m{qj.x, qj.y, qk.x, qk.y};
  const double det = m.det();
  if (std::abs(det) <= 1e-300) throw NumericError("singular flattening in triangle gradient");
  const Vec2 ab = m.inverse() * Vec2{phi_j - phi_i, phi_k - phi_i};
  return b.x * ab.x + b.y * ab.y;
}

inline Vec3 triangle_gradient(const Vec3& pi, const Vec3& pj, const Vec3& pk, double phi_i, double phi_j,
                              double phi_k) {
  return triangle_gradient(pi, pj, pk, phi_i, phi_j, phi_k, triangle_basis(pi, pj, pk));
}

inline Vec3 triangle_gradient(const MeshGeometry& g, std::size_t t, const std::vector<double>& phi) {
  const auto& tri = g.mesh.triangles[t];
  return triangle_gradient(g.mesh.positions[tri[0]], g.mesh.positions[tri[1]], g.mesh.positions[tri[2]],
                           phi[tri[0]], phi[tri[1]], phi[tri[2]], g.tri_basis[t]);
}

/// Per-vertex gradient: triangle gradients rotated into the vertex tangent
/// plane and Voronoi-averaged.
inline std::vector<Vec3> vertex_gradient(const MeshGeometry& g, const std::vector<double>& phi) {
  const std::size_t nv = g.mesh.positions.size();
  std::vector<Vec2> acc(nv);
  std::vector<double> weight(nv, 0.0);
  for (std::size_t t = 0; t < g.mesh.triangles.size(); ++t) {
    const auto& tri = g.mesh.triangles[t];
    const Vec3 gr = triangle_gradient(g, t, phi);
    const Vec2 local{dot(gr, g.tri_basis[t].x), dot(gr, g.tri_basis[t].y)};
    for (int k = 0; k < 3; ++k) {
      const auto& ct = g.corner[t][k];
      if (!ct.valid) continue;
      const double w = g.corner_area[t][k];
      acc[tri[k]] = acc[tri[k]] + (ct.r * local) * w;
      weight[tri[k]] += w;
    }
  }
  std::vector<Vec3> out(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    accumulate_check(weight[v], v);
    const Vec2 a = acc[v] / weight[v];
    out[v] = g.frames.x[v] * a.x + g.frames.y[v] * a.y;
  }
  return out;
}

/// D_w phi = <grad phi, w>.
inline double covariant_derivative(const Vec3& gradient, const Vec3& w) { return dot(gradient, w); }

}  // namespace meshlines
