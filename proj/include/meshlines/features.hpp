#pragma once

// The eight feature-line extractors plus the camera, light and view data
// the view-dependent ones consume.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddg.hpp"
#include "dense.hpp"
#include "error.hpp"
#include "isoline.hpp"
#include "laplace.hpp"
#include "mesh.hpp"

namespace meshlines {

// ---------------------------------------------------------------------------
// Camera, lights, view context

enum class Projection { orthographic, perspective };

struct Camera {
  Vec3 eye{0, 0, 5};
  Vec3 look{0, 0, 0};
  Vec3 up{0, 1, 0};
  Projection projection = Projection::perspective;
  double fov_deg = 30.0;

  Vec3 direction() const { return normalized(look - eye); }
  /// Screen basis: v1 to the right, v2 up, both orthogonal to the view direction.
  Vec3 v1() const { return normalized(cross(direction(), up)); }
  Vec3 v2() const { return cross(v1(), direction()); }

  void validate() const {
    if (norm(look - eye) <= 0.0) throw ParseError("camera eye and look coincide");
    if (norm(cross(direction(), up)) < 1e-9) throw ParseError("camera up is parallel to the view direction");
    if (!(fov_deg > 0.0 && fov_deg < 180.0)) throw ParseError("camera fov must lie in (0, 180)");
  }

  /// Unit vector from p toward the viewer.
  Vec3 view_vector(const Vec3& p) const {
    if (projection == Projection::orthographic) return -direction();
    const Vec3 d = eye - p;
    const double n = norm(d);
    if (n <= 1e-12 * std::max(1.0, norm(eye))) throw GeometryError("vertex coincides with the camera eye");
    return d / n;
  }

  /// Screen coordinates (x right, y up) in units of the view half-height
  /// at unit distance; orthographic uses model units.
  Vec2 project(const Vec3& p) const {
    const Vec3 d = p - eye;
    const double x = dot(d, v1()), y = dot(d, v2());
    if (projection == Projection::orthographic) return {x, y};
    const double z = dot(d, direction());
    return {x / z, y / z};
  }

  /// Signed distance along the view direction.
  double depth(const Vec3& p) const { return dot(p - eye, direction()); }
};

/// Camera on a circle around `look`: the eye sits at `radius` in the plane
/// spanned by `a` and `b` at angle `deg` from `a`.
inline Camera orbit_camera(const Vec3& look, double radius, const Vec3& a, const Vec3& b, double deg, Vec3 up,
                           Projection proj = Projection::orthographic) {
  const double t = deg * M_PI / 180.0;
  Camera c;
  c.look = look;
  c.eye = look + (a * std::cos(t) + b * std::sin(t)) * radius;
  c.up = up;
  c.projection = proj;
  return c;
}

enum class LightKind { headlight, directional, point };

struct Light {
  LightKind kind = LightKind::headlight;
  Vec3 vec;  // directional: toward the light; point: position
  double intensity = 1.0;
};

struct LightRig {
  std::vector<Light> lights{Light{}};
};

/// Per-vertex view data. `f` is the linear (unclamped) illumination
/// sum_l I_l <n, l>, which is <n, v> for the default headlight.
struct ViewContext {
  std::vector<Vec3> v;
  std::vector<double> f;
  std::vector<Vec3> w;  // (Id - n n^T) v
  std::vector<double> ndotv;
};

inline ViewContext view_context(const MeshBuffer& mesh, const std::vector<Vec3>& normals, const Camera& cam,
                                const LightRig& rig) {
  if (rig.lights.empty()) throw ParseError("light rig is empty");
  cam.validate();
  const std::size_t n = mesh.positions.size();
  ViewContext ctx;
  ctx.v.resize(n);
  ctx.f.assign(n, 0.0);
  ctx.w.resize(n);
  ctx.ndotv.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& p = mesh.positions[i];
    const Vec3& nn = normals[i];
    ctx.v[i] = cam.view_vector(p);
    ctx.ndotv[i] = dot(nn, ctx.v[i]);
    ctx.w[i] = ctx.v[i] - nn * ctx.ndotv[i];
    for (const auto& l : rig.lights) {
      Vec3 dir;
      switch (l.kind) {
        case LightKind::headlight: dir = ctx.v[i]; break;
        case LightKind::directional: dir = normalized(l.vec); break;
        case LightKind::point: dir = normalized(l.vec - p); break;
      }
      ctx.f[i] += l.intensity * dot(nn, dir);
    }
  }
  return ctx;
}

inline ViewContext view_context(const MeshGeometry& g, const Camera& cam, const LightRig& rig) {
  return view_context(g.mesh, g.normals.vertex, cam, rig);
}

/// Threshold in normalized units (divided by a method-specific mesh scale)
/// or in absolute field units.
struct Threshold {
  double value = 0.0;
  bool absolute = false;

  double resolve(double scale) const { return absolute ? value : value * scale; }
};

namespace detail {

inline double sgn(double x) { return x < 0 ? -1.0 : 1.0; }

inline double mean3(const std::vector<double>& f, const Triangle& t) { return (f[t[0]] + f[t[1]] + f[t[2]]) / 3.0; }

/// Per-edge sign of <d_a, d_b> for a direction field defined up to sign.
inline std::vector<signed char> edge_signs(const Adjacency& adj, const std::vector<Vec3>& dir) {
  std::vector<signed char> s(adj.edges.size(), 1);
  for (std::size_t e = 0; e < adj.edges.size(); ++e)
    s[e] = dot(dir[adj.edges[e].a], dir[adj.edges[e].b]) < 0 ? -1 : 1;
  return s;
}

inline double percentile95_where(const std::vector<double>& v, const std::vector<char>& excluded) {
  std::vector<double> a;
  for (std::size_t i = 0; i < v.size(); ++i)
    if ((excluded.empty() || !excluded[i]) && std::isfinite(v[i])) a.push_back(v[i]);
  return percentile95(std::move(a));
}

inline void set_strength(LineSet& ls, const std::vector<double>& weight, bool absolute_value) {
  for (auto& pl : ls.polylines) {
    const double s = line_strength(pl, weight);
    pl.strength = absolute_value ? std::abs(s) : s;
  }
}

/// Vertex chains along flagged mesh edges; chains break at vertices whose
/// flagged degree differs from 2.
inline std::vector<Polyline> chain_edges(const Adjacency& adj, const std::vector<char>& flagged,
                                         const MeshBuffer& mesh) {
  const std::size_t nv = adj.neighbors.size();
  std::vector<std::vector<int>> inc(nv);  // flagged edge ids per vertex
  for (std::size_t e = 0; e < adj.edges.size(); ++e)
    if (flagged[e]) {
      inc[adj.edges[e].a].push_back(static_cast<int>(e));
      inc[adj.edges[e].b].push_back(static_cast<int>(e));
    }
  std::vector<char> used(adj.edges.size(), 0);
  auto point_at = [&](int v, int e) {
    const Edge& ed = adj.edges[e];
    OnEdgePoint p;
    p.a = ed.a;
    p.b = ed.b;
    p.t = v == ed.a ? 0.0 : 1.0;
    p.xyz = mesh.positions[v];
    return p;
  };
  auto walk = [&](int v, int e, std::vector<int>& verts, std::vector<int>& edges) {
    // From v along e until a break vertex or a used edge.
    for (;;) {
      used[e] = 1;
      const Edge& ed = adj.edges[e];
      const int w = ed.a == v ? ed.b : ed.a;
      verts.push_back(w);
      edges.push_back(e);
      if (inc[w].size() != 2) return;
      const int nxt = inc[w][0] == e ? inc[w][1] : inc[w][0];
      if (used[nxt]) return;
      v = w;
      e = nxt;
    }
  };
  std::vector<Polyline> out;
  auto emit = [&](const std::vector<int>& verts, const std::vector<int>& edges, bool closed) {
    Polyline pl;
    pl.closed = closed;
    for (std::size_t k = 0; k < verts.size(); ++k) {
      const int e = k < edges.size() ? edges[k] : edges.back();
      pl.points.push_back(point_at(verts[k], e));
    }
    out.push_back(std::move(pl));
  };
  // Open chains start at break vertices, in vertex order.
  for (std::size_t v = 0; v < nv; ++v) {
    if (inc[v].empty() || inc[v].size() == 2) continue;
    for (int e : inc[v]) {
      if (used[e]) continue;
      std::vector<int> verts{static_cast<int>(v)}, edges;
      walk(static_cast<int>(v), e, verts, edges);
      emit(verts, edges, false);
    }
  }
  // Remaining edges form closed loops through degree-2 vertices.
  for (std::size_t e = 0; e < adj.edges.size(); ++e) {
    if (!flagged[e] || used[e]) continue;
    const int v = adj.edges[e].a;
    std::vector<int> verts{v}, edges;
    walk(v, static_cast<int>(e), verts, edges);
    if (verts.size() > 1 && verts.back() == v) {
      verts.pop_back();
      emit(verts, edges, true);
    } else {
      emit(verts, edges, false);
    }
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Contours

enum class ContourMode { smooth, edge };

/// Smooth: zero set of <n_i, v_i>. Edge: mesh edges whose two faces have
/// opposite sign of <n_face, v> (v taken at the edge midpoint).
inline LineSet contours(const MeshGeometry& g, const ViewContext& ctx, const Camera& cam,
                        ContourMode mode = ContourMode::smooth) {
  LineSet ls;
  ls.method = "contour";
  if (mode == ContourMode::smooth) {
    ls = extract_zero_set(g.mesh, g.adj, ctx.ndotv);
    ls.method = "contour";
  } else {
    std::vector<char> flagged(g.adj.edges.size(), 0);
    for (std::size_t e = 0; e < g.adj.edges.size(); ++e) {
      const auto& et = g.adj.edge_triangles[e];
      if (et[1] < 0) continue;
      const Edge& ed = g.adj.edges[e];
      const Vec3 v = cam.view_vector((g.mesh.positions[ed.a] + g.mesh.positions[ed.b]) * 0.5);
      flagged[e] = (dot(g.normals.face[et[0]], v) > 0) != (dot(g.normals.face[et[1]], v) > 0);
    }
    ls.polylines = detail::chain_edges(g.adj, flagged, g.mesh);
  }
  for (auto& pl : ls.polylines) pl.strength = polyline_length(pl);
  return ls;
}

// ---------------------------------------------------------------------------
// Crease lines

/// Interior edges whose face normals satisfy <n1, n2> <= cos(angle).
inline LineSet crease_lines(const MeshGeometry& g, double angle_deg) {
  const double c = std::cos(angle_deg * M_PI / 180.0);
  std::vector<char> flagged(g.adj.edges.size(), 0);
  for (std::size_t e = 0; e < g.adj.edges.size(); ++e) {
    const auto& et = g.adj.edge_triangles[e];
    if (et[1] < 0) continue;
    flagged[e] = dot(g.normals.face[et[0]], g.normals.face[et[1]]) <= c + 1e-12;
  }
  LineSet ls;
  ls.method = "crease";
  ls.polylines = detail::chain_edges(g.adj, flagged, g.mesh);
  for (auto& pl : ls.polylines) pl.strength = polyline_length(pl);
  return ls;
}

// ---------------------------------------------------------------------------
// Ridges and valleys

struct RidgeValleyOptions {
  Threshold ridge{0.02};   // on |int kappa1| / (p95|kappa1| * diag)
  Threshold valley{0.02};
};

struct RidgeValleyFields {
  std::vector<double> e1;  // D_k1 kappa1 with the vertex's own k1
  std::vector<char> excluded;
  std::vector<signed char> edge_sign;
};

inline RidgeValleyFields ridge_valley_fields(const MeshGeometry& g, const CurvatureField& cf) {
  RidgeValleyFields r;
  const std::size_t n = g.mesh.positions.size();
  const auto grad = vertex_gradient(g, cf.kappa1);
  r.e1.resize(n);
  r.excluded.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    r.e1[i] = dot(grad[i], cf.k1[i]);
    if (std::abs(cf.kappa1[i] - cf.kappa2[i]) < 1e-8) r.excluded[i] = 1;
  }
  r.edge_sign = detail::edge_signs(g.adj, cf.k1);
  return r;
}

inline LineSet ridges_valleys(const MeshGeometry& g, const CurvatureField& cf, const RidgeValleyOptions& opt = {},
                              Diagnostics* diag = nullptr) {
  const RidgeValleyFields rv = ridge_valley_fields(g, cf);
  const std::size_t umbilic = static_cast<std::size_t>(std::count(rv.excluded.begin(), rv.excluded.end(), 1));
  if (umbilic) note(diag, std::to_string(umbilic) + " umbilic vertices excluded from ridges and valleys");
  auto keep = [&](int t, const Segment&) -> std::optional<Polarity> {
    const auto& tri = g.mesh.triangles[t];
    // Align k1 (and with it e1) to the first vertex, then differentiate e1 along k1.
    double s[3];
    Vec3 kbar;
    for (int m = 0; m < 3; ++m) {
      s[m] = detail::sgn(dot(cf.k1[tri[0]], cf.k1[tri[m]]));
      kbar += cf.k1[tri[m]] * s[m];
    }
    const Vec3 ge = triangle_gradient(g.mesh.positions[tri[0]], g.mesh.positions[tri[1]], g.mesh.positions[tri[2]],
                                      s[0] * rv.e1[tri[0]], s[1] * rv.e1[tri[1]], s[2] * rv.e1[tri[2]],
                                      g.tri_basis[t]);
    const double e2 = dot(ge, normalized(kbar));
    const double k = detail::mean3(cf.kappa1, tri);
    if (e2 < 0 && k > 0) return Polarity::ridge;
    if (e2 > 0 && k < 0) return Polarity::valley;
    return std::nullopt;
  };
  ZeroSetOptions zo;
  zo.edge_sign = rv.edge_sign;
  zo.excluded = rv.excluded;
  LineSet ls = extract_zero_set(g.mesh, g.adj, rv.e1, keep, zo, nullptr, diag);
  ls.method = "rv";
  detail::set_strength(ls, cf.kappa1, true);
  const double scale = percentile95(cf.kappa1) * bounding_box(g.mesh.positions).diagonal();
  const double tr = opt.ridge.resolve(scale), tv = opt.valley.resolve(scale);
  std::erase_if(ls.polylines, [&](const Polyline& p) { return p.strength < (p.polarity == Polarity::ridge ? tr : tv); });
  return ls;
}

// ---------------------------------------------------------------------------
// Suggestive contours

struct SuggestiveOptions {
  Threshold low{0.05};   // hysteresis on D_w kappa_r / |w|, normalized by p95
  Threshold high{0.1};
  bool illumination = false;  // zero set of D_w <n, v> instead of kappa_r
};

struct SuggestiveFields {
  std::vector<double> kr;      // radial curvature (or D_w f for the illumination variant)
  std::vector<double> dwkr;    // derivative along w / |w|
  std::vector<char> excluded;  // |w| tiny or back-facing
};

inline SuggestiveFields suggestive_fields(const MeshGeometry& g, const CurvatureField& cf, const ViewContext& ctx,
                                          bool illumination = false) {
  const std::size_t n = g.mesh.positions.size();
  SuggestiveFields s;
  s.kr.assign(n, 0.0);
  s.dwkr.assign(n, 0.0);
  s.excluded.assign(n, 0);
  std::vector<Vec3> wh(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double wn = norm(ctx.w[i]);
    if (wn < 1e-8 || ctx.ndotv[i] <= 0.0) {
      s.excluded[i] = 1;
      continue;
    }
    wh[i] = ctx.w[i] / wn;
  }
  if (illumination) {
    const auto gf = vertex_gradient(g, ctx.f);
    for (std::size_t i = 0; i < n; ++i)
      if (!s.excluded[i]) s.kr[i] = dot(gf[i], wh[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (s.excluded[i]) continue;
      const double a = dot(wh[i], cf.k1[i]), b = dot(wh[i], cf.k2[i]);
      s.kr[i] = a * a * cf.kappa1[i] + b * b * cf.kappa2[i];
    }
  }
  const auto gk = vertex_gradient(g, s.kr);
  for (std::size_t i = 0; i < n; ++i)
    if (!s.excluded[i]) s.dwkr[i] = dot(gk[i], wh[i]);
  return s;
}

inline LineSet suggestive_contours(const MeshGeometry& g, const CurvatureField& cf, const ViewContext& ctx,
                                   const SuggestiveOptions& opt = {}, Diagnostics* diag = nullptr) {
  const SuggestiveFields sf = suggestive_fields(g, cf, ctx, opt.illumination);
  auto keep = [&](int, const Segment& seg) -> std::optional<Polarity> {
    if (interpolate(seg.p, sf.dwkr) > 0 && interpolate(seg.q, sf.dwkr) > 0) return Polarity::none;
    return std::nullopt;
  };
  ZeroSetOptions zo;
  zo.excluded = sf.excluded;
  LineSet ls = extract_zero_set(g.mesh, g.adj, sf.kr, keep, zo, nullptr, diag);
  for (auto& pl : ls.polylines) {
    attach_values(pl, sf.dwkr);
    pl.strength = line_strength(pl, sf.dwkr);
  }
  const double scale = detail::percentile95_where(sf.dwkr, sf.excluded);
  ls = filter_hysteresis(ls, opt.low.resolve(scale), opt.high.resolve(scale));
  ls.method = "sc";
  return ls;
}

// ---------------------------------------------------------------------------
// Apparent ridges

struct ApparentOptions {
  Threshold tau{0.1};  // on kappa1' normalized by its p95
};

struct ApparentFields {
  std::vector<double> kappa;  // kappa1', largest singular value of S J^-1
  std::vector<Vec3> t;        // object-space direction, flipped uphill
  std::vector<double> d;      // D_t kappa1' >= 0
  std::vector<char> excluded;
};

/// Screen basis orthogonal to the vertex view vector, aligned with the camera basis.
inline void screen_basis(const Camera& cam, const Vec3& v, Vec3& b1, Vec3& b2) {
  b1 = normalized(cam.v1() - v * dot(cam.v1(), v));
  b2 = cross(v, b1);
}

/// J_P (tangent frame coords -> screen coords), kappa1' and t' at one vertex.
struct ViewShape {
  Mat2 jacobian;
  double kappa = 0.0;
  Vec2 t_screen;
  Vec2 t_tangent;  // J^-1 t', not normalized
};

inline ViewShape view_dependent_shape(const Sym2& s, const Vec3& x, const Vec3& y, const Vec3& b1, const Vec3& b2) {
  ViewShape vs;
  vs.jacobian = {dot(x, b1), dot(y, b1), dot(x, b2), dot(y, b2)};
  const Mat2 ji = vs.jacobian.inverse();
  const Mat2 sp = Mat2::from(s) * ji;
  const Mat2 sts = sp.transposed() * sp;
  const Eigen2 e = eigen(Sym2{sts.a, 0.5 * (sts.b + sts.c), sts.d});
  vs.kappa = std::sqrt(std::max(0.0, e.value_hi));
  vs.t_screen = e.dir_hi;
  vs.t_tangent = ji * e.dir_hi;
  return vs;
}

inline ApparentFields apparent_fields(const MeshGeometry& g, const CurvatureField& cf, const ViewContext& ctx,
                                      const Camera& cam) {
  const std::size_t n = g.mesh.positions.size();
  ApparentFields a;
  a.kappa.assign(n, 0.0);
  a.t.assign(n, Vec3{});
  a.d.assign(n, 0.0);
  a.excluded.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(ctx.ndotv[i]) < 1e-3) {
      a.excluded[i] = 1;
      continue;
    }
    Vec3 b1, b2;
    screen_basis(cam, ctx.v[i], b1, b2);
    const ViewShape vs = view_dependent_shape(cf.shape[i], g.frames.x[i], g.frames.y[i], b1, b2);
    if (!std::isfinite(vs.kappa)) {
      a.excluded[i] = 1;
      continue;
    }
    a.kappa[i] = vs.kappa;
    a.t[i] = normalized(g.frames.x[i] * vs.t_tangent.x + g.frames.y[i] * vs.t_tangent.y);
  }
  // Finite differences along t: intersect the rays +-t with the edges
  // opposite vertex i in its one-ring, flattened into the tangent plane.
  for (std::size_t i = 0; i < n; ++i) {
    if (a.excluded[i]) continue;
    const Vec3& p = g.mesh.positions[i];
    const Vec3 &x = g.frames.x[i], &y = g.frames.y[i];
    const Vec2 dir{dot(a.t[i], x), dot(a.t[i], y)};
    double val[2] = {0, 0}, dist[2] = {0, 0};
    bool hit[2] = {false, false};
    for (int t : g.adj.vertex_triangles[i]) {
      const auto& tri = g.mesh.triangles[t];
      const int k = tri[0] == static_cast<int>(i) ? 0 : (tri[1] == static_cast<int>(i) ? 1 : 2);
      const int j = tri[(k + 1) % 3], l = tri[(k + 2) % 3];
      if (a.excluded[j] || a.excluded[l]) continue;
      const Vec2 qj{dot(g.mesh.positions[j] - p, x), dot(g.mesh.positions[j] - p, y)};
      const Vec2 ql{dot(g.mesh.positions[l] - p, x), dot(g.mesh.positions[l] - p, y)};
      const Vec2 e = ql - qj;
      for (int side = 0; side < 2; ++side) {
        if (hit[side]) continue;
        const Vec2 d = side == 0 ? dir : -dir;
        const double den = cross(d, e);
        if (std::abs(den) < 1e-300) continue;
        const double lam = cross(qj, e) / den;
        const double s = cross(qj, d) / den;
        if (lam > 0 && s >= 0 && s <= 1) {
          hit[side] = true;
          dist[side] = lam;
          val[side] = (1 - s) * a.kappa[j] + s * a.kappa[l];
        }
      }
    }
    double d = 0.0;
    if (hit[0] && hit[1]) d = (val[0] - val[1]) / (dist[0] + dist[1]);
    else if (hit[0]) d = (val[0] - a.kappa[i]) / dist[0];
    else if (hit[1]) d = (a.kappa[i] - val[1]) / dist[1];
    if (d < 0) {
      d = -d;
      a.t[i] = -a.t[i];
    }
    a.d[i] = d;
  }
  return a;
}

inline LineSet apparent_ridges(const MeshGeometry& g, const CurvatureField& cf, const ViewContext& ctx,
                               const Camera& cam, const ApparentOptions& opt = {}, Diagnostics* diag = nullptr) {
  const ApparentFields af = apparent_fields(g, cf, ctx, cam);
  const double tau = opt.tau.resolve(detail::percentile95_where(af.kappa, af.excluded));
  auto keep = [&](int t, const Segment& seg) -> std::optional<Polarity> {
    const auto& tri = g.mesh.triangles[t];
    if (0.5 * (interpolate(seg.p, af.kappa) + interpolate(seg.q, af.kappa)) < tau) return std::nullopt;
    // Maximum test: every vertex's uphill direction points toward the line.
    const Vec3 u = seg.q.xyz - seg.p.xyz;
    const double ul = norm(u);
    if (ul <= 0) return std::nullopt;
    const Vec3 uh = u / ul;
    for (int m = 0; m < 3; ++m) {
      const Vec3& pm = g.mesh.positions[tri[m]];
      const Vec3 foot = seg.p.xyz + uh * dot(pm - seg.p.xyz, uh);
      if (dot(foot - pm, af.t[tri[m]]) <= 0) return std::nullopt;
    }
    return detail::mean3(cf.kappa1, tri) > 0 ? Polarity::ridge : Polarity::valley;
  };
  ZeroSetOptions zo;
  zo.edge_sign = detail::edge_signs(g.adj, af.t);
  zo.excluded = af.excluded;
  LineSet ls = extract_zero_set(g.mesh, g.adj, af.d, keep, zo, nullptr, diag);
  ls.method = "ar";
  detail::set_strength(ls, af.kappa, false);
  return ls;
}

// ---------------------------------------------------------------------------
// Photic extremum lines

struct PhoticOptions {
  Threshold tau{0.02};  // on T = int |grad f|, normalized by p95|grad f| * diag
};

struct PhoticFields {
  std::vector<double> g;   // |grad f|
  std::vector<double> e1;  // D_w g
  std::vector<double> e2;  // D_w e1
  std::vector<char> excluded;
};

inline PhoticFields photic_fields(const MeshGeometry& geo, const std::vector<double>& f) {
  const std::size_t n = geo.mesh.positions.size();
  PhoticFields p;
  const auto gf = vertex_gradient(geo, f);
  p.g.resize(n);
  p.excluded.assign(n, 0);
  std::vector<Vec3> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.g[i] = norm(gf[i]);
    if (p.g[i] < 1e-10) p.excluded[i] = 1;
    else w[i] = gf[i] / p.g[i];
  }
  const auto gg = vertex_gradient(geo, p.g);
  p.e1.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (!p.excluded[i]) p.e1[i] = dot(gg[i], w[i]);
  const auto ge = vertex_gradient(geo, p.e1);
  p.e2.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (!p.excluded[i]) p.e2[i] = dot(ge[i], w[i]);
  return p;
}

inline LineSet photic_extremum_lines(const MeshGeometry& g, const ViewContext& ctx, const PhoticOptions& opt = {},
                                     Diagnostics* diag = nullptr) {
  const PhoticFields pf = photic_fields(g, ctx.f);
  auto keep = [&](int t, const Segment&) -> std::optional<Polarity> {
    if (detail::mean3(pf.e2, g.mesh.triangles[t]) < 0) return Polarity::none;
    return std::nullopt;
  };
  ZeroSetOptions zo;
  zo.excluded = pf.excluded;
  LineSet ls = extract_zero_set(g.mesh, g.adj, pf.e1, keep, zo, nullptr, diag);
  ls.method = "pel";
  detail::set_strength(ls, pf.g, false);
  const double scale = detail::percentile95_where(pf.g, pf.excluded) * bounding_box(g.mesh.positions).diagonal();
  return filter_drop_below(std::move(ls), opt.tau.resolve(scale));
}

// ---------------------------------------------------------------------------
// Demarcating curves

struct DemarcatingOptions {
  Threshold tau{0.1};  // on line-averaged D_w kappa, normalized by p95
  bool keep_above = true;  // false keeps the weak lines instead
};

/// Unit direction maximizing D_u kappa = C(u, u, u) and the maximum value.
struct CubicArgmax {
  Vec2 w;
  double value = 0.0;
};

inline CubicArgmax demarcating_direction(const Cubic2& c) {
  // u = (cos t, sin t), T = tan t: dF/dt = 0 <=> -c T^3 + (d - 2b) T^2 + (2c - a) T + b = 0.
  std::vector<Vec2> cand{{0.0, 1.0}};
  for (double T : real_cubic_roots(-c.c, c.d - 2 * c.b, 2 * c.c - c.a, c.b))
    if (std::isfinite(T)) cand.push_back(Vec2{1.0, T} / std::hypot(1.0, T));
  CubicArgmax best{{1.0, 0.0}, -HUGE_VAL};
  for (const Vec2& u : cand) {
    for (const Vec2& s : {u, -u}) {
      const double f = directional_curvature_derivative(c, s);
      if (f > best.value) best = {s, f};
    }
  }
  return best;
}

struct DemarcatingFields {
  std::vector<double> s;     // <w, S w>
  std::vector<double> dmax;  // D_w kappa
  std::vector<Vec3> w;
  std::vector<char> excluded;
};

inline DemarcatingFields demarcating_fields(const MeshGeometry& g, const CurvatureField& cf,
                                            const CurvatureDerivative& C) {
  const std::size_t n = g.mesh.positions.size();
  DemarcatingFields d;
  d.s.assign(n, 0.0);
  d.dmax.assign(n, 0.0);
  d.w.assign(n, Vec3{});
  d.excluded.assign(n, 0);
  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i)
    mag[i] = std::max({std::abs(C[i].a), std::abs(C[i].b), std::abs(C[i].c), std::abs(C[i].d)});
  const double floor = std::max(1e-300, 1e-9 * percentile95(mag));
  for (std::size_t i = 0; i < n; ++i) {
    if (mag[i] <= floor) {
      d.excluded[i] = 1;
      continue;
    }
    const CubicArgmax am = demarcating_direction(C[i]);
    d.dmax[i] = am.value;
    d.s[i] = quadratic_form(cf.shape[i], am.w);
    d.w[i] = g.frames.x[i] * am.w.x + g.frames.y[i] * am.w.y;
  }
  return d;
}

inline LineSet demarcating_curves(const MeshGeometry& g, const CurvatureField& cf, const CurvatureDerivative& C,
                                  const DemarcatingOptions& opt = {}, Diagnostics* diag = nullptr) {
  const DemarcatingFields df = demarcating_fields(g, cf, C);
  const std::size_t iso = static_cast<std::size_t>(std::count(df.excluded.begin(), df.excluded.end(), 1));
  if (iso) note(diag, std::to_string(iso) + " vertices with a vanishing curvature derivative excluded");
  ZeroSetOptions zo;
  zo.excluded = df.excluded;
  LineSet ls = extract_zero_set(g.mesh, g.adj, df.s, {}, zo, nullptr, diag);
  ls.method = "dc";
  for (auto& pl : ls.polylines) {
    const double len = polyline_length(pl);
    pl.strength = len > 0 ? line_strength(pl, df.dmax) / len : 0.0;
  }
  const double tau = opt.tau.resolve(detail::percentile95_where(df.dmax, df.excluded));
  std::erase_if(ls.polylines, [&](const Polyline& p) { return opt.keep_above ? p.strength < tau : p.strength > tau; });
  return ls;
}

// ---------------------------------------------------------------------------
// Laplacian lines

struct LaplacianLineOptions {
  Threshold tau{0.1};  // on |grad f|, normalized by p95
};

struct LaplacianLineFields {
  std::vector<double> field;  // <Delta n, v>
  std::vector<double> grad;   // |grad f|
};

inline LaplacianLineFields laplacian_line_fields(const MeshGeometry& g, const SparseLaplacian& L,
                                                 const ViewContext& ctx) {
  const std::size_t n = g.mesh.positions.size();
  LaplacianLineFields r;
  const auto dn = vector_laplacian_of_normals(g.normals.vertex, L);
  r.field.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.field[i] = dot(dn[i], ctx.v[i]);
  const auto gf = vertex_gradient(g, ctx.f);
  r.grad.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.grad[i] = norm(gf[i]);
  return r;
}

inline LineSet laplacian_lines(const MeshGeometry& g, const SparseLaplacian& L, const ViewContext& ctx,
                               const LaplacianLineOptions& opt = {}, Diagnostics* diag = nullptr) {
  const LaplacianLineFields lf = laplacian_line_fields(g, L, ctx);
  const double tau = opt.tau.resolve(percentile95(lf.grad));
  auto keep = [&](int t, const Segment&) -> std::optional<Polarity> {
    const auto& tri = g.mesh.triangles[t];
    int strong = 0;
    for (int v : tri) strong += lf.grad[v] >= tau ? 1 : 0;
    if (strong >= 2) return Polarity::none;
    return std::nullopt;
  };
  LineSet ls = extract_zero_set(g.mesh, g.adj, lf.field, keep, {}, nullptr, diag);
  ls.method = "ll";
  detail::set_strength(ls, lf.grad, false);
  return ls;
}

}  // namespace meshlines
