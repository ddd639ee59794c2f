#pragma once

// Analytic parametric surfaces with closed-form first and second partials.
// Curvature sign: S = dn with the normal f_u x f_v, which points outward
// on every catalogue surface, so convex regions have positive curvature.

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dense.hpp"
#include "error.hpp"
#include "mesh.hpp"

namespace meshlines::oracle {

/// Position and partial derivatives at a parameter point.
struct SurfaceJet {
  Vec3 f, fu, fv, fuu, fuv, fvv;
};

/// Height function h(x, y) with partials up to second order.
struct HeightJet {
  double h = 0, hx = 0, hy = 0, hxx = 0, hxy = 0, hyy = 0;
};

using HeightFunction = std::function<HeightJet(double, double)>;

struct Domain {
  double u0 = 0, u1 = 1, v0 = 0, v1 = 1;
};

enum class SurfaceKind { sphere, cylinder, torus, graph, custom };

struct ParametricSurface {
  SurfaceKind kind = SurfaceKind::custom;
  std::string name;
  Domain domain;
  bool periodic_u = false;
  bool periodic_v = false;
  bool poles_u = false;  // u = u0 and u = u1 collapse to single points (sphere)
  std::function<SurfaceJet(double, double)> jet;
};

inline ParametricSurface sphere(double r = 1.0) {
  ParametricSurface s;
  s.kind = SurfaceKind::sphere;
  s.name = "sphere";
  s.domain = {0, M_PI, 0, 2 * M_PI};
  s.periodic_v = true;
  s.poles_u = true;
  s.jet = [r](double th, double ph) {
    const double st = std::sin(th), ct = std::cos(th), sp = std::sin(ph), cp = std::cos(ph);
    SurfaceJet j;
    j.f = {r * st * cp, r * st * sp, r * ct};
    j.fu = {r * ct * cp, r * ct * sp, -r * st};
    j.fv = {-r * st * sp, r * st * cp, 0};
    j.fuu = {-r * st * cp, -r * st * sp, -r * ct};
    j.fuv = {-r * ct * sp, r * ct * cp, 0};
    j.fvv = {-r * st * cp, -r * st * sp, 0};
    return j;
  };
  return s;
}

/// Open cylinder of radius r around the z axis, z in [-h/2, h/2].
inline ParametricSurface cylinder(double r = 1.0, double h = 2.0) {
  ParametricSurface s;
  s.kind = SurfaceKind::cylinder;
  s.name = "cylinder";
  s.domain = {0, 2 * M_PI, -h / 2, h / 2};
  s.periodic_u = true;
  s.jet = [r](double ph, double z) {
    const double sp = std::sin(ph), cp = std::cos(ph);
    SurfaceJet j;
    j.f = {r * cp, r * sp, z};
    j.fu = {-r * sp, r * cp, 0};
    j.fv = {0, 0, 1};
    j.fuu = {-r * cp, -r * sp, 0};
    return j;
  };
  return s;
}

/// Torus around the z axis: u is the angle about the axis, v about the tube.
inline ParametricSurface torus(double R = 2.0, double r = 0.5) {
  ParametricSurface s;
  s.kind = SurfaceKind::torus;
  s.name = "torus";
  s.domain = {0, 2 * M_PI, 0, 2 * M_PI};
  s.periodic_u = s.periodic_v = true;
  s.jet = [R, r](double ph, double th) {
    const double sp = std::sin(ph), cp = std::cos(ph), st = std::sin(th), ct = std::cos(th);
    const double a = R + r * ct;
    SurfaceJet j;
    j.f = {a * cp, a * sp, r * st};
    j.fu = {-a * sp, a * cp, 0};
    j.fv = {-r * st * cp, -r * st * sp, r * ct};
    j.fuu = {-a * cp, -a * sp, 0};
    j.fuv = {r * st * sp, -r * st * cp, 0};
    j.fvv = {-r * ct * cp, -r * ct * sp, -r * st};
    return j;
  };
  return s;
}

/// Graph z = h(x, y) over the rectangle `dom`, upward normal.
inline ParametricSurface graph(HeightFunction h, Domain dom, std::string name = "graph") {
  ParametricSurface s;
  s.kind = SurfaceKind::graph;
  s.name = std::move(name);
  s.domain = dom;
  s.jet = [h = std::move(h)](double x, double y) {
    const HeightJet z = h(x, y);
    SurfaceJet j;
    j.f = {x, y, z.h};
    j.fu = {1, 0, z.hx};
    j.fv = {0, 1, z.hy};
    j.fuu = {0, 0, z.hxx};
    j.fuv = {0, 0, z.hxy};
    j.fvv = {0, 0, z.hyy};
    return j;
  };
  return s;
}

/// h = k (x^2 - y^2) / 2 ... scaled so that h = x^2 - y^2 for k = 2.
inline HeightFunction saddle_height(double k = 2.0) {
  return [k](double x, double y) {
    return HeightJet{0.5 * k * (x * x - y * y), k * x, -k * y, k, 0.0, -k};
  };
}

/// h = c x^3.
inline HeightFunction cubic_height(double c = 1.0) {
  return [c](double x, double) { return HeightJet{c * x * x * x, 3 * c * x * x, 0, 6 * c * x, 0, 0}; };
}

struct GaussianBump {
  double amplitude = 1.0;
  double sigma = 1.0;
  double cx = 0.0;
  double cy = 0.0;
};

/// Sum of isotropic Gaussian bumps a exp(-((x-cx)^2 + (y-cy)^2) / (2 sigma^2)).
inline HeightFunction gaussian_height(std::vector<GaussianBump> bumps) {
  return [bumps = std::move(bumps)](double x, double y) {
    HeightJet z;
    for (const auto& b : bumps) {
      const double dx = x - b.cx, dy = y - b.cy, s2 = b.sigma * b.sigma;
      const double g = b.amplitude * std::exp(-(dx * dx + dy * dy) / (2 * s2));
      z.h += g;
      z.hx += -dx / s2 * g;
      z.hy += -dy / s2 * g;
      z.hxx += (dx * dx / (s2 * s2) - 1 / s2) * g;
      z.hxy += dx * dy / (s2 * s2) * g;
      z.hyy += (dy * dy / (s2 * s2) - 1 / s2) * g;
    }
    return z;
  };
}

/// Exact differential data at one parameter point.
struct AnalyticShapeData {
  Vec3 position;
  Vec3 normal;
  Vec3 t1, t2;              // orthonormal tangent frame, t1 along f_u
  Sym2 metric;              // first fundamental form in (f_u, f_v)
  Sym2 second;              // B_ij = -<n, f_ij>, so that S = g^-1 B
  Sym2 shape;               // shape operator in (t1, t2)
  double kappa_max = 0, kappa_min = 0;  // signed-extremal ordering
  Vec3 dir_max, dir_min;
  double kappa1 = 0, kappa2 = 0;        // magnitude ordering, |kappa1| >= |kappa2|
  Vec3 k1, k2;

  /// S applied to a tangent 3-vector.
  Vec3 apply(const Vec3& a) const {
    const Vec2 c = shape * Vec2{dot(a, t1), dot(a, t2)};
    return t1 * c.x + t2 * c.y;
  }
};

inline AnalyticShapeData shape_from_jet(const SurfaceJet& j) {
  AnalyticShapeData d;
  d.position = j.f;
  d.metric = {dot(j.fu, j.fu), dot(j.fu, j.fv), dot(j.fv, j.fv)};
  const double det = d.metric.e * d.metric.g - d.metric.f * d.metric.f;
  if (det < 1e-14) throw NumericError("singular metric (det g = " + std::to_string(det) + ")");
  d.normal = normalized(cross(j.fu, j.fv));
  d.second = {-dot(d.normal, j.fuu), -dot(d.normal, j.fuv), -dot(d.normal, j.fvv)};
  const double lu = norm(j.fu);
  d.t1 = j.fu / lu;
  d.t2 = normalized(j.fv - d.t1 * dot(j.fv, d.t1));
  // f_u = C11 t1, f_v = C12 t1 + C22 t2; B = C^T S C.
  const Mat2 c{lu, dot(j.fv, d.t1), 0.0, dot(j.fv, d.t2)};
  const Mat2 ci = c.inverse();
  const Mat2 s = ci.transposed() * Mat2::from(d.second) * ci;
  d.shape = {s.a, 0.5 * (s.b + s.c), s.d};
  const Eigen2 eg = eigen(d.shape);
  auto lift = [&](const Vec2& v) { return normalized(d.t1 * v.x + d.t2 * v.y); };
  d.kappa_max = eg.value_hi;
  d.kappa_min = eg.value_lo;
  d.dir_max = lift(eg.dir_hi);
  d.dir_min = lift(eg.dir_lo);
  if (std::abs(eg.value_hi) >= std::abs(eg.value_lo)) {
    d.kappa1 = d.kappa_max, d.kappa2 = d.kappa_min, d.k1 = d.dir_max, d.k2 = d.dir_min;
  } else {
    d.kappa1 = d.kappa_min, d.kappa2 = d.kappa_max, d.k1 = d.dir_min, d.k2 = d.dir_max;
  }
  return d;
}

inline AnalyticShapeData analytic_shape(const ParametricSurface& s, double u, double v) {
  return shape_from_jet(s.jet(u, v));
}

/// Scalar field on the parameter domain with its parameter partials.
struct ScalarJet {
  double value = 0, du = 0, dv = 0;
};

/// Surface gradient sum_ij g^ij (d phi / d x_j) f_i.
inline Vec3 analytic_gradient(const ParametricSurface& s, double u, double v, const ScalarJet& phi) {
  const SurfaceJet j = s.jet(u, v);
  const double g11 = dot(j.fu, j.fu), g12 = dot(j.fu, j.fv), g22 = dot(j.fv, j.fv);
  const double det = g11 * g22 - g12 * g12;
  if (det < 1e-14) throw NumericError("singular metric (det g = " + std::to_string(det) + ")");
  const double a = (g22 * phi.du - g12 * phi.dv) / det;
  const double b = (-g12 * phi.du + g11 * phi.dv) / det;
  return j.fu * a + j.fv * b;
}

/// Euler formula <u,v>^2 kappa_v + <u,w>^2 kappa_w.
inline double directional_curvature(const AnalyticShapeData& d, const Vec3& u) {
  if (std::abs(dot(u, d.normal)) > 1e-8 || std::abs(norm(u) - 1.0) > 1e-8)
    throw NumericError("direction is not a unit tangent vector");
  const double a = dot(u, d.dir_max), b = dot(u, d.dir_min);
  return a * a * d.kappa_max + b * b * d.kappa_min;
}

/// Mesh sampled from a surface plus the exact data at every vertex.
struct Tessellation {
  MeshBuffer mesh;
  std::vector<Vec2> params;
  std::vector<AnalyticShapeData> truth;
};

/// Regular grid with `nu` x `nv` vertices (periodic axes: that many distinct
/// columns; poles collapse to one vertex each).
inline Tessellation tessellate(const ParametricSurface& s, int nu, int nv) {
  if (nu < 2 || nv < 2) throw GeometryError("tessellation needs at least 2 samples per axis");
  if (s.poles_u && nu < 3) throw GeometryError("sphere tessellation needs at least 3 rings");
  const Domain& d = s.domain;
  const int cols_u = nu, cols_v = nv;
  auto u_at = [&](int i) { return s.periodic_u ? d.u0 + (d.u1 - d.u0) * i / nu : d.u0 + (d.u1 - d.u0) * i / (nu - 1); };
  auto v_at = [&](int j) { return s.periodic_v ? d.v0 + (d.v1 - d.v0) * j / nv : d.v0 + (d.v1 - d.v0) * j / (nv - 1); };
  Tessellation t;
  std::vector<int> id(static_cast<std::size_t>(cols_u * cols_v), -1);
  int north = -1, south = -1;
  auto add = [&](double u, double v, double eval_u) {
    t.mesh.positions.push_back(s.jet(u, v).f);
    t.params.push_back({u, v});
    t.truth.push_back(analytic_shape(s, eval_u, v));
    return static_cast<int>(t.mesh.positions.size()) - 1;
  };
  for (int i = 0; i < cols_u; ++i) {
    for (int j = 0; j < cols_v; ++j) {
      const double u = u_at(i), v = v_at(j);
      if (s.poles_u && i == 0) {
        if (north < 0) north = add(u, 0.0, d.u0 + 1e-5);
        id[i * cols_v + j] = north;
      } else if (s.poles_u && i == nu - 1) {
        if (south < 0) south = add(u, 0.0, d.u1 - 1e-5);
        id[i * cols_v + j] = south;
      } else {
        id[i * cols_v + j] = add(u, v, u);
      }
    }
  }
  if (north >= 0) t.mesh.positions[north] = s.jet(d.u0, 0.0).f;
  if (south >= 0) t.mesh.positions[south] = s.jet(d.u1, 0.0).f;
  const int quads_u = s.periodic_u ? nu : nu - 1;
  const int quads_v = s.periodic_v ? nv : nv - 1;
  for (int i = 0; i < quads_u; ++i) {
    for (int j = 0; j < quads_v; ++j) {
      const int a = id[i * cols_v + j];
      const int b = id[((i + 1) % cols_u) * cols_v + j];
      const int c = id[((i + 1) % cols_u) * cols_v + (j + 1) % cols_v];
      const int e = id[i * cols_v + (j + 1) % cols_v];
      if (a != b && b != c && a != c) t.mesh.triangles.push_back({a, b, c});
      if (a != c && c != e && a != e) t.mesh.triangles.push_back({a, c, e});
    }
  }
  return t;
}

/// Parses "name" or "name:key=value,key=value" into a surface and a grid
/// resolution. Names: sphere(r), cylinder(r,h), torus(R,r), saddle(k),
/// cubic(c), bump(a,sigma), bumps (three fixed bumps); every kind accepts
/// nu, nv for the resolution and graphs accept extent.
struct SurfaceSpec {
  ParametricSurface surface;
  int nu = 64;
  int nv = 64;
};

inline SurfaceSpec parse_surface_spec(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  std::map<std::string, double> kv;
  if (colon != std::string::npos) {
    std::string rest = text.substr(colon + 1);
    std::size_t pos = 0;
    while (pos < rest.size()) {
      auto comma = rest.find(',', pos);
      if (comma == std::string::npos) comma = rest.size();
      const std::string item = rest.substr(pos, comma - pos);
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ParseError("surface parameter '" + item + "' lacks '='");
      try {
        std::size_t used = 0;
        const double v = std::stod(item.substr(eq + 1), &used);
        if (used != item.size() - eq - 1) throw std::invalid_argument(item);
        kv[item.substr(0, eq)] = v;
      } catch (const std::exception&) {
        throw ParseError("bad number in surface parameter '" + item + "'");
      }
      pos = comma + 1;
    }
  }
  auto get = [&](const char* key, double fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  };
  SurfaceSpec spec;
  const double ext = get("extent", 3.0);
  if (name == "sphere") {
    spec.surface = sphere(get("r", 1.0));
    spec.nu = 33;
  } else if (name == "cylinder") {
    spec.surface = cylinder(get("r", 1.0), get("h", 2.0));
    spec.nv = 32;
  } else if (name == "torus") {
    spec.surface = torus(get("R", 2.0), get("r", 0.5));
    spec.nv = 32;
  } else if (name == "saddle") {
    spec.surface = graph(saddle_height(get("k", 2.0)), {-1, 1, -1, 1}, "saddle");
    spec.nu = spec.nv = 33;
  } else if (name == "cubic") {
    spec.surface = graph(cubic_height(get("c", 1.0)), {-1, 1, -1, 1}, "cubic");
    spec.nu = spec.nv = 33;
  } else if (name == "bump") {
    spec.surface = graph(gaussian_height({{get("a", 1.0), get("sigma", 0.5), 0.0, 0.0}}), {-ext / 2, ext / 2, -ext / 2, ext / 2}, "bump");
    spec.nu = spec.nv = 81;
  } else if (name == "bumps") {
    spec.surface = graph(gaussian_height({{0.8, 0.35, -0.5, -0.3}, {0.5, 0.25, 0.6, 0.2}, {-0.4, 0.3, 0.0, 0.7}}),
                         {-1.5, 1.5, -1.5, 1.5}, "bumps");
    spec.nu = spec.nv = 81;
  } else {
    throw ParseError("unknown surface '" + name + "'");
  }
  spec.nu = static_cast<int>(get("nu", spec.nu));
  spec.nv = static_cast<int>(get("nv", spec.nv));
  return spec;
}

}  // namespace meshlines::oracle
