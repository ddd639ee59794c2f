#pragma once

// Zero sets of per-vertex scalar fields: per-triangle crossings, chaining into
// polylines, trapezoidal line integrals and line filters.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "mesh.hpp"

namespace meshlines {

enum class Polarity { none, ridge, valley };

inline const char* polarity_name(Polarity p) {
  switch (p) {
    case Polarity::ridge: return "ridge";
    case Polarity::valley: return "valley";
    default: return "none";
  }
}

/// Point on edge (a, b), a < b, at parameter t measured from a.
struct OnEdgePoint {
  int a = 0;
  int b = 0;
  double t = 0.0;
  Vec3 xyz;
};

struct Polyline {
  std::vector<OnEdgePoint> points;
  bool closed = false;  // last point connects back to the first
  double strength = 0.0;
  Polarity polarity = Polarity::none;
  std::vector<double> values;  // optional per-point values (hysteresis)
};

struct LineSet {
  std::string method;
  std::vector<Polyline> polylines;

  std::size_t point_count() const {
    std::size_t n = 0;
    for (const auto& p : polylines) n += p.points.size();
    return n;
  }
  bool empty() const { return polylines.empty(); }
};

struct Segment {
  OnEdgePoint p, q;
};

inline OnEdgePoint make_point(const MeshBuffer& mesh, int i, int j, double phi_i, double phi_j) {
  // Canonical orientation: t runs from the smaller index, so both triangles
  // sharing the edge compute the identical point.
  if (i > j) std::swap(i, j), std::swap(phi_i, phi_j);
  OnEdgePoint p;
  p.a = i;
  p.b = j;
  p.t = std::clamp(phi_i / (phi_i - phi_j), 0.0, 1.0);
  p.xyz = lerp(mesh.positions[i], mesh.positions[j], p.t);
  return p;
}

/// Crossing of the linear interpolant of (phi_i, phi_j, phi_k) over `tri`.
/// Values must already be nudged off zero.
inline std::optional<Segment> triangle_zero_crossing(const MeshBuffer& mesh, const Triangle& tri, double phi_i,
                                                     double phi_j, double phi_k) {
  const double v[3] = {phi_i, phi_j, phi_k};
  OnEdgePoint pts[3];
  int n = 0;
  for (int e = 0; e < 3; ++e) {
    const int a = e, b = (e + 1) % 3;
    if ((v[a] > 0) != (v[b] > 0)) pts[n++] = make_point(mesh, tri[a], tri[b], v[a], v[b]);
  }
  if (n != 2) return std::nullopt;
  return Segment{pts[0], pts[1]};
}

/// Decides whether a triangle's segment is kept and with which polarity.
using KeepPredicate = std::function<std::optional<Polarity>(int tri, const Segment&)>;

struct ZeroSetOptions {
  /// Per-edge sign (+1 / -1, indexed by edge id) applied to the far value
  /// when the field is only defined up to sign per vertex. Empty: all +1.
  std::vector<signed char> edge_sign;
  /// Vertices excluded from the support; triangles touching them are skipped.
  std::vector<char> excluded;
};

struct ZeroSetStats {
  std::size_t segments = 0;
  std::size_t skipped_odd = 0;       // 1 or 3 crossings under edge signs
  std::size_t skipped_all_zero = 0;  // degenerate zero set
  std::size_t skipped_excluded = 0;
  std::size_t nudged = 0;
};

/// Values with |phi| <= 1e-12 * max|phi| are moved to +epsilon.
inline std::vector<double> nudge_zeros(const std::vector<double>& phi, std::size_t* count = nullptr) {
  double scale = 0.0;
  for (double v : phi)
    if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
  const double eps = 1e-12 * scale;
  std::vector<double> out(phi);
  std::size_t n = 0;
  for (double& v : out) {
    if (std::abs(v) <= eps) {
      v = eps > 0 ? eps : 1e-300;
      ++n;
    }
  }
  if (count) *count = n;
  return out;
}

/// Chains segments that share an on-edge point (same edge id) and the same
/// polarity into maximal polylines. Deterministic in segment order.
inline std::vector<Polyline> chain_segments(const std::vector<Segment>& segs, const std::vector<Polarity>& pol,
                                            const std::vector<int>& edge_p, const std::vector<int>& edge_q,
                                            std::size_t edge_count) {
  std::vector<std::array<int, 2>> at_edge(edge_count, {-1, -1});
  for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
    for (int e : {edge_p[s], edge_q[s]}) {
      auto& slot = at_edge[e];
      if (slot[0] < 0) slot[0] = s;
      else if (slot[1] < 0) slot[1] = s;
    }
  }
  auto other_at = [&](int e, int s) {
    const auto& slot = at_edge[e];
    const int o = slot[0] == s ? slot[1] : slot[0];
    if (o < 0 || o == s || pol[o] != pol[s]) return -1;
    return o;
  };
  std::vector<char> used(segs.size(), 0);
  std::vector<Polyline> out;
  for (int s0 = 0; s0 < static_cast<int>(segs.size()); ++s0) {
    if (used[s0]) continue;
    used[s0] = 1;
    // Walk forward from q, then backward from p.
    std::vector<OnEdgePoint> fwd{segs[s0].p, segs[s0].q};
    std::vector<OnEdgePoint> bwd;
    bool closed = false;
    int cur = s0, edge = edge_q[s0];
    for (;;) {
      const int nxt = other_at(edge, cur);
      if (nxt < 0) break;
      if (nxt == s0) {
        closed = true;
        break;
      }
      if (used[nxt]) break;
      used[nxt] = 1;
      const bool enter_p = edge_p[nxt] == edge;
      fwd.push_back(enter_p ? segs[nxt].q : segs[nxt].p);
      edge = enter_p ? edge_q[nxt] : edge_p[nxt];
      cur = nxt;
    }
    if (closed) {
      fwd.pop_back();  // last point duplicates the first
    } else {
      cur = s0;
      edge = edge_p[s0];
      for (;;) {
        const int nxt = other_at(edge, cur);
        if (nxt < 0 || used[nxt]) break;
        used[nxt] = 1;
        const bool enter_p = edge_p[nxt] == edge;
        bwd.push_back(enter_p ? segs[nxt].q : segs[nxt].p);
        edge = enter_p ? edge_q[nxt] : edge_p[nxt];
        cur = nxt;
      }
    }
    Polyline pl;
    pl.closed = closed;
    pl.polarity = pol[s0];
    pl.points.assign(bwd.rbegin(), bwd.rend());
    pl.points.insert(pl.points.end(), fwd.begin(), fwd.end());
    // Merge coincident neighbours (crossings through a nudged vertex).
    std::vector<OnEdgePoint> clean;
    for (const auto& p : pl.points)
      if (clean.empty() || distance(clean.back().xyz, p.xyz) > 1e-12) clean.push_back(p);
    if (pl.closed && clean.size() > 1 && distance(clean.front().xyz, clean.back().xyz) <= 1e-12) clean.pop_back();
    pl.points = std::move(clean);
    if (pl.points.size() >= 2) out.push_back(std::move(pl));
  }
  return out;
}

/// Zero set of `phi` restricted to triangles accepted by `keep`.
inline LineSet extract_zero_set(const MeshBuffer& mesh, const Adjacency& adj, const std::vector<double>& phi,
                                const KeepPredicate& keep = {}, const ZeroSetOptions& opt = {},
                                ZeroSetStats* stats = nullptr, Diagnostics* diag = nullptr) {
  ZeroSetStats st;
  const std::vector<double> v = nudge_zeros(phi, &st.nudged);
  double scale = 0.0;
  for (double x : phi) scale = std::max(scale, std::abs(x));
  const double zero_tol = 1e-12 * scale;
  std::vector<Segment> segs;
  std::vector<Polarity> pol;
  std::vector<int> ep, eq;
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const auto& tri = mesh.triangles[t];
    if (!opt.excluded.empty() && (opt.excluded[tri[0]] || opt.excluded[tri[1]] || opt.excluded[tri[2]])) {
      ++st.skipped_excluded;
      continue;
    }
    if (std::abs(phi[tri[0]]) <= zero_tol && std::abs(phi[tri[1]]) <= zero_tol && std::abs(phi[tri[2]]) <= zero_tol) {
      ++st.skipped_all_zero;
      continue;
    }
    OnEdgePoint pts[3];
    int edges[3];
    int n = 0;
    for (int k = 0; k < 3; ++k) {
      const int a = tri[k], b = tri[(k + 1) % 3];
      const int e = adj.edge_id(a, b);
      const double s = opt.edge_sign.empty() ? 1.0 : static_cast<double>(opt.edge_sign[e]);
      const double va = v[a], vb = s * v[b];
      if ((va > 0) != (vb > 0)) {
        edges[n] = e;
        pts[n++] = make_point(mesh, a, b, va, vb);
      }
    }
    if (n == 0) continue;
    if (n != 2) {
      ++st.skipped_odd;
      continue;
    }
    const Segment seg{pts[0], pts[1]};
    Polarity p = Polarity::none;
    if (keep) {
      const auto r = keep(t, seg);
      if (!r) continue;
      p = *r;
    }
    segs.push_back(seg);
    pol.push_back(p);
    ep.push_back(edges[0]);
    eq.push_back(edges[1]);
  }
  st.segments = segs.size();
  if (st.skipped_all_zero) note(diag, std::to_string(st.skipped_all_zero) + " triangles with an all-zero field skipped");
  if (st.skipped_odd)
    note(diag, std::to_string(st.skipped_odd) + " triangles with an odd number of crossings skipped");
  if (stats) *stats = st;
  LineSet ls;
  ls.polylines = chain_segments(segs, pol, ep, eq, adj.edges.size());
  return ls;
}

/// Linear interpolation of a per-vertex field at an on-edge point.
inline double interpolate(const OnEdgePoint& p, const std::vector<double>& field) {
  return (1.0 - p.t) * field[p.a] + p.t * field[p.b];
}

inline void attach_values(Polyline& pl, const std::vector<double>& field) {
  pl.values.clear();
  for (const auto& p : pl.points) pl.values.push_back(interpolate(p, field));
}

/// Trapezoidal integral sum (w_i + w_{i+1}) / 2 * |x_i - x_{i+1}|, closing
/// segment included for closed polylines.
inline double line_strength(const std::vector<Vec3>& pts, const std::vector<double>& w, bool closed = false) {
  if (pts.size() < 2) return 0.0;
  double s = 0.0;
  const std::size_t n = pts.size();
  const std::size_t segs = closed ? n : n - 1;
  for (std::size_t i = 0; i < segs; ++i) {
    const std::size_t j = (i + 1) % n;
    s += 0.5 * (w[i] + w[j]) * distance(pts[i], pts[j]);
  }
  return s;
}

inline double line_strength(const Polyline& pl, const std::vector<double>& field) {
  std::vector<Vec3> pts;
  std::vector<double> w;
  for (const auto& p : pl.points) {
    pts.push_back(p.xyz);
    w.push_back(interpolate(p, field));
  }
  return line_strength(pts, w, pl.closed);
}

inline double polyline_length(const Polyline& pl) {
  std::vector<double> ones(pl.points.size(), 1.0);
  std::vector<Vec3> pts;
  for (const auto& p : pl.points) pts.push_back(p.xyz);
  return line_strength(pts, ones, pl.closed);
}

inline double total_length(const LineSet& ls) {
  double s = 0.0;
  for (const auto& pl : ls.polylines) s += polyline_length(pl);
  return s;
}

/// Removes whole polylines with strength < tau.
inline LineSet filter_drop_below(LineSet ls, double tau) {
  std::erase_if(ls.polylines, [tau](const Polyline& p) { return p.strength < tau; });
  return ls;
}

/// Keeps maximal runs of points with value >= low that contain a point
/// with value >= high. Uses the per-point `values`.
inline LineSet filter_hysteresis(const LineSet& ls, double low, double high) {
  if (low > high) throw NumericError("hysteresis thresholds require low <= high");
  LineSet out;
  out.method = ls.method;
  for (const auto& pl : ls.polylines) {
    const std::size_t n = pl.points.size();
    if (pl.values.size() != n) throw NumericError("hysteresis filter needs per-point values");
    std::size_t start = 0;
    bool all_low = true;
    for (std::size_t i = 0; i < n; ++i)
      if (pl.values[i] < low) {
        all_low = false;
        start = i;
        break;
      }
    if (all_low) {
      if (std::any_of(pl.values.begin(), pl.values.end(), [high](double v) { return v >= high; })) out.polylines.push_back(pl);
      continue;
    }
    // Walk once around (closed) or along (open) starting at a sub-low point.
    const std::size_t count = n;
    const std::size_t first = pl.closed ? start : 0;
    Polyline run;
    bool strong = false;
    auto flush = [&] {
      if (run.points.size() >= 2 && strong) {
        run.polarity = pl.polarity;
        run.strength = pl.strength;
        out.polylines.push_back(run);
      }
      run = Polyline{};
      strong = false;
    };
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t i = (first + k) % n;
      if (pl.values[i] >= low) {
        run.points.push_back(pl.points[i]);
        run.values.push_back(pl.values[i]);
        strong = strong || pl.values[i] >= high;
      } else {
        flush();
      }
    }
    flush();
  }
  return out;
}

/// Mesh-wide 95th percentile of |values| over finite entries (0 if none).
inline double percentile95(std::vector<double> values) {
  std::vector<double> a;
  a.reserve(values.size());
  for (double v : values)
    if (std::isfinite(v)) a.push_back(std::abs(v));
  if (a.empty()) return 0.0;
  const std::size_t k = static_cast<std::size_t>(std::floor(0.95 * static_cast<double>(a.size() - 1)));
  std::nth_element(a.begin(), a.begin() + static_cast<long>(k), a.end());
  return a[k];
}

}  // namespace meshlines
