#pragma once

// Projected line drawings with hidden-line removal. Each line segment is
// cut into pieces no longer than `sample_factor` * mean edge length; a
// piece is kept when a ray from its midpoint reaches the eye unobstructed.
// The ray origin is nudged toward the camera and, so that lines lying on
// the silhouette do not hide behind the faces they sit on, outward along
// the interpolated vertex normal.

#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bvh.hpp"
#include "features.hpp"
#include "isoline.hpp"
#include "lineset_io.hpp"
#include "mesh.hpp"

namespace meshlines {

struct SvgOptions {
  double width = 600.0;
  double height = 600.0;
  double margin = 20.0;
  bool hidden_line_removal = true;
  double sample_factor = 0.5;   // piece length / mean edge length
  double offset_factor = 1e-4;  // ray origin offset / bbox diagonal
  double normal_offset_factor = 0.1;  // outward offset / mean edge length
  bool shaded_underlay = false;
  std::map<std::string, double> stroke_width;  // per method, default 1.5
  std::map<std::string, bool> visible;         // per method, default true
};

/// 2D polylines per method after projection and visibility.
struct ProjectedLayer {
  std::string method;
  std::vector<std::vector<Vec2>> paths;
};

/// Maps camera-projected coordinates into a viewport, fitting the
/// projected mesh bounding box inside the margins (y flipped).
struct Viewport {
  double scale = 1.0;
  Vec2 offset;
  double height = 0.0;

  Vec2 map(const Vec2& q) const { return {q.x * scale + offset.x, height - (q.y * scale + offset.y)}; }
};

inline Viewport fit_viewport(const MeshBuffer& mesh, const Camera& cam, double x0, double y0, double w, double h,
                             double margin, double total_height) {
  Vec2 lo{HUGE_VAL, HUGE_VAL}, hi{-HUGE_VAL, -HUGE_VAL};
  for (const auto& p : mesh.positions) {
    const Vec2 q = cam.project(p);
    lo = {std::min(lo.x, q.x), std::min(lo.y, q.y)};
    hi = {std::max(hi.x, q.x), std::max(hi.y, q.y)};
  }
  const double sx = (w - 2 * margin) / std::max(hi.x - lo.x, 1e-300);
  const double sy = (h - 2 * margin) / std::max(hi.y - lo.y, 1e-300);
  Viewport vp;
  vp.scale = std::min(sx, sy);
  const double cx = 0.5 * (lo.x + hi.x), cy = 0.5 * (lo.y + hi.y);
  // Screen y grows downward from the top of the sheet; cell origin at (x0, y0).
  vp.offset = {x0 + 0.5 * w - cx * vp.scale, (total_height - y0 - 0.5 * h) - cy * vp.scale};
  vp.height = total_height;
  return vp;
}

class VisibilityTester {
 public:
  VisibilityTester(const MeshBuffer& mesh, const Camera& cam, double offset_factor, double normal_offset_factor = 0.1)
      : bvh_(mesh), cam_(cam), eps_(offset_factor * bounding_box(mesh.positions).diagonal()) {
    const Adjacency adj = build_adjacency(mesh);
    normals_ = vertex_normals(mesh, adj).vertex;
    lift_ = normal_offset_factor * mean_edge_length(mesh, adj);
  }

  /// Normal at a point of a line, interpolated along its mesh edge.
  Vec3 normal_at(const OnEdgePoint& q) const {
    if (q.a < 0 || q.b < 0 || q.a >= static_cast<int>(normals_.size()) || q.b >= static_cast<int>(normals_.size()))
      return {};
    return normalized(lerp(normals_[q.a], normals_[q.b], q.t));
  }

  Vec3 ray_origin(const Vec3& p, const Vec3& n) const { return p + n * lift_ + cam_.view_vector(p) * eps_; }

  bool visible(const Vec3& p, const Vec3& n = {}) const {
    const Vec3 v = cam_.view_vector(p);
    const Vec3 o = ray_origin(p, n);
    if (cam_.projection == Projection::orthographic) return !bvh_.occluded(o, v);
    return !bvh_.occluded(o, v, norm(cam_.eye - o));
  }

 private:
  TriangleBvh bvh_;
  Camera cam_;
  double eps_;
  std::vector<Vec3> normals_;
  double lift_ = 0.0;
};

/// Splits every polyline into visible 3D runs.
inline std::vector<std::vector<Vec3>> visible_runs(const LineSet& ls, const VisibilityTester* vis, double piece) {
  std::vector<std::vector<Vec3>> runs;
  for (const auto& pl : ls.polylines) {
    const std::size_t n = pl.points.size();
    if (n < 2) continue;
    const std::size_t segs = pl.closed ? n : n - 1;
    std::vector<Vec3> cur;
    auto flush = [&] {
      if (cur.size() >= 2) runs.push_back(cur);
      cur.clear();
    };
    for (std::size_t i = 0; i < segs; ++i) {
      const OnEdgePoint &qa = pl.points[i], &qb = pl.points[(i + 1) % n];
      const Vec3 a = qa.xyz, b = qb.xyz;
      const Vec3 na = vis ? vis->normal_at(qa) : Vec3{}, nb = vis ? vis->normal_at(qb) : Vec3{};
      const int k = std::max(1, static_cast<int>(std::ceil(distance(a, b) / piece)));
      for (int s = 0; s < k; ++s) {
        const Vec3 p = lerp(a, b, static_cast<double>(s) / k);
        const Vec3 q = lerp(a, b, static_cast<double>(s + 1) / k);
        const double mid = (s + 0.5) / k;
        if (!vis || vis->visible((p + q) * 0.5, normalized(lerp(na, nb, mid)))) {
          if (cur.empty()) cur.push_back(p);
          cur.push_back(q);
        } else {
          flush();
        }
      }
    }
    flush();
  }
  return runs;
}

inline std::vector<ProjectedLayer> project_layers(const MeshBuffer& mesh, const std::vector<LineSet>& sets,
                                                  const Camera& cam, const SvgOptions& opt) {
  std::unique_ptr<VisibilityTester> vis;
  if (opt.hidden_line_removal) vis = std::make_unique<VisibilityTester>(mesh, cam, opt.offset_factor, opt.normal_offset_factor);
  const double piece = std::max(1e-12, opt.sample_factor * mean_edge_length(mesh, build_adjacency(mesh)));
  std::vector<ProjectedLayer> out;
  for (const auto& ls : sets) {
    ProjectedLayer layer;
    layer.method = ls.method;
    for (const auto& run : visible_runs(ls, vis.get(), piece)) {
      std::vector<Vec2> path;
      for (const auto& p : run) path.push_back(cam.project(p));
      layer.paths.push_back(std::move(path));
    }
    out.push_back(std::move(layer));
  }
  return out;
}

namespace detail {

inline std::string svg_points(const std::vector<Vec2>& pts, const Viewport& vp) {
  std::string s;
  for (const auto& q : pts) {
    const Vec2 m = vp.map(q);
    if (!s.empty()) s += ' ';
    s += fmt9(m.x) + "," + fmt9(m.y);
  }
  return s;
}

inline std::string svg_underlay(const MeshBuffer& mesh, const Camera& cam, const Viewport& vp) {
  // Painter's order, front-facing triangles only, gray by <n, v>.
  std::vector<std::pair<double, int>> order;
  const auto fn = face_normals(mesh);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec3 c = (mesh.positions[tri[0]] + mesh.positions[tri[1]] + mesh.positions[tri[2]]) / 3.0;
    if (dot(fn[t], cam.view_vector(c)) <= 0) continue;
    order.push_back({-cam.depth(c), static_cast<int>(t)});
  }
  std::sort(order.begin(), order.end());
  std::string s = "<g id=\"underlay\" stroke=\"none\">\n";
  for (const auto& [d, t] : order) {
    const auto& tri = mesh.triangles[t];
    const Vec3 c = (mesh.positions[tri[0]] + mesh.positions[tri[1]] + mesh.positions[tri[2]]) / 3.0;
    const int g = 150 + static_cast<int>(100 * std::clamp(dot(fn[t], cam.view_vector(c)), 0.0, 1.0));
    std::vector<Vec2> pts;
    for (int v : tri) pts.push_back(cam.project(mesh.positions[v]));
    s += "<polygon fill=\"rgb(" + std::to_string(g) + "," + std::to_string(g) + "," + std::to_string(g) +
         ")\" points=\"" + svg_points(pts, vp) + "\"/>\n";
  }
  return s + "</g>\n";
}

inline const char* method_color(const std::string& m) {
  static const std::map<std::string, const char*> colors{
      {"contour", "#000000"}, {"crease", "#1f4e9c"}, {"rv", "#b22222"}, {"sc", "#2e7d32"},
      {"ar", "#6a1b9a"},      {"pel", "#e65100"},    {"dc", "#00838f"}, {"ll", "#5d4037"}};
  const auto it = colors.find(m);
  return it == colors.end() ? "#000000" : it->second;
}

inline std::string svg_cell(const MeshBuffer& mesh, const std::vector<LineSet>& sets, const Camera& cam,
                            const SvgOptions& opt, const Viewport& vp) {
  std::string s;
  if (opt.shaded_underlay) s += svg_underlay(mesh, cam, vp);
  for (const auto& layer : project_layers(mesh, sets, cam, opt)) {
    const auto vis = opt.visible.find(layer.method);
    if (vis != opt.visible.end() && !vis->second) continue;
    const auto sw = opt.stroke_width.find(layer.method);
    s += "<g id=\"" + layer.method + "\" fill=\"none\" stroke=\"" + method_color(layer.method) +
         "\" stroke-width=\"" + fmt9(sw == opt.stroke_width.end() ? 1.5 : sw->second) + "\">\n";
    for (const auto& path : layer.paths) s += "<polyline points=\"" + svg_points(path, vp) + "\"/>\n";
    s += "</g>\n";
  }
  return s;
}

inline std::string svg_header(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt9(w) + "\" height=\"" + fmt9(h) +
         "\" viewBox=\"0 0 " + fmt9(w) + " " + fmt9(h) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace detail

/// One sheet; one <g> group per method, in the order given.
inline std::string render_svg(const MeshBuffer& mesh, const std::vector<LineSet>& sets, const Camera& cam,
                              const SvgOptions& opt = {}) {
  const Viewport vp = fit_viewport(mesh, cam, 0, 0, opt.width, opt.height, opt.margin, opt.height);
  return detail::svg_header(opt.width, opt.height) + detail::svg_cell(mesh, sets, cam, opt, vp) + "</svg>\n";
}

/// Grid of cells (row-major), one method per cell, each titled by its tag.
inline std::string render_svg_grid(const MeshBuffer& mesh, const std::vector<LineSet>& sets, const Camera& cam,
                                   int columns, const SvgOptions& opt = {}) {
  const int rows = (static_cast<int>(sets.size()) + columns - 1) / columns;
  const double W = opt.width * columns, H = opt.height * rows;
  std::string s = detail::svg_header(W, H);
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const double x0 = opt.width * (k % columns), y0 = opt.height * (k / columns);
    const Viewport vp = fit_viewport(mesh, cam, x0, y0, opt.width, opt.height, opt.margin, H);
    s += "<g id=\"cell-" + sets[k].method + "\">\n";
    s += "<text x=\"" + fmt9(x0 + 8) + "\" y=\"" + fmt9(y0 + 16) + "\" font-family=\"sans-serif\" font-size=\"14\">" +
         sets[k].method + "</text>\n";
    s += detail::svg_cell(mesh, {sets[k]}, cam, opt, vp);
    s += "</g>\n";
  }
  return s + "</svg>\n";
}

}  // namespace meshlines
