#pragma once

// Triangle BVH for occlusion rays (median split on the longest centroid axis).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "mesh.hpp"

namespace meshlines {

class TriangleBvh {
 public:
  explicit TriangleBvh(const MeshBuffer& mesh) : mesh_(&mesh) {
    const std::size_t n = mesh.triangles.size();
    order_.resize(n);
    centroid_.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      order_[t] = static_cast<int>(t);
      const auto& tri = mesh.triangles[t];
      centroid_[t] = (mesh.positions[tri[0]] + mesh.positions[tri[1]] + mesh.positions[tri[2]]) / 3.0;
    }
    if (n) build(0, static_cast<int>(n));
  }

  /// True when the open ray o + s d, s in (0, max_s), hits any triangle.
  bool occluded(const Vec3& o, const Vec3& d, double max_s = std::numeric_limits<double>::infinity()) const {
    if (nodes_.empty()) return false;
    const Vec3 inv{1.0 / d.x, 1.0 / d.y, 1.0 / d.z};
    int stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top) {
      const Node& nd = nodes_[stack[--top]];
      if (!slab(nd, o, inv, max_s)) continue;
      if (nd.count) {
        for (int k = nd.first; k < nd.first + nd.count; ++k)
          if (hit(order_[k], o, d, max_s)) return true;
      } else {
        stack[top++] = nd.left;
        stack[top++] = nd.right;
      }
    }
    return false;
  }

 private:
  struct Node {
    Vec3 lo, hi;
    int left = -1, right = -1;
    int first = 0, count = 0;
  };

  int build(int first, int last) {
    Node nd;
    nd.lo = Vec3{HUGE_VAL, HUGE_VAL, HUGE_VAL};
    nd.hi = -nd.lo;
    Vec3 clo = nd.lo, chi = nd.hi;
    for (int k = first; k < last; ++k) {
      for (int v : mesh_->triangles[order_[k]]) {
        nd.lo = min(nd.lo, mesh_->positions[v]);
        nd.hi = max(nd.hi, mesh_->positions[v]);
      }
      clo = min(clo, centroid_[order_[k]]);
      chi = max(chi, centroid_[order_[k]]);
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(nd);
    if (last - first <= 4) {
      nodes_[id].first = first;
      nodes_[id].count = last - first;
      return id;
    }
    const Vec3 ext = chi - clo;
    const int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
    const int mid = (first + last) / 2;
    std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + last, [&](int a, int b) {
      const double ca = centroid_[a][axis], cb = centroid_[b][axis];
      return ca < cb || (ca == cb && a < b);
    });
    const int l = build(first, mid);
    const int r = build(mid, last);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  static Vec3 min(const Vec3& a, const Vec3& b) { return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)}; }
  static Vec3 max(const Vec3& a, const Vec3& b) { return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)}; }

  static bool slab(const Node& nd, const Vec3& o, const Vec3& inv, double max_s) {
    double t0 = 0.0, t1 = max_s;
    for (int a = 0; a < 3; ++a) {
      double ta = (nd.lo[a] - o[a]) * inv[a];
      double tb = (nd.hi[a] - o[a]) * inv[a];
      if (ta > tb) std::swap(ta, tb);
      // NaN (0 * inf) means the ray lies in the slab plane; keep the interval.
      if (ta == ta) t0 = std::max(t0, ta);
      if (tb == tb) t1 = std::min(t1, tb);
      if (t0 > t1) return false;
    }
    return true;
  }

  // Moller-Trumbore.
  bool hit(int t, const Vec3& o, const Vec3& d, double max_s) const {
    const auto& tri = mesh_->triangles[t];
    const Vec3& p0 = mesh_->positions[tri[0]];
    const Vec3 e1 = mesh_->positions[tri[1]] - p0;
    const Vec3 e2 = mesh_->positions[tri[2]] - p0;
    const Vec3 pv = cross(d, e2);
    const double det = dot(e1, pv);
    if (std::abs(det) < 1e-300) return false;
    const double inv = 1.0 / det;
    const Vec3 tv = o - p0;
    const double u = dot(tv, pv) * inv;
    if (u < 0.0 || u > 1.0) return false;
    const Vec3 qv = cross(tv, e1);
    const double v = dot(d, qv) * inv;
    if (v < 0.0 || u + v > 1.0) return false;
    const double s = dot(e2, qv) * inv;
    return s > 0.0 && s < max_s;
  }

  const MeshBuffer* mesh_;
  std::vector<int> order_;
  std::vector<Vec3> centroid_;
  std::vector<Node> nodes_;
};

}  // namespace meshlines
