#pragma once

// Procedural mesh fixtures: platonic and subdivided spheres, sharp and
// rounded boxes, planar grids and a few hand-built planar configurations.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <tuple>
#include <vector>

#include "mesh.hpp"

namespace meshlines::shapes {

inline MeshBuffer icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  MeshBuffer m;
  m.positions = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                 {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : m.positions) p = normalized(p);
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                 {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                 {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  return m;
}

/// Unit sphere from `level` rounds of 1-to-4 subdivision of the icosahedron.
inline MeshBuffer icosphere(int level, double radius = 1.0) {
  MeshBuffer m = icosahedron();
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      const auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      const int id = static_cast<int>(m.positions.size());
      m.positions.push_back(normalized(m.positions[a] + m.positions[b]));
      mid.emplace(key, id);
      return id;
    };
    std::vector<Triangle> next;
    next.reserve(m.triangles.size() * 4);
    for (const auto& t : m.triangles) {
      const int ab = midpoint(t[0], t[1]);
      const int bc = midpoint(t[1], t[2]);
      const int ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.triangles = std::move(next);
  }
  for (auto& p : m.positions) p = p * radius;
  return m;
}

/// Axis-aligned cube with side `side` centered at the origin: 8 vertices,
/// 12 triangles, outward orientation.
inline MeshBuffer cube(double side = 1.0) {
  const double h = side / 2.0;
  MeshBuffer m;
  m.positions = {{-h, -h, -h}, {h, -h, -h}, {h, h, -h}, {-h, h, -h},
                 {-h, -h, h},  {h, -h, h},  {h, h, h},  {-h, h, h}};
  m.triangles = {{0, 2, 1}, {0, 3, 2}, {4, 5, 6}, {4, 6, 7}, {0, 1, 5}, {0, 5, 4},
                 {2, 3, 7}, {2, 7, 6}, {1, 2, 6}, {1, 6, 5}, {0, 4, 7}, {0, 7, 3}};
  return m;
}

/// Surface of the box [c0, cn]^3 sampled on the tensor grid `coords` (sorted)
/// on every face, welded along the shared cube edges.
inline MeshBuffer box_grid(const std::vector<double>& coords) {
  MeshBuffer m;
  std::map<std::tuple<double, double, double>, int> index;
  auto vertex = [&](const Vec3& q) {
    const auto key = std::make_tuple(q.x, q.y, q.z);
    const auto it = index.find(key);
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(m.positions.size());
    m.positions.push_back(q);
    index.emplace(key, id);
    return id;
  };
  const int n = static_cast<int>(coords.size());
  for (int d = 0; d < 3; ++d) {
    for (int s : {-1, 1}) {
      // (u, v, d) right-handed for the + face; swap for the - face.
      int du = (d + 1) % 3, dv = (d + 2) % 3;
      if (s < 0) std::swap(du, dv);
      std::vector<int> ids(static_cast<std::size_t>(n * n));
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          Vec3 q;
          q[d] = s > 0 ? coords.back() : coords.front();
          q[du] = coords[i];
          q[dv] = coords[j];
          ids[j * n + i] = vertex(q);
        }
      }
      for (int j = 0; j + 1 < n; ++j) {
        for (int i = 0; i + 1 < n; ++i) {
          const int a = ids[j * n + i], b = ids[j * n + i + 1];
          const int c = ids[(j + 1) * n + i + 1], e = ids[(j + 1) * n + i];
          m.triangles.push_back({a, b, c});
          m.triangles.push_back({a, c, e});
        }
      }
    }
  }
  return m;
}

/// Cube with side `side` whose faces are split into an n x n grid.
inline MeshBuffer subdivided_cube(int n, double side = 1.0) {
  std::vector<double> coords;
  for (int i = 0; i <= n; ++i) coords.push_back(-side / 2.0 + side * i / n);
  return box_grid(coords);
}

/// Box with half-extent `half` whose edges and corners are rounded with
/// radius `radius`. `flat` grid intervals span each flat face, `arc`
/// intervals span each 90-degree edge arc.
inline MeshBuffer rounded_box(double half, double radius, int flat, int arc) {
  const double a = half - radius;  // half-extent of the inner core box
  // Pre-image grid on [-1, 1]: the core spans [-a', a'] with a' = a / half,
  // each rounded band is sampled uniformly in angle over 45 degrees.
  const double core = a / half;
  std::vector<double> coords;
  const int band = std::max(1, arc / 2);
  for (int k = band; k >= 1; --k) {
    const double th = (M_PI / 4.0) * k / band;
    coords.push_back(-(core + (1.0 - core) * std::tan(th)));
  }
  for (int i = 0; i <= flat; ++i) coords.push_back(-core + 2.0 * core * i / flat);
  for (int k = 1; k <= band; ++k) {
    const double th = (M_PI / 4.0) * k / band;
    coords.push_back(core + (1.0 - core) * std::tan(th));
  }
  // Pull each point onto the offset surface of the core box.
  MeshBuffer m = box_grid(coords);
  for (auto& q : m.positions) {
    Vec3 c;
    for (int k = 0; k < 3; ++k) c[k] = std::clamp(q[k], -core, core);
    const Vec3 dir = normalized(q - c);
    q = c * half + dir * radius;
  }
  return m;
}

/// Regular planar grid of equilateral triangles (unit edge), nx by ny vertices, in z = 0.
inline MeshBuffer equilateral_grid(int nx, int ny) {
  MeshBuffer m;
  const double h = std::sqrt(3.0) / 2.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) m.positions.push_back({i + 0.5 * (j % 2), j * h, 0.0});
  auto id = [nx](int i, int j) { return j * nx + i; };
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      if (j % 2 == 0) {
        m.triangles.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
        m.triangles.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
      } else {
        m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      }
    }
  }
  return m;
}

/// Square grid on [0, w] x [0, w], (n+1)^2 vertices, alternating diagonals.
inline MeshBuffer square_grid(int n, double w = 1.0) {
  MeshBuffer m;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) m.positions.push_back({w * i / n, w * j / n, 0.0});
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        m.triangles.push_back({a, b, c});
        m.triangles.push_back({a, c, d});
      } else {
        m.triangles.push_back({a, b, d});
        m.triangles.push_back({b, c, d});
      }
    }
  }
  return m;
}

/// Planar fan around vertex 0 at the origin whose seven neighbours sit at
/// uneven angles and radii, so their centroid is not the center.
inline MeshBuffer irregular_star() {
  const std::array<double, 7> deg{0, 40, 100, 150, 200, 260, 320};
  const std::array<double, 7> rad{1.0, 0.7, 1.3, 0.9, 1.1, 0.8, 1.2};
  MeshBuffer m;
  m.positions.push_back({0, 0, 0});
  for (int k = 0; k < 7; ++k) {
    const double a = deg[k] * M_PI / 180.0;
    m.positions.push_back({rad[k] * std::cos(a), rad[k] * std::sin(a), 0.0});
  }
  for (int k = 0; k < 7; ++k) m.triangles.push_back({0, 1 + k, 1 + (k + 1) % 7});
  return m;
}

/// Two flat triangles sharing edge (0,1) whose opposite angles are both
/// obtuse (about 147 degrees), so the cotangent weight of that edge is negative.
inline MeshBuffer obtuse_pair() {
  MeshBuffer m;
  m.positions = {{-1, 0, 0}, {1, 0, 0}, {0, 0.3, 0}, {0, -0.3, 0}};
  m.triangles = {{0, 1, 2}, {1, 0, 3}};
  return m;
}

/// Planar triangulation of a jittered (n x n) grid on [0,1]^2 with random
/// diagonals. Jitter stays below a quarter cell so every triangle keeps its
/// orientation.
inline MeshBuffer random_planar(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  MeshBuffer m;
  const double cell = 1.0 / (n - 1);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      Vec3 p{i * cell, j * cell, 0.0};
      if (i > 0 && i + 1 < n) p.x += (uniform() - 0.5) * 0.45 * cell;
      if (j > 0 && j + 1 < n) p.y += (uniform() - 0.5) * 0.45 * cell;
      m.positions.push_back(p);
    }
  }
  auto id = [n](int i, int j) { return j * n + i; };
  for (int j = 0; j + 1 < n; ++j) {
    for (int i = 0; i + 1 < n; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (uniform() < 0.5) {
        m.triangles.push_back({a, b, c});
        m.triangles.push_back({a, c, d});
      } else {
        m.triangles.push_back({a, b, d});
        m.triangles.push_back({b, c, d});
      }
    }
  }
  return m;
}

}  // namespace meshlines::shapes
