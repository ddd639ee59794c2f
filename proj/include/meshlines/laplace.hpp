#pragma once

// Discrete Laplace-Beltrami operators in difference form
//   (L phi)_i = sum_j w_ij (phi_j - phi_i)
// with combinatorial, uniform, mean-value, cotangent and Belkin weights.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "mesh.hpp"

namespace meshlines {

enum class LaplacianScheme { combinatorial, uniform, mean_value, cotangent, belkin };

inline const char* scheme_name(LaplacianScheme s) {
  switch (s) {
    case LaplacianScheme::combinatorial: return "combinatorial";
    case LaplacianScheme::uniform: return "uniform";
    case LaplacianScheme::mean_value: return "mean-value";
    case LaplacianScheme::cotangent: return "cotangent";
    case LaplacianScheme::belkin: return "belkin";
  }
  return "?";
}

inline LaplacianScheme parse_scheme(const std::string& s) {
  if (s == "combinatorial") return LaplacianScheme::combinatorial;
  if (s == "uniform") return LaplacianScheme::uniform;
  if (s == "mean-value" || s == "mean_value" || s == "meanvalue") return LaplacianScheme::mean_value;
  if (s == "cotangent" || s == "cot") return LaplacianScheme::cotangent;
  if (s == "belkin") return LaplacianScheme::belkin;
  throw ParseError("unknown Laplacian scheme '" + s + "'");
}

struct LaplacianOptions {
  std::optional<double> h;    // Belkin bandwidth; default mean edge length
  bool exact = false;         // Belkin: no kernel truncation
  double truncation = 1e-12;  // Belkin: drop kernel terms below this
};

/// Row-indexed weights. Local schemes store their rows; Belkin rows are
/// generated on demand from the kernel because they are dense.
class SparseLaplacian {
 public:
  using Entry = std::pair<int, double>;

  LaplacianScheme scheme = LaplacianScheme::cotangent;
  double h = 0.0;
  std::vector<std::string> notes;

  std::size_t size() const { return n_; }

  /// Row i as (column, weight) pairs sorted by column, zero weights omitted.
  std::vector<Entry> row(int i) const {
    if (scheme != LaplacianScheme::belkin) return rows_[i];
    std::vector<Entry> out;
    const double pre = 1.0 / (4.0 * M_PI * h * h);
    const Vec3& p = pos_[i];
    auto visit = [&](int j) {
      if (j == i) return;
      const double k = std::exp(-distance2(p, pos_[j]) / (4.0 * h));
      if (!exact_ && k < cut_) return;
      const double w = pre * mass_[j] * k;
      if (w != 0.0) out.emplace_back(j, w);
    };
    if (exact_ || cells_.empty()) {
      for (int j = 0; j < static_cast<int>(n_); ++j) visit(j);
    } else {
      const auto c = cell_of(p);
      for (long dx = -1; dx <= 1; ++dx)
        for (long dy = -1; dy <= 1; ++dy)
          for (long dz = -1; dz <= 1; ++dz) {
            const auto it = cells_.find(cell_key(c[0] + dx, c[1] + dy, c[2] + dz));
            if (it == cells_.end()) continue;
            for (int j : it->second) visit(j);
          }
      std::sort(out.begin(), out.end());
    }
    return out;
  }

  double weight(int i, int j) const {
    const auto r = row(i);
    const auto it = std::lower_bound(r.begin(), r.end(), Entry{j, -HUGE_VAL});
    return it != r.end() && it->first == j ? it->second : 0.0;
  }

  // Internal state, filled by build_laplacian.
  static double distance2(const Vec3& a, const Vec3& b) { return norm2(a - b); }
  std::array<long, 3> cell_of(const Vec3& p) const {
    return {static_cast<long>(std::floor(p.x / cell_)), static_cast<long>(std::floor(p.y / cell_)),
            static_cast<long>(std::floor(p.z / cell_))};
  }
  static std::uint64_t cell_key(long x, long y, long z) {
    auto u = [](long v) { return static_cast<std::uint64_t>(v + (1L << 20)) & 0x1FFFFF; };
    return (u(x) << 42) | (u(y) << 21) | u(z);
  }

  std::size_t n_ = 0;
  std::vector<std::vector<Entry>> rows_;
  // Belkin kernel data
  std::vector<Vec3> pos_;
  std::vector<double> mass_;  // sum of A/3 over incident triangles
  bool exact_ = false;
  double cut_ = 0.0;
  double cell_ = 0.0;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

namespace detail {

inline double cot_at(const Vec3& apex, const Vec3& a, const Vec3& b) {
  const Vec3 u = a - apex, v = b - apex;
  return dot(u, v) / norm(cross(u, v));
}

inline double angle_at(const Vec3& apex, const Vec3& a, const Vec3& b) { return angle_between(a - apex, b - apex); }

inline int third_vertex(const Triangle& t, int i, int j) {
  for (int v : t)
    if (v != i && v != j) return v;
  return -1;
}

}  // namespace detail

inline SparseLaplacian build_laplacian(const MeshBuffer& mesh, const Adjacency& adj, LaplacianScheme scheme,
                                       const LaplacianOptions& opt = {}) {
  SparseLaplacian L;
  L.scheme = scheme;
  L.n_ = mesh.positions.size();
  const auto& P = mesh.positions;
  if (scheme == LaplacianScheme::belkin) {
    L.h = opt.h.value_or(mean_edge_length(mesh, adj));
    if (!(L.h > 0.0)) throw NumericError("Belkin bandwidth h must be positive");
    L.pos_ = P;
    L.mass_.assign(L.n_, 0.0);
    for (const auto& t : mesh.triangles)
      for (int v : t) L.mass_[v] += triangle_area(mesh, t) / 3.0;
    L.exact_ = opt.exact;
    L.cut_ = opt.truncation;
    if (!opt.exact) {
      // exp(-d^2 / 4h) < cut  <=>  d > sqrt(-4h ln cut)
      const double radius = std::sqrt(-4.0 * L.h * std::log(opt.truncation));
      if (radius < bounding_box(P).diagonal()) {
        L.cell_ = radius;
        for (int v = 0; v < static_cast<int>(L.n_); ++v) {
          const auto c = L.cell_of(P[v]);
          L.cells_[SparseLaplacian::cell_key(c[0], c[1], c[2])].push_back(v);
        }
      }
    }
    return L;
  }
  L.rows_.assign(L.n_, {});
  std::size_t boundary_edges = 0;
  for (int i = 0; i < static_cast<int>(L.n_); ++i) {
    for (int j : adj.neighbors[i]) {
      double w = 0.0;
      if (scheme == LaplacianScheme::combinatorial) {
        w = 1.0;
      } else if (scheme == LaplacianScheme::uniform) {
        w = 1.0 / static_cast<double>(adj.neighbors[i].size());
      } else {
        const int e = adj.edge_id(i, j);
        for (int t : adj.edge_triangles[e]) {
          if (t < 0) continue;
          const int k = detail::third_vertex(mesh.triangles[t], i, j);
          if (scheme == LaplacianScheme::cotangent)
            w += detail::cot_at(P[k], P[i], P[j]);
          else
            w += std::tan(detail::angle_at(P[i], P[j], P[k]) / 2.0);
        }
        if (scheme == LaplacianScheme::mean_value) w /= distance(P[i], P[j]);
        if (adj.is_boundary_edge(e) && i < j) ++boundary_edges;
      }
      L.rows_[i].emplace_back(j, w);
    }
  }
  if (boundary_edges > 0)
    L.notes.push_back(std::to_string(boundary_edges) + " boundary edges use the single incident triangle");
  return L;
}

inline SparseLaplacian build_laplacian(const MeshBuffer& mesh, LaplacianScheme scheme, const LaplacianOptions& opt = {}) {
  return build_laplacian(mesh, build_adjacency(mesh), scheme, opt);
}

inline std::vector<double> apply(const SparseLaplacian& L, const std::vector<double>& phi) {
  std::vector<double> out(L.size(), 0.0);
  for (int i = 0; i < static_cast<int>(L.size()); ++i) {
    double acc = 0.0;
    for (const auto& [j, w] : L.row(i)) acc += w * (phi[j] - phi[i]);
    out[i] = acc;
  }
  return out;
}

/// Component-wise Laplacian of a 3-vector field.
inline std::vector<Vec3> apply(const SparseLaplacian& L, const std::vector<Vec3>& field) {
  std::vector<Vec3> out(L.size());
  for (int i = 0; i < static_cast<int>(L.size()); ++i) {
    Vec3 acc;
    for (const auto& [j, w] : L.row(i)) acc += (field[j] - field[i]) * w;
    out[i] = acc;
  }
  return out;
}

inline std::vector<Vec3> vector_laplacian_of_normals(const std::vector<Vec3>& normals, const SparseLaplacian& L) {
  return apply(L, normals);
}

struct PropertyCheck {
  bool holds = true;
  bool skipped = false;
  std::string witness;  // concrete violation, empty when holding
};

struct PropertyReport {
  PropertyCheck sym, loc, pos, lin;
  std::vector<std::string> notes;
};

/// Mesh lies in a plane within 1e-9 of its bounding-box diagonal.
inline bool is_planar(const MeshBuffer& mesh, Vec3* normal_out = nullptr) {
  Vec3 n;
  for (const auto& t : mesh.triangles) n += triangle_cross(mesh, t);
  if (norm(n) == 0.0) return false;
  n = normalized(n);
  const Vec3 c = mesh.positions.front();
  const double tol = 1e-9 * bounding_box(mesh.positions).diagonal();
  for (const auto& p : mesh.positions)
    if (std::abs(dot(p - c, n)) > tol) return false;
  if (normal_out) *normal_out = n;
  return true;
}

inline std::string pair_witness(int i, int j, double wij, double wji) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "w(%d,%d) = %.9g, w(%d,%d) = %.9g", i, j, wij, j, i, wji);
  return buf;
}

inline PropertyReport check_properties(const SparseLaplacian& L, const MeshBuffer& mesh, const Adjacency& adj) {
  PropertyReport r;
  r.notes = L.notes;
  const int n = static_cast<int>(L.size());
  std::vector<std::vector<SparseLaplacian::Entry>> rows(n);
  double wmax = 0.0;
  for (int i = 0; i < n; ++i) {
    rows[i] = L.row(i);
    for (const auto& e : rows[i]) wmax = std::max(wmax, std::abs(e.second));
  }
  auto lookup = [&](int i, int j) {
    const auto& row = rows[i];
    const auto it = std::lower_bound(row.begin(), row.end(), SparseLaplacian::Entry{j, -HUGE_VAL});
    return it != row.end() && it->first == j ? it->second : 0.0;
  };
  // (Sym)
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, w] : rows[i]) {
      const double d = std::abs(w - lookup(j, i));
      if (d > 1e-12 * wmax && d > worst) {
        worst = d;
        r.sym.holds = false;
        r.sym.witness = pair_witness(i, j, w, lookup(j, i));
      }
    }
  }
  // (Loc)
  for (int i = 0; i < n && r.loc.holds; ++i) {
    for (const auto& [j, w] : rows[i]) {
      if (w != 0.0 && adj.edge_id(i, j) < 0) {
        r.loc.holds = false;
        char buf[160];
        std::snprintf(buf, sizeof buf, "w(%d,%d) = %.9g but (%d,%d) is not an edge", i, j, w, i, j);
        r.loc.witness = buf;
        break;
      }
    }
  }
  // (Pos)
  double wmin = 0.0;
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, w] : rows[i]) {
      if (w < wmin) {
        wmin = w;
        r.pos.holds = false;
        char buf[160];
        std::snprintf(buf, sizeof buf, "w(%d,%d) = %.9g", i, j, w);
        r.pos.witness = buf;
      }
    }
  }
  // (Lin)
  Vec3 pn;
  if (!is_planar(mesh, &pn)) {
    r.lin.skipped = true;
    r.notes.push_back("Lin skipped: mesh is not planar");
  } else {
    Vec3 a1, a2;
    a1 = normalized(std::abs(pn.x) < 0.9 ? cross(pn, Vec3{1, 0, 0}) : cross(pn, Vec3{0, 1, 0}));
    a2 = cross(pn, a1);
    double worst_res = 0.0;
    for (const Vec3& a : {a1, a2, normalized(a1 * 0.6 + a2 * 0.8)}) {
      std::vector<double> phi(n);
      for (int i = 0; i < n; ++i) phi[i] = dot(a, mesh.positions[i]) + 0.25;
      for (int i = 0; i < n; ++i) {
        if (adj.is_boundary_vertex(i) && L.scheme != LaplacianScheme::belkin) continue;
        double acc = 0.0, scale = 0.0;
        for (const auto& [j, w] : rows[i]) {
          acc += w * (phi[j] - phi[i]);
          scale += std::abs(w * (phi[j] - phi[i]));
        }
        if (std::abs(acc) > 1e-9 * scale && std::abs(acc) > worst_res) {
          worst_res = std::abs(acc);
          r.lin.holds = false;
          char buf[160];
          std::snprintf(buf, sizeof buf, "vertex %d: L(phi) = %.9g for linear phi", i, acc);
          r.lin.witness = buf;
        }
      }
    }
    if (L.scheme != LaplacianScheme::belkin) r.notes.push_back("Lin evaluated at interior vertices");
  }
  return r;
}

/// "row col weight" lines, 9 significant digits.
inline std::string export_coordinate_list(const SparseLaplacian& L) {
  std::string out;
  char buf[96];
  for (int i = 0; i < static_cast<int>(L.size()); ++i) {
    for (const auto& [j, w] : L.row(i)) {
      std::snprintf(buf, sizeof buf, "%d %d %.9g\n", i, j, w);
      out += buf;
    }
  }
  return out;
}

}  // namespace meshlines
