#pragma once

// Uniform-weight Jacobi smoothing of normals, positions and scalar fields,
// with an optional second (inflating) step for the Taubin lambda|mu pair.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "mesh.hpp"

namespace meshlines {

enum class SmoothTarget { normals, geometry, scalar_field };

inline const char* target_name(SmoothTarget t) {
  switch (t) {
    case SmoothTarget::normals: return "normals";
    case SmoothTarget::geometry: return "geometry";
    case SmoothTarget::scalar_field: return "scalar-field";
  }
  return "?";
}

struct SmoothingConfig {
  SmoothTarget target = SmoothTarget::normals;
  int iterations = 0;
  double lambda = 0.5;
  std::optional<double> mu;

  void validate() const {
    if (iterations < 0) throw ParseError("smoothing iterations must be >= 0");
    if (!(lambda > 0.0 && lambda <= 1.0)) throw ParseError("smoothing lambda must lie in (0, 1]");
    if (mu && !(*mu < 0.0)) throw ParseError("smoothing mu must be negative");
  }
};

namespace detail {

/// One Jacobi step x_i <- x_i + s * mean_j (x_j - x_i) over N(i).
template <class T>
std::vector<T> umbrella_step(const Adjacency& adj, const std::vector<T>& x, double s) {
  std::vector<T> out(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& nb = adj.neighbors[i];
    if (nb.empty()) continue;
    T acc{};
    for (int j : nb) acc = acc + (x[j] - x[i]);
    out[i] = x[i] + acc * (s / static_cast<double>(nb.size()));
  }
  return out;
}

}  // namespace detail

/// n_i <- normalize(n_i + lambda * mean (n_j - n_i)); geometry untouched.
inline std::vector<Vec3> smooth_normals(const Adjacency& adj, std::vector<Vec3> normals, const SmoothingConfig& cfg) {
  cfg.validate();
  for (int it = 0; it < cfg.iterations; ++it) {
    for (double s : {cfg.lambda, cfg.mu.value_or(0.0)}) {
      if (s == 0.0) continue;
      auto next = detail::umbrella_step(adj, normals, s);
      for (std::size_t i = 0; i < next.size(); ++i) {
        const double n = norm(next[i]);
        if (n < 1e-9) throw NumericError("averaged normal vanishes at vertex " + std::to_string(i));
        next[i] = next[i] / n;
      }
      normals = std::move(next);
    }
  }
  return normals;
}

/// p_i <- p_i + lambda * mean (p_j - p_i), then the mu step when given.
inline MeshBuffer smooth_mesh(const MeshBuffer& mesh, const Adjacency& adj, const SmoothingConfig& cfg) {
  cfg.validate();
  MeshBuffer out = mesh;
  for (int it = 0; it < cfg.iterations; ++it) {
    out.positions = detail::umbrella_step(adj, out.positions, cfg.lambda);
    if (cfg.mu) out.positions = detail::umbrella_step(adj, out.positions, *cfg.mu);
  }
  return out;
}

inline MeshBuffer smooth_mesh(const MeshBuffer& mesh, const SmoothingConfig& cfg) {
  return smooth_mesh(mesh, build_adjacency(mesh), cfg);
}

inline std::vector<double> smooth_scalar_field(const Adjacency& adj, std::vector<double> phi, const SmoothingConfig& cfg) {
  cfg.validate();
  for (int it = 0; it < cfg.iterations; ++it) {
    phi = detail::umbrella_step(adj, phi, cfg.lambda);
    if (cfg.mu) phi = detail::umbrella_step(adj, phi, *cfg.mu);
  }
  return phi;
}

/// Parses "target=normals,iters=10,lambda=0.5[,mu=-0.53]".
inline SmoothingConfig parse_smoothing(const std::string& text) {
  SmoothingConfig cfg;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    pos = comma + 1;
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("smoothing option '" + item + "' lacks '='");
    const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    auto number = [&] {
      try {
        std::size_t used = 0;
        const double v = std::stod(val, &used);
        if (used != val.size()) throw std::invalid_argument(val);
        return v;
      } catch (const std::exception&) {
        throw ParseError("bad number '" + val + "' for smoothing option " + key);
      }
    };
    if (key == "target") {
      if (val == "normals") cfg.target = SmoothTarget::normals;
      else if (val == "geometry") cfg.target = SmoothTarget::geometry;
      else if (val == "scalar-field" || val == "scalar") cfg.target = SmoothTarget::scalar_field;
      else throw ParseError("unknown smoothing target '" + val + "'");
    } else if (key == "iters" || key == "iterations") {
      const double v = number();
      if (v != std::floor(v)) throw ParseError("smoothing iterations must be an integer");
      cfg.iterations = static_cast<int>(v);
    } else if (key == "lambda") {
      cfg.lambda = number();
    } else if (key == "mu") {
      cfg.mu = number();
    } else {
      throw ParseError("unknown smoothing option '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace meshlines
