#pragma once

// Small fixed-size linear algebra used by the differential operators:
// symmetric 2x2 eigen-decomposition, general 2x2 matrices, a Jacobi
// eigen-solver for tiny least-squares systems, and real cubic roots.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "vec.hpp"

namespace meshlines {

/// Symmetric 2x2 tensor (e f; f g).
struct Sym2 {
  double e = 0.0;
  double f = 0.0;
  double g = 0.0;

  Sym2 operator+(const Sym2& o) const { return {e + o.e, f + o.f, g + o.g}; }
  Sym2 operator-(const Sym2& o) const { return {e - o.e, f - o.f, g - o.g}; }
  Sym2 operator*(double s) const { return {e * s, f * s, g * s}; }
  Sym2& operator+=(const Sym2& o) {
    e += o.e;
    f += o.f;
    g += o.g;
    return *this;
  }
  Vec2 operator*(const Vec2& v) const { return {e * v.x + f * v.y, f * v.x + g * v.y}; }
  bool operator==(const Sym2&) const = default;
};

/// Quadratic form <u, S u>.
inline double quadratic_form(const Sym2& s, const Vec2& u) { return dot(u, s * u); }

struct Eigen2 {
  double value_hi = 0.0;  // larger eigenvalue
  double value_lo = 0.0;
  Vec2 dir_hi{1.0, 0.0};  // unit eigenvector of value_hi
  Vec2 dir_lo{0.0, 1.0};
};

inline Eigen2 eigen(const Sym2& s) {
  const double mean = 0.5 * (s.e + s.g);
  const double half_diff = 0.5 * (s.e - s.g);
  const double r = std::hypot(half_diff, s.f);
  Eigen2 out;
  out.value_hi = mean + r;
  out.value_lo = mean - r;
  if (r > 0.0) {
    const double phi = 0.5 * std::atan2(s.f, half_diff);
    out.dir_hi = {std::cos(phi), std::sin(phi)};
    out.dir_lo = {-std::sin(phi), std::cos(phi)};
  }
  return out;
}

/// General 2x2 matrix (a b; c d).
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static Mat2 from(const Sym2& s) { return {s.e, s.f, s.f, s.g}; }
  double det() const { return a * d - b * c; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 transposed() const { return {a, c, b, d}; }
  /// Inverse; caller checks det() first.
  Mat2 inverse() const {
    const double inv = 1.0 / det();
    return {d * inv, -b * inv, -c * inv, a * inv};
  }
};

/// Eigen-decomposition of a symmetric N x N matrix by cyclic Jacobi sweeps.
/// `a` is row-major and is overwritten; eigenvalues land on the diagonal.
template <std::size_t N>
void jacobi_eigen(std::array<double, N * N>& a, std::array<double, N * N>& vectors) {
  vectors.fill(0.0);
  for (std::size_t i = 0; i < N; ++i) vectors[i * N + i] = 1.0;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) off += a[p * N + q] * a[p * N + q];
    if (off < 1e-300) break;
    for (std::size_t p = 0; p < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        const double apq = a[p * N + q];
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a[q * N + q] - a[p * N + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < N; ++k) {
          const double akp = a[k * N + p];
          const double akq = a[k * N + q];
          a[k * N + p] = c * akp - s * akq;
          a[k * N + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const double apk = a[p * N + k];
          const double aqk = a[q * N + k];
          a[p * N + k] = c * apk - s * aqk;
          a[q * N + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const double vkp = vectors[k * N + p];
          const double vkq = vectors[k * N + q];
          vectors[k * N + p] = c * vkp - s * vkq;
          vectors[k * N + q] = s * vkp + c * vkq;
        }
      }
    }
  }
}

template <std::size_t N>
struct LeastSquaresResult {
  std::array<double, N> x{};
  std::size_t rank = 0;
};

/// Minimum-norm least-squares solution of the normal equations
/// (M^T M) x = M^T y, given as `normal` (row-major N x N) and `rhs`.
/// Eigenvalues below `rel_tol * max eigenvalue` are treated as zero.
template <std::size_t N>
LeastSquaresResult<N> solve_normal_equations(std::array<double, N * N> normal, const std::array<double, N>& rhs,
                                             double rel_tol = 1e-12) {
  std::array<double, N * N> vecs{};
  jacobi_eigen<N>(normal, vecs);
  double max_ev = 0.0;
  for (std::size_t i = 0; i < N; ++i) max_ev = std::max(max_ev, std::abs(normal[i * N + i]));
  LeastSquaresResult<N> out;
  if (max_ev == 0.0) return out;
  for (std::size_t k = 0; k < N; ++k) {
    const double ev = normal[k * N + k];
    if (std::abs(ev) <= rel_tol * max_ev) continue;
    ++out.rank;
    double proj = 0.0;
    for (std::size_t i = 0; i < N; ++i) proj += vecs[i * N + k] * rhs[i];
    proj /= ev;
    for (std::size_t i = 0; i < N; ++i) out.x[i] += proj * vecs[i * N + k];
  }
  return out;
}

/// Real roots of c3 t^3 + c2 t^2 + c1 t + c0 = 0, leading coefficients that
/// are negligible relative to the largest one drop the degree.
inline std::vector<double> real_cubic_roots(double c3, double c2, double c1, double c0) {
  std::vector<double> roots;
  const double scale = std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
  if (scale == 0.0) return roots;
  c3 /= scale;
  c2 /= scale;
  c1 /= scale;
  c0 /= scale;
  constexpr double eps = 1e-12;
  if (std::abs(c3) < eps) {
    if (std::abs(c2) < eps) {
      if (std::abs(c1) >= eps) roots.push_back(-c0 / c1);
      return roots;
    }
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc < 0.0) return roots;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (c1 + (c1 >= 0 ? sq : -sq));
    roots.push_back(q / c2);
    if (q != 0.0) roots.push_back(c0 / q);
    return roots;
  }
  // Depressed cubic t = s - a/3: s^3 + p s + q = 0.
  const double a = c2 / c3, b = c1 / c3, c = c0 / c3;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    roots.push_back(std::cbrt(-q / 2.0 + sq) + std::cbrt(-q / 2.0 - sq) - a / 3.0);
  } else if (p == 0.0) {
    roots.push_back(-a / 3.0);
  } else {
    const double r = std::sqrt(-p / 3.0);
    const double arg = std::clamp(-q / (2.0 * r * r * r), -1.0, 1.0);
    const double phi = std::acos(arg);
    for (int k = 0; k < 3; ++k) roots.push_back(2.0 * r * std::cos((phi - 2.0 * M_PI * k) / 3.0) - a / 3.0);
  }
  // Newton polish against the original coefficients.
  for (double& t : roots) {
    for (int it = 0; it < 3; ++it) {
      const double f = ((c3 * t + c2) * t + c1) * t + c0;
      const double df = (3.0 * c3 * t + 2.0 * c2) * t + c1;
      if (df == 0.0) break;
      const double step = f / df;
      if (!std::isfinite(step)) break;
      t -= step;
    }
  }
  return roots;
}

}  // namespace meshlines
