#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace meshlines;

namespace {

SmoothingConfig cfg(SmoothTarget t, int iters, double lambda, std::optional<double> mu = {}) {
  SmoothingConfig c;
  c.target = t;
  c.iterations = iters;
  c.lambda = lambda;
  c.mu = mu;
  return c;
}

double mean_radius(const MeshBuffer& m) {
  double s = 0;
  for (const auto& p : m.positions) s += norm(p);
  return s / m.vertex_count();
}

}  // namespace

TEST(Normals, PlanarFixedPoint) {
  const MeshBuffer m = shapes::random_planar(8, 1);
  const Adjacency adj = build_adjacency(m);
  const auto n0 = vertex_normals(m, adj).vertex;
  const auto n1 = smooth_normals(adj, n0, cfg(SmoothTarget::normals, 10, 0.5));
  for (std::size_t i = 0; i < n0.size(); ++i) EXPECT_LT(distance(n0[i], n1[i]), 1e-14);
}

TEST(Normals, PerturbedRecovers) {
  const MeshBuffer m = shapes::icosphere(3);
  const Adjacency adj = build_adjacency(m);
  auto n = vertex_normals(m, adj).vertex;
  const int v = 100;
  n[v] = normalized(n[v] + Vec3(0.7, -0.4, 0.5));
  const double before = angle_between(n[v], m.positions[v]);
  ASSERT_GT(before, 20 * M_PI / 180);
  const auto s = smooth_normals(adj, n, cfg(SmoothTarget::normals, 10, 0.5));
  EXPECT_LT(angle_between(s[v], m.positions[v]), 5 * M_PI / 180);
}

TEST(Normals, ZeroIterationsIdentity) {
  const MeshBuffer m = shapes::icosphere(2);
  const Adjacency adj = build_adjacency(m);
  const auto n = vertex_normals(m, adj).vertex;
  EXPECT_EQ(smooth_normals(adj, n, cfg(SmoothTarget::normals, 0, 0.5)), n);
}

TEST(Normals, VanishingAverageAborts) {
  // two vertices, opposite normals: the average cancels
  MeshBuffer m;
  m.positions = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  m.triangles = {{0, 1, 2}};
  const Adjacency adj = build_adjacency(m);
  std::vector<Vec3> n = {{0, 0, 1}, {0, 0, -1}, {0, 0, 1}};
  try {
    smooth_normals(adj, n, cfg(SmoothTarget::normals, 1, 1.0));
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("vertex"), std::string::npos);
  }
}

TEST(Geometry, SymmetricInteriorUnmoved) {
  const MeshBuffer m = shapes::equilateral_grid(8, 8);
  const Adjacency adj = build_adjacency(m);
  const MeshBuffer s = smooth_mesh(m, adj, cfg(SmoothTarget::geometry, 1, 0.5));
  for (std::size_t i = 0; i < m.vertex_count(); ++i)
    if (!adj.is_boundary_vertex(static_cast<int>(i))) {
      EXPECT_LT(distance(m.positions[i], s.positions[i]), 1e-12);
    }
}

TEST(Geometry, LambdaOnlyShrinks) {
  const MeshBuffer m = shapes::icosphere(3);
  const double r0 = mean_radius(m);
  const MeshBuffer s = smooth_mesh(m, cfg(SmoothTarget::geometry, 50, 0.5));
  EXPECT_LT(mean_radius(s), r0 - 0.01);
  double prev = r0;
  MeshBuffer cur = m;
  for (int i = 0; i < 5; ++i) {
    cur = smooth_mesh(cur, cfg(SmoothTarget::geometry, 1, 0.5));
    EXPECT_LT(mean_radius(cur), prev);
    prev = mean_radius(cur);
  }
}

TEST(Geometry, AntiShrinkPair) {
  const MeshBuffer m = shapes::icosphere(3);
  const MeshBuffer s = smooth_mesh(m, cfg(SmoothTarget::geometry, 50, 0.33, -0.34));
  EXPECT_NEAR(mean_radius(s), mean_radius(m), 0.02 * mean_radius(m));
}

TEST(Geometry, TopologyPreserved) {
  const MeshBuffer m = shapes::rounded_box(1, 0.3, 3, 3);
  const MeshBuffer s = smooth_mesh(m, cfg(SmoothTarget::geometry, 5, 0.5, -0.53));
  EXPECT_EQ(s.triangles, m.triangles);
  const Adjacency a = build_adjacency(m), b = build_adjacency(s);
  EXPECT_EQ(a.edges, b.edges);
  EXPECT_EQ(a.neighbors, b.neighbors);
}

TEST(Scalar, ConstantUnchanged) {
  const MeshBuffer m = shapes::icosphere(2);
  const Adjacency adj = build_adjacency(m);
  const std::vector<double> phi(m.vertex_count(), 1.25);
  EXPECT_EQ(smooth_scalar_field(adj, phi, cfg(SmoothTarget::scalar_field, 7, 0.8)), phi);
}

TEST(Scalar, SpikeReduced) {
  const MeshBuffer m = shapes::icosphere(2);
  const Adjacency adj = build_adjacency(m);
  std::vector<double> phi(m.vertex_count(), 0.0);
  phi[10] = 1.0;
  const auto s = smooth_scalar_field(adj, phi, cfg(SmoothTarget::scalar_field, 1, 0.5));
  EXPECT_LT(s[10], 1.0);
  EXPECT_DOUBLE_EQ(s[10], 0.5);
}

TEST(Scalar, LinearInteriorUnchanged) {
  const MeshBuffer m = shapes::equilateral_grid(8, 8);
  const Adjacency adj = build_adjacency(m);
  std::vector<double> phi;
  for (const auto& p : m.positions) phi.push_back(0.3 * p.x - 1.2 * p.y + 2);
  const auto s = smooth_scalar_field(adj, phi, cfg(SmoothTarget::scalar_field, 1, 0.7));
  for (std::size_t i = 0; i < phi.size(); ++i)
    if (!adj.is_boundary_vertex(static_cast<int>(i))) {
      EXPECT_NEAR(s[i], phi[i], 1e-12);
    }
}

TEST(Scalar, MaximumPrinciple) {
  const MeshBuffer m = oracle::tessellate(oracle::torus(), 30, 15).mesh;
  const Adjacency adj = build_adjacency(m);
  std::vector<double> phi;
  for (const auto& p : m.positions) phi.push_back(std::sin(3 * p.x) * std::cos(2 * p.y) + p.z);
  const double lo = *std::min_element(phi.begin(), phi.end()), hi = *std::max_element(phi.begin(), phi.end());
  for (double lambda : {0.2, 0.5, 1.0}) {
    const auto s = smooth_scalar_field(adj, phi, cfg(SmoothTarget::scalar_field, 10, lambda));
    EXPECT_LE(*std::max_element(s.begin(), s.end()), hi);
    EXPECT_GE(*std::min_element(s.begin(), s.end()), lo);
  }
}

TEST(Config, Parse) {
  const SmoothingConfig c = parse_smoothing("target=geometry,iters=10,lambda=0.33,mu=-0.34");
  EXPECT_EQ(c.target, SmoothTarget::geometry);
  EXPECT_EQ(c.iterations, 10);
  EXPECT_DOUBLE_EQ(c.lambda, 0.33);
  ASSERT_TRUE(c.mu.has_value());
  EXPECT_DOUBLE_EQ(*c.mu, -0.34);
  EXPECT_EQ(parse_smoothing("target=scalar-field").target, SmoothTarget::scalar_field);
  EXPECT_THROW(parse_smoothing("target=bones"), ParseError);
  EXPECT_THROW(parse_smoothing("iters=-1"), ParseError);
  EXPECT_THROW(parse_smoothing("iters=1.5"), ParseError);
  EXPECT_THROW(parse_smoothing("lambda=0"), ParseError);
  EXPECT_THROW(parse_smoothing("lambda=1.5"), ParseError);
  EXPECT_THROW(parse_smoothing("mu=0.2"), ParseError);
  EXPECT_THROW(parse_smoothing("depth=2"), ParseError);
}
