#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "test_support.hpp"

using namespace meshlines;
using testing_support::directed_hausdorff;
using testing_support::points_of;

namespace {

MeshBuffer one_triangle() {
  MeshBuffer m;
  m.positions = {{0, 0, 0}, {2, 0, 0}, {0, 2, 0}};
  m.triangles = {{0, 1, 2}};
  return m;
}

LineSet zero_set(const MeshBuffer& m, const std::vector<double>& phi) {
  return extract_zero_set(m, build_adjacency(m), phi);
}

Polyline polyline(const std::vector<Vec3>& pts, double strength = 0.0) {
  Polyline p;
  for (const auto& x : pts) {
    OnEdgePoint q;
    q.xyz = x;
    p.points.push_back(q);
  }
  p.strength = strength;
  return p;
}

}  // namespace

TEST(TriangleCrossing, Midpoints) {
  const MeshBuffer m = one_triangle();
  const auto s = triangle_zero_crossing(m, m.triangles[0], 1, 1, -1);
  ASSERT_TRUE(s.has_value());
  const Vec3 mid_jk(1, 1, 0), mid_ik(0, 1, 0);
  EXPECT_LT(std::min(distance(s->p.xyz, mid_jk), distance(s->p.xyz, mid_ik)), 1e-15);
  EXPECT_LT(std::min(distance(s->q.xyz, mid_jk), distance(s->q.xyz, mid_ik)), 1e-15);
  EXPECT_GT(distance(s->p.xyz, s->q.xyz), 0.5);
  EXPECT_DOUBLE_EQ(s->p.t, 0.5);
  EXPECT_DOUBLE_EQ(s->q.t, 0.5);
}

TEST(TriangleCrossing, NoSignChange) {
  const MeshBuffer m = one_triangle();
  EXPECT_FALSE(triangle_zero_crossing(m, m.triangles[0], 1, 2, 3).has_value());
}

TEST(TriangleCrossing, InterpolatedValueVanishes) {
  const MeshBuffer m = one_triangle();
  const double phi[3] = {-1, 4, 4};
  const auto s = triangle_zero_crossing(m, m.triangles[0], phi[0], phi[1], phi[2]);
  ASSERT_TRUE(s.has_value());
  for (const auto& p : {s->p, s->q}) {
    EXPECT_NEAR((1 - p.t) * phi[p.a] + p.t * phi[p.b], 0.0, 1e-12);
    EXPECT_NEAR(p.t, 0.2, 1e-15);
    EXPECT_LT(distance(p.xyz, lerp(m.positions[p.a], m.positions[p.b], p.t)), 1e-12);
    EXPECT_LT(p.a, p.b);
  }
}

TEST(ZeroSet, SphereEquator) {
  const MeshBuffer m = shapes::icosphere(3);
  std::vector<double> phi;
  for (const auto& p : m.positions) phi.push_back(p.z);
  const LineSet ls = zero_set(m, phi);
  ASSERT_EQ(ls.polylines.size(), 1u);
  EXPECT_TRUE(ls.polylines[0].closed);
  EXPECT_NEAR(total_length(ls), 2 * M_PI, 0.05 * 2 * M_PI);
  for (const auto& p : points_of(ls)) EXPECT_NEAR(p.z, 0.0, 1e-11);
}

TEST(ZeroSet, PlaneVerticalLine) {
  const MeshBuffer m = shapes::random_planar(10, 17);
  std::vector<double> phi;
  for (const auto& p : m.positions) phi.push_back(p.x - 0.5);
  const LineSet ls = zero_set(m, phi);
  ASSERT_EQ(ls.polylines.size(), 1u);
  EXPECT_FALSE(ls.polylines[0].closed);
  for (const auto& p : points_of(ls)) EXPECT_NEAR(p.x, 0.5, 1e-9);
  EXPECT_NEAR(total_length(ls), 1.0, 1e-9);
}

TEST(ZeroSet, AllPositiveEmpty) {
  const MeshBuffer m = shapes::icosphere(2);
  EXPECT_TRUE(zero_set(m, std::vector<double>(m.vertex_count(), 0.5)).empty());
}

TEST(ZeroSet, AllZeroTrianglesSkipped) {
  const MeshBuffer m = shapes::icosphere(1);
  ZeroSetStats st;
  Diagnostics diag;
  const LineSet ls =
      extract_zero_set(m, build_adjacency(m), std::vector<double>(m.vertex_count(), 0.0), {}, {}, &st, &diag);
  EXPECT_TRUE(ls.empty());
  EXPECT_EQ(st.skipped_all_zero, m.triangle_count());
  EXPECT_FALSE(diag.empty());
}

TEST(ZeroSet, VertexExactZerosNudged) {
  const MeshBuffer m = shapes::square_grid(8);
  std::vector<double> phi;
  for (const auto& p : m.positions) phi.push_back(p.x - 0.5);  // zero on a grid column
  ZeroSetStats st;
  const LineSet ls = extract_zero_set(m, build_adjacency(m), phi, {}, {}, &st);
  EXPECT_GT(st.nudged, 0u);
  EXPECT_EQ(st.skipped_odd, 0u);
  ASSERT_EQ(ls.polylines.size(), 1u);
  for (const auto& p : points_of(ls)) EXPECT_NEAR(p.x, 0.5, 1e-9);
}

TEST(ZeroSet, KeepPredicateAndPolarity) {
  const MeshBuffer m = shapes::icosphere(3);
  std::vector<double> phi;
  for (const auto& p : m.positions) phi.push_back(p.z);
  const KeepPredicate keep = [&](int, const Segment& s) -> std::optional<Polarity> {
    if (s.p.xyz.x < 0) return std::nullopt;
    return Polarity::ridge;
  };
  const LineSet ls = extract_zero_set(m, build_adjacency(m), phi, keep);
  ASSERT_FALSE(ls.empty());
  for (const auto& pl : ls.polylines) {
    EXPECT_EQ(pl.polarity, Polarity::ridge);
    EXPECT_FALSE(pl.closed);
  }
  EXPECT_LT(total_length(ls), 0.6 * 2 * M_PI);
}

TEST(ZeroSet, ClosedOnClosedMeshes) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  const MeshBuffer m = oracle::tessellate(oracle::torus(), 40, 20).mesh;
  for (int trial = 0; trial < 5; ++trial) {
    const Vec3 a(U(rng), U(rng), U(rng));
    const Vec3 b(U(rng), U(rng), U(rng));
    std::vector<double> phi;
    for (const auto& p : m.positions) phi.push_back(std::sin(dot(a, p) * 3) + 0.3 * std::cos(dot(b, p) * 2) + 0.1);
    const LineSet ls = zero_set(m, phi);
    for (const auto& pl : ls.polylines) EXPECT_TRUE(pl.closed);
  }
}

TEST(ZeroSet, NegationInvariance) {
  const MeshBuffer m = oracle::tessellate(oracle::torus(), 40, 20).mesh;
  std::vector<double> phi, neg;
  for (const auto& p : m.positions) phi.push_back(p.x * p.y - 0.2 * p.z + 0.05), neg.push_back(-phi.back());
  const auto a = points_of(zero_set(m, phi)), b = points_of(zero_set(m, neg));
  ASSERT_EQ(a.size(), b.size());
  EXPECT_LT(directed_hausdorff(a, b), 1e-12);
  EXPECT_LT(directed_hausdorff(b, a), 1e-12);
}

TEST(ZeroSet, ReindexingInvariance) {
  const MeshBuffer m = shapes::icosphere(3);
  std::vector<int> perm(m.vertex_count());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937(5));
  MeshBuffer p;
  p.positions.resize(m.vertex_count());
  for (std::size_t i = 0; i < perm.size(); ++i) p.positions[perm[i]] = m.positions[i];
  for (const auto& t : m.triangles) p.triangles.push_back({perm[t[0]], perm[t[1]], perm[t[2]]});
  auto field = [](const MeshBuffer& mm) {
    std::vector<double> phi;
    for (const auto& q : mm.positions) phi.push_back(q.x + 0.5 * q.y * q.z - 0.1);
    return phi;
  };
  const auto a = points_of(zero_set(m, field(m))), b = points_of(zero_set(p, field(p)));
  ASSERT_EQ(a.size(), b.size());
  EXPECT_LT(directed_hausdorff(a, b), 1e-12);
  EXPECT_LT(directed_hausdorff(b, a), 1e-12);
}

TEST(ZeroSet, ChainedSegmentsShareTriangles) {
  const MeshBuffer m = oracle::tessellate(oracle::torus(), 40, 20).mesh;
  const Adjacency adj = build_adjacency(m);
  std::vector<double> phi;
  for (const auto& p : m.positions) phi.push_back(p.x - 0.3);
  for (const auto& pl : zero_set(m, phi).polylines) {
    const std::size_t n = pl.points.size();
    for (std::size_t i = 0; i + 1 < n + (pl.closed ? 1 : 0); ++i) {
      const auto& p = pl.points[i];
      const auto& q = pl.points[(i + 1) % n];
      EXPECT_GT(distance(p.xyz, q.xyz), 1e-12);
      const auto tp = adj.edge_triangles[adj.edge_id(p.a, p.b)];
      const auto tq = adj.edge_triangles[adj.edge_id(q.a, q.b)];
      bool shared = false;
      for (int x : tp)
        for (int y : tq) shared = shared || (x >= 0 && x == y);
      EXPECT_TRUE(shared);
    }
  }
}

TEST(Strength, SingleTrapezoid) {
  EXPECT_DOUBLE_EQ(line_strength({{0, 0, 0}, {2, 0, 0}}, {1, 3}), 4.0);
  EXPECT_DOUBLE_EQ(line_strength({{0, 0, 0}}, {1}), 0.0);
}

TEST(Strength, ConstantWeight) {
  const std::vector<Vec3> pts = {{0, 0, 0}, {1, 0, 0}, {1, 2, 0}, {1, 2, 2}};
  EXPECT_NEAR(line_strength(pts, {1.5, 1.5, 1.5, 1.5}), 1.5 * 5, 1e-15);
}

TEST(Strength, RefinementInvariant) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<Vec3> pts;
  std::vector<double> w;
  for (int i = 0; i < 20; ++i) pts.push_back({U(rng), U(rng), U(rng)}), w.push_back(U(rng));
  std::vector<Vec3> fine;
  std::vector<double> fw;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    fine.push_back(pts[i]), fw.push_back(w[i]);
    fine.push_back((pts[i] + pts[i + 1]) * 0.5), fw.push_back(0.5 * (w[i] + w[i + 1]));
  }
  fine.push_back(pts.back()), fw.push_back(w.back());
  EXPECT_NEAR(line_strength(pts, w), line_strength(fine, fw), 1e-12);
}

TEST(Strength, InterpolatesOnEdges) {
  const MeshBuffer m = shapes::icosphere(3);
  std::vector<double> phi, weight;
  for (const auto& p : m.positions) phi.push_back(p.z), weight.push_back(2.0 + p.x);
  const LineSet ls = zero_set(m, phi);
  ASSERT_EQ(ls.polylines.size(), 1u);
  // integral of (2 + x) around the equator is 2 * 2 pi
  EXPECT_NEAR(line_strength(ls.polylines[0], weight), 4 * M_PI, 0.05 * 4 * M_PI);
}

TEST(Filter, DropBelow) {
  LineSet ls;
  std::vector<double> strengths = {0.5, 2.0, 1.0, 3.5, 0.99, 1.01, 0.0};
  for (double s : strengths) ls.polylines.push_back(polyline({{0, 0, 0}, {1, 0, 0}}, s));
  EXPECT_EQ(filter_drop_below(ls, 0.0).polylines.size(), strengths.size());
  EXPECT_TRUE(filter_drop_below(ls, 10.0).empty());
  const double tau = 1.0;
  const LineSet kept = filter_drop_below(ls, tau);
  std::vector<double> sorted = strengths;
  std::sort(sorted.begin(), sorted.end());
  const auto expected = static_cast<std::size_t>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), tau));
  EXPECT_EQ(kept.polylines.size(), expected);
  for (const auto& p : kept.polylines) EXPECT_GE(p.strength, tau);
}

TEST(Filter, Hysteresis) {
  LineSet ls;
  Polyline p = polyline({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {4, 0, 0}, {5, 0, 0}, {6, 0, 0}});
  p.values = {0.6, 0.9, 0.6, 0.1, 0.6, 0.7, 0.6};
  ls.polylines.push_back(p);
  const LineSet out = filter_hysteresis(ls, 0.5, 0.8);
  ASSERT_EQ(out.polylines.size(), 1u);
  EXPECT_EQ(out.polylines[0].points.size(), 3u);
  EXPECT_EQ(out.polylines[0].points[1].xyz, Vec3(1, 0, 0));
  EXPECT_EQ(filter_hysteresis(ls, 0.5, 0.6).polylines.size(), 2u);
  EXPECT_THROW(filter_hysteresis(ls, 0.9, 0.8), NumericError);
}

TEST(Filter, HysteresisClosedWraps) {
  LineSet ls;
  Polyline p = polyline({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {-1, 1, 0}});
  p.closed = true;
  p.values = {0.9, 0.6, 0.1, 0.6, 0.6};
  ls.polylines.push_back(p);
  const LineSet out = filter_hysteresis(ls, 0.5, 0.8);
  ASSERT_EQ(out.polylines.size(), 1u);
  EXPECT_EQ(out.polylines[0].points.size(), 4u);
  EXPECT_FALSE(out.polylines[0].closed);
}

TEST(Percentile, NinetyFifth) {
  std::vector<double> v(101);
  std::iota(v.begin(), v.end(), 0.0);
  v.push_back(std::nan(""));
  EXPECT_DOUBLE_EQ(percentile95(v), 95.0);
  EXPECT_DOUBLE_EQ(percentile95({}), 0.0);
}
