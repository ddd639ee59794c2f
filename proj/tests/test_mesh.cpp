#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <numeric>
#include <random>

#include "test_support.hpp"

using namespace meshlines;

namespace {

const char* kTriangleObj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";

std::string icosahedron_obj() { return write_obj(shapes::icosahedron()); }

template <class E>
std::string error_text(const std::string& text, MeshFormat fmt = MeshFormat::obj) {
  try {
    load_mesh(text, fmt);
  } catch (const E& e) {
    return e.what();
  }
  return "<no error>";
}

}  // namespace

TEST(Load, MinimalObj) {
  const MeshBuffer m = load_mesh(kTriangleObj, MeshFormat::obj);
  EXPECT_EQ(m.vertex_count(), 3u);
  EXPECT_EQ(m.triangle_count(), 1u);
  EXPECT_EQ(m.positions[1], Vec3(1, 0, 0));
}

TEST(Load, IndexOutOfRange) {
  EXPECT_THROW(load_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n", MeshFormat::obj), GeometryError);
  EXPECT_NE(error_text<GeometryError>("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n").find("out of range"), std::string::npos);
}

TEST(Load, IcosahedronCounts) {
  const MeshBuffer m = load_mesh(icosahedron_obj(), MeshFormat::obj);
  const Adjacency adj = build_adjacency(m);
  EXPECT_EQ(m.vertex_count(), 12u);
  EXPECT_EQ(m.triangle_count(), 20u);
  EXPECT_EQ(adj.edges.size(), 30u);
  EXPECT_EQ(euler_characteristic(m, adj), 2);
}

TEST(Load, ParseErrorCarriesLine) {
  try {
    load_mesh("v 0 0 0\nv 1 0 0\n# c\nv 0 x 0\nf 1 2 3\n", MeshFormat::obj);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_EQ(std::string(e.what()).rfind("line 4:", 0), 0u);
  }
}

TEST(Load, ObjIndexForms) {
  const MeshBuffer m =
      load_mesh("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvt 0 0\nf 1/1 2/1/1 -2//1 -1\n", MeshFormat::obj);
  ASSERT_EQ(m.triangle_count(), 2u);
  EXPECT_EQ(m.triangles[0], (Triangle{0, 1, 2}));
  EXPECT_EQ(m.triangles[1], (Triangle{0, 2, 3}));
}

TEST(Load, PlyAscii) {
  const std::string ply =
      "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\n"
      "element face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
  const MeshBuffer m = load_mesh(ply, MeshFormat::ply);
  EXPECT_EQ(m.vertex_count(), 3u);
  EXPECT_EQ(m.triangles[0], (Triangle{0, 1, 2}));
}

TEST(Load, PlyBinaryLittleEndian) {
  std::string ply =
      "ply\nformat binary_little_endian 1.0\nelement vertex 4\nproperty float x\nproperty float y\n"
      "property float z\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n";
  const float v[12] = {0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0};
  ply.append(reinterpret_cast<const char*>(v), sizeof v);
  ply.push_back(static_cast<char>(4));
  const std::int32_t idx[4] = {0, 1, 2, 3};
  ply.append(reinterpret_cast<const char*>(idx), sizeof idx);
  const MeshBuffer m = load_mesh(ply, MeshFormat::ply);
  EXPECT_EQ(m.vertex_count(), 4u);
  EXPECT_EQ(m.triangle_count(), 2u);
  EXPECT_EQ(m.positions[2], Vec3(1, 1, 0));
}

TEST(Load, PlyTruncated) {
  EXPECT_THROW(load_mesh("ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\n"
                         "property float z\nend_header\n0 0 0\n1 0\n",
                         MeshFormat::ply),
               ParseError);
}

TEST(Load, NonManifoldEdgeNamed) {
  const std::string obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 -1 0\nv 0 0 1\nf 1 2 3\nf 2 1 4\nf 1 2 5\n";
  const std::string msg = error_text<GeometryError>(obj);
  EXPECT_NE(msg.find("non-manifold"), std::string::npos) << msg;
  EXPECT_NE(msg.find("edge 0 (0,1)"), std::string::npos) << msg;
}

TEST(Load, EmptyMesh) {
  EXPECT_THROW(load_mesh("", MeshFormat::obj), GeometryError);
  EXPECT_THROW(load_mesh("v 0 0 0\n", MeshFormat::obj), GeometryError);
}

TEST(Load, DegenerateTriangle) {
  EXPECT_THROW(load_mesh("v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n", MeshFormat::obj), GeometryError);
  EXPECT_THROW(load_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 2\n", MeshFormat::obj), GeometryError);
}

TEST(Load, InconsistentOrientation) {
  const std::string obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3\nf 2 3 4\n";
  EXPECT_NE(error_text<GeometryError>(obj).find("inconsistent orientation"), std::string::npos);
}

TEST(Load, RoundTripBitIdentical) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MeshBuffer m = shapes::icosphere(2);
  for (auto& p : m.positions) p += Vec3(u(rng), u(rng), u(rng)) * 1e-3;
  const MeshBuffer back = load_mesh(write_obj(m), MeshFormat::obj);
  ASSERT_EQ(back.vertex_count(), m.vertex_count());
  for (std::size_t i = 0; i < m.vertex_count(); ++i)
    EXPECT_EQ(std::memcmp(&back.positions[i], &m.positions[i], sizeof(Vec3)), 0);
  EXPECT_EQ(back.triangles, m.triangles);
}

TEST(Adjacency, SingleTriangle) {
  const Adjacency adj = build_adjacency(load_mesh(kTriangleObj, MeshFormat::obj));
  EXPECT_EQ(adj.edges.size(), 3u);
  for (int v = 0; v < 3; ++v) EXPECT_EQ(adj.neighbors[v].size(), 2u);
  for (int e = 0; e < 3; ++e) EXPECT_TRUE(adj.is_boundary_edge(e));
}

TEST(Adjacency, IcosahedronValence) {
  const Adjacency adj = build_adjacency(shapes::icosahedron());
  for (const auto& n : adj.neighbors) EXPECT_EQ(n.size(), 5u);
  for (std::size_t e = 0; e < adj.edges.size(); ++e) EXPECT_FALSE(adj.is_boundary_edge(static_cast<int>(e)));
}

TEST(Adjacency, SharedEdge) {
  const MeshBuffer m = load_mesh("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3\nf 2 4 3\n", MeshFormat::obj);
  const Adjacency adj = build_adjacency(m);
  const int e = adj.edge_id(1, 2);
  ASSERT_GE(e, 0);
  EXPECT_EQ(adj.edge_triangles[e][0], 0);
  EXPECT_EQ(adj.edge_triangles[e][1], 1);
  EXPECT_EQ(adj.edges.size(), 5u);
}

TEST(Adjacency, NeighborsMatchEdgesSorted) {
  const MeshBuffer m = shapes::icosphere(2);
  const Adjacency adj = build_adjacency(m);
  std::size_t total = 0;
  for (std::size_t i = 0; i < adj.neighbors.size(); ++i) {
    EXPECT_TRUE(std::is_sorted(adj.neighbors[i].begin(), adj.neighbors[i].end()));
    for (int j : adj.neighbors[i]) EXPECT_GE(adj.edge_id(static_cast<int>(i), j), 0);
    total += adj.neighbors[i].size();
  }
  EXPECT_EQ(total, 2 * adj.edges.size());
}

TEST(Adjacency, ClosedMeshOppositeTraversal) {
  const MeshBuffer m = shapes::icosphere(2);
  const Adjacency adj = build_adjacency(m);
  for (std::size_t e = 0; e < adj.edges.size(); ++e) {
    const auto [t0, t1] = adj.edge_triangles[e];
    ASSERT_GE(t1, 0);
    auto dir = [&](int t) {
      const auto& tri = m.triangles[t];
      for (int k = 0; k < 3; ++k)
        if (tri[k] == adj.edges[e].a && tri[(k + 1) % 3] == adj.edges[e].b) return 1;
      return -1;
    };
    EXPECT_EQ(dir(t0) * dir(t1), -1);
  }
}

TEST(Normals, PlanarFan) {
  const MeshBuffer m = shapes::irregular_star();
  const NormalField nf = vertex_normals(m, build_adjacency(m));
  for (const auto& n : nf.vertex) EXPECT_LT(distance(n, Vec3(0, 0, 1)), 1e-12);
  for (const auto& n : nf.face) EXPECT_LT(distance(n, Vec3(0, 0, 1)), 1e-12);
}

TEST(Normals, IcosphereRadial) {
  const MeshBuffer m = shapes::icosphere(3);
  const NormalField nf = vertex_normals(m, build_adjacency(m));
  for (std::size_t i = 0; i < m.vertex_count(); ++i) {
    EXPECT_GT(dot(nf.vertex[i], normalized(m.positions[i])), 0.999);
    EXPECT_NEAR(norm(nf.vertex[i]), 1.0, 1e-9);
  }
}

TEST(Normals, MaxWeightsExactOnSphere) {
  const MeshBuffer m = shapes::icosphere(3);
  const NormalField nf = vertex_normals(m, build_adjacency(m), NormalWeighting::max);
  for (std::size_t i = 0; i < m.vertex_count(); ++i)
    EXPECT_NEAR(dot(nf.vertex[i], normalized(m.positions[i])), 1.0, 1e-12);
}

TEST(Normals, FlippedNegates) {
  const MeshBuffer m = shapes::icosphere(2);
  const NormalField a = vertex_normals(m, build_adjacency(m));
  const MeshBuffer f = flipped(m);
  const NormalField b = vertex_normals(f, build_adjacency(f));
  for (std::size_t i = 0; i < a.vertex.size(); ++i) EXPECT_LT(norm(a.vertex[i] + b.vertex[i]), 1e-12);
  for (std::size_t t = 0; t < a.face.size(); ++t) EXPECT_LT(norm(a.face[t] + b.face[t]), 1e-12);
}

TEST(Normals, ReindexingInvariance) {
  const MeshBuffer m = shapes::rounded_box(1.0, 0.3, 3, 3);
  std::vector<int> perm(m.vertex_count());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937(11));
  MeshBuffer p;
  p.positions.resize(m.vertex_count());
  for (std::size_t i = 0; i < perm.size(); ++i) p.positions[perm[i]] = m.positions[i];
  for (const auto& t : m.triangles) p.triangles.push_back({perm[t[0]], perm[t[1]], perm[t[2]]});
  const NormalField a = vertex_normals(m, build_adjacency(m));
  const NormalField b = vertex_normals(p, build_adjacency(p));
  for (std::size_t i = 0; i < perm.size(); ++i) EXPECT_LT(distance(a.vertex[i], b.vertex[perm[i]]), 1e-12);
}

TEST(Normals, IsolatedVertex) {
  MeshBuffer m = load_mesh(kTriangleObj, MeshFormat::obj);
  m.positions.push_back(Vec3(5, 5, 5));
  EXPECT_THROW(vertex_normals(m, build_adjacency(m)), GeometryError);
}

TEST(Normals, FaceFollowsOrientation) {
  const MeshBuffer m = load_mesh(kTriangleObj, MeshFormat::obj);
  EXPECT_EQ(face_normals(m)[0], Vec3(0, 0, 1));
  EXPECT_EQ(face_normals(flipped(m))[0], Vec3(0, 0, -1));
}
