#include <gtest/gtest.h>

#include <fstream>
#include <regex>

#include "test_support.hpp"

using namespace meshlines;
using testing_support::run_cli;
using testing_support::slurp;
using testing_support::temp_path;

namespace {

Camera ortho(const Vec3& eye, const Vec3& up = {0, 1, 0}) {
  Camera c;
  c.eye = eye;
  c.up = up;
  c.projection = Projection::orthographic;
  return c;
}

void write(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

// Brute-force ray/triangle test, no acceleration structure.
bool ray_hits(const MeshBuffer& m, const Vec3& o, const Vec3& d) {
  for (const auto& t : m.triangles) {
    const Vec3 a = m.positions[t[0]], e1 = m.positions[t[1]] - a, e2 = m.positions[t[2]] - a;
    const Vec3 p = cross(d, e2);
    const double det = dot(e1, p);
    if (std::abs(det) < 1e-14) continue;
    const Vec3 s = o - a;
    const double u = dot(s, p) / det;
    if (u < 0 || u > 1) continue;
    const Vec3 q = cross(s, e1);
    const double v = dot(d, q) / det;
    if (v < 0 || u + v > 1) continue;
    if (dot(e2, q) / det > 1e-12) return true;
  }
  return false;
}

PipelineConfig sphere_contour_config() {
  PipelineConfig c;
  c.input = "shape:icosphere:3";
  c.methods = {parse_method_spec("contour")};
  c.camera = ortho({0.3, 0.2, 5});
  return c;
}

std::size_t count(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
  return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

TEST(Config, RoundTripsThroughText) {
  PipelineConfig c;
  c.input = "mesh dir/model.ply";
  c.format = MeshFormat::ply;
  c.smoothing = {parse_smoothing("target=geometry,iters=4,lambda=0.33,mu=-0.34"),
                 parse_smoothing("target=normals,iters=2,lambda=0.5")};
  c.smoothing_presets = true;
  c.methods = {parse_method_spec("rv:ridge=0.1,valley=0.2"), parse_method_spec("sc:low=0.01,high=0.3"),
               parse_method_spec("crease:angle=45"), parse_method_spec("dc:keep=below")};
  c.camera = parse_camera("eye=0.1,0.2,7.3,look=0,0,0.5,up=0,0,1,proj=ortho,fov=40");
  c.lights = {parse_light("headlight"), parse_light("directional,dir=1,2,3,intensity=0.3"),
              parse_light("point,pos=0,4,0")};
  c.laplacian = parse_laplacian_choice("scheme=belkin,h=0.037,exact=1");
  c.out_json = "a.json";
  c.out_svg = "b.svg";
  c.svg_sample = 0.25;
  c.svg_underlay = true;
  const std::string text = config_text(c);
  const PipelineConfig back = parse_config(text);
  EXPECT_TRUE(same_config(c, back));
  EXPECT_EQ(config_text(back), text);
}

TEST(Config, AwkwardNumbersSurvive) {
  PipelineConfig c = sphere_contour_config();
  c.camera.eye = {0.1 + 0.2, 1.0 / 3.0, 5e-7 + 5};
  c.lights = {Light{LightKind::directional, {1e-300, 2, M_PI}, 0.1}};
  EXPECT_TRUE(same_config(c, parse_config(config_text(c))));
}

TEST(Config, EmptyMethodListRejected) {
  PipelineConfig c = sphere_contour_config();
  c.methods.clear();
  EXPECT_THROW(c.validate(), ParseError);
  EXPECT_THROW(run_extract(c), ParseError);
}

TEST(Config, BadValuesRejected) {
  EXPECT_THROW(parse_method_spec("rv:tau=-1"), ParseError);
  EXPECT_THROW(parse_method_spec("sc:low=0.5,high=0.1"), ParseError);
  EXPECT_THROW(parse_method_spec("crease:angle=200"), ParseError);
  EXPECT_THROW(parse_method_spec("contour:speed=3"), ParseError);
  EXPECT_THROW(parse_method_spec("sketch"), ParseError);
  EXPECT_THROW(parse_camera("eye=0,0,0,look=0,0,0"), ParseError);
  EXPECT_THROW(parse_light("directional"), ParseError);
  EXPECT_THROW(parse_laplacian_choice("scheme=belkin,h=-2"), ParseError);
  EXPECT_THROW(parse_config("[methods]\nmethod = pel\n[bogus]\nx = 1\n"), ParseError);
  try {
    parse_config("[input]\npath = a.obj\n\n[methods]\nmethod = rv:tau=abc\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
  }
}

TEST(Config, GreekTauAccepted) {
  EXPECT_EQ(parse_method_spec("pel:\xcf\x84=0.3").number("tau", 0), 0.3);
}

// ---------------------------------------------------------------------------
// Pipeline

TEST(Pipeline, SphereContourStages) {
  const auto r = run_extract(sphere_contour_config());
  ASSERT_EQ(r.sets.size(), 1u);
  EXPECT_EQ(r.sets[0].polylines.size(), 1u);
  EXPECT_EQ(r.report.stage_names(), (std::vector<std::string>{"load", "normals", "view", "contour"}));
  EXPECT_TRUE(r.report.warnings.empty());
}

TEST(Pipeline, OnlyNeededDifferentials) {
  PipelineConfig c = sphere_contour_config();
  c.methods = {parse_method_spec("crease"), parse_method_spec("dc"), parse_method_spec("ll")};
  const auto names = run_extract(c).report.stage_names();
  EXPECT_EQ(names, (std::vector<std::string>{"load", "normals", "crease", "curvature", "derivative", "dc", "view",
                                             "laplacian", "ll"}));
}

TEST(Pipeline, NoisyMeshRidgeWarning) {
  MeshBuffer m = shapes::icosphere(3);
  std::mt19937 rng(2);
  std::normal_distribution<double> nd(0.0, 0.01);
  for (auto& p : m.positions) p += Vec3{nd(rng), nd(rng), nd(rng)};
  const std::string path = temp_path("noisy.obj");
  write(path, write_obj(m));
  PipelineConfig c = sphere_contour_config();
  c.input = path;
  c.methods = {parse_method_spec("rv")};
  const auto r = run_extract(c);
  ASSERT_EQ(r.report.warnings.size(), 1u);
  EXPECT_NE(r.report.warnings[0].find("very susceptible to noise"), std::string::npos);
  c.smoothing = {parse_smoothing("target=geometry,iters=5,lambda=0.33,mu=-0.34")};
  const auto s = run_extract(c);
  EXPECT_TRUE(s.report.warnings.empty());
  EXPECT_EQ(s.report.stage_names().at(1), "smooth-geometry");
}

TEST(Pipeline, StageNameOnErrors) {
  PipelineConfig c = sphere_contour_config();
  c.input = temp_path("missing.obj");
  try {
    run_extract(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("stage load"), std::string::npos);
  }
}

TEST(Pipeline, PresetsUseSeparateVariants) {
  PipelineConfig c = sphere_contour_config();
  c.smoothing_presets = true;
  c.methods = {parse_method_spec("contour"), parse_method_spec("rv"), parse_method_spec("crease")};
  const auto names = run_extract(c).report.stage_names();
  EXPECT_NE(std::find(names.begin(), names.end(), "smooth-geometry[geometry-preset]"), names.end());
  EXPECT_NE(std::find(names.begin(), names.end(), "normals[normal-preset]"), names.end());
  EXPECT_NE(std::find(names.begin(), names.end(), "normals"), names.end());
}

TEST(Pipeline, ScalarFieldSmoothingTouchesIllumination) {
  PipelineConfig c = sphere_contour_config();
  c.methods = {parse_method_spec("pel:tau=0,abs=1")};
  c.camera = ortho({2, 1, 4});
  const auto a = run_extract(c);
  c.smoothing = {parse_smoothing("target=scalar-field,iters=3,lambda=0.5")};
  const auto b = run_extract(c);
  EXPECT_NE(linesets_json(a.sets), linesets_json(b.sets));
}

TEST(Pipeline, JsonIsDeterministic) {
  PipelineConfig c = sphere_contour_config();
  c.input = "oracle:torus:nu=48,nv=24";
  c.methods = {parse_method_spec("contour"), parse_method_spec("sc"), parse_method_spec("ar")};
  c.camera = ortho({0, -4, 3}, {0, 0, 1});
  EXPECT_EQ(extract_json(c, run_extract(c)), extract_json(c, run_extract(c)));
}

TEST(Pipeline, JsonRoundTripsLineSets) {
  const auto r = run_extract(sphere_contour_config());
  const auto j = nlohmann::ordered_json::parse(linesets_json(r.sets));
  const LineSet back = lineset_from_json(j["linesets"][0]);
  ASSERT_EQ(back.polylines.size(), r.sets[0].polylines.size());
  EXPECT_EQ(linesets_json({back}), linesets_json(r.sets));
  EXPECT_THROW(lineset_from_json(nlohmann::ordered_json::parse("{\"method\": 1}")), ParseError);
}

TEST(Pipeline, ObjExport) {
  const auto r = run_extract(sphere_contour_config());
  const std::string obj = linesets_obj(r.sets);
  EXPECT_EQ(obj.rfind("g contour\n", 0), 0u);
  std::size_t pts = 0;
  for (const auto& pl : r.sets[0].polylines) pts += pl.points.size();
  EXPECT_EQ(count(obj, "\nv "), pts);
  EXPECT_EQ(count(obj, "\nl "), 1u);
}

// ---------------------------------------------------------------------------
// SVG

TEST(Svg, SphereContourFullyVisible) {
  const auto c = sphere_contour_config();
  const auto r = run_extract(c);
  const auto layers = project_layers(r.mesh, r.sets, c.camera, SvgOptions{});
  ASSERT_EQ(layers.size(), 1u);
  ASSERT_EQ(layers[0].paths.size(), 1u);
  double len = 0;
  const auto& p = layers[0].paths[0];
  for (std::size_t i = 0; i + 1 < p.size(); ++i) len += std::hypot(p[i + 1].x - p[i].x, p[i + 1].y - p[i].y);
  double want = 0;
  const auto& q = r.sets[0].polylines[0].points;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Vec2 a = c.camera.project(q[i].xyz), b = c.camera.project(q[(i + 1) % q.size()].xyz);
    want += std::hypot(b.x - a.x, b.y - a.y);
  }
  EXPECT_NEAR(len, want, 1e-9);
}

TEST(Svg, CubeCornerViewShowsNineEdges) {
  const MeshBuffer m = shapes::subdivided_cube(4, 2.0);
  const auto g = make_geometry(m);
  const auto creases = crease_lines(g, 30.0);
  ASSERT_EQ(creases.polylines.size(), 12u);
  const Camera cam = ortho({3.1, 2.3, 4.2});
  // Exact visibility: an edge is visible iff one of its faces faces the camera.
  const Vec3 v = -cam.direction();
  int expect_visible = 0;
  std::vector<bool> truth;
  for (const auto& pl : creases.polylines) {
    const Vec3 mid = (pl.points.front().xyz + pl.points.back().xyz) * 0.5;
    bool vis = false;
    for (int k = 0; k < 3; ++k) {
      if (std::abs(std::abs(mid[k]) - 1.0) > 1e-9) continue;
      const double side = mid[k] > 0 ? 1.0 : -1.0;
      vis |= side * v[k] > 0;
    }
    truth.push_back(vis);
    expect_visible += vis;
  }
  ASSERT_EQ(expect_visible, 9);
  const SvgOptions opt;
  VisibilityTester tester(m, cam, opt.offset_factor);
  const double piece = 0.5 * mean_edge_length(m, build_adjacency(m));
  for (std::size_t k = 0; k < creases.polylines.size(); ++k) {
    LineSet one;
    one.polylines = {creases.polylines[k]};
    double shown = 0;
    for (const auto& run : visible_runs(one, &tester, piece))
      for (std::size_t i = 0; i + 1 < run.size(); ++i) shown += distance(run[i], run[i + 1]);
    EXPECT_NEAR(shown, truth[k] ? 2.0 : 0.0, 1e-9) << "edge " << k;
  }
}

TEST(Svg, EmittedPiecesPassRayOracle) {
  PipelineConfig c;
  c.input = "oracle:torus:nu=48,nv=24";
  c.methods = {parse_method_spec("contour"), parse_method_spec("crease:angle=10")};
  c.camera = ortho({0, -4, 3}, {0, 0, 1});
  const auto r = run_extract(c);
  const SvgOptions opt;
  VisibilityTester tester(r.mesh, c.camera, opt.offset_factor);
  const double piece = 0.5 * mean_edge_length(r.mesh, build_adjacency(r.mesh));
  const Vec3 v = -c.camera.direction();
  std::size_t checked = 0, shown = 0;
  for (const auto& ls : r.sets)
    for (const auto& pl : ls.polylines)
      for (std::size_t i = 0; i + 1 < pl.points.size(); ++i) {
        const auto &qa = pl.points[i], &qb = pl.points[i + 1];
        const Vec3 mid = (qa.xyz + qb.xyz) * 0.5;
        const Vec3 n = normalized(tester.normal_at(qa) + tester.normal_at(qb));
        const bool brute = !ray_hits(r.mesh, tester.ray_origin(mid, n), v);
        EXPECT_EQ(tester.visible(mid, n), brute);
        shown += brute;
        ++checked;
      }
  std::size_t emitted = 0;
  for (const auto& ls : r.sets) emitted += visible_runs(ls, &tester, piece).size();
  EXPECT_GT(emitted, 0u);
  EXPECT_GT(shown, 50u);
  EXPECT_LT(shown, checked);
}

TEST(Svg, OneGroupPerMethod) {
  PipelineConfig c = sphere_contour_config();
  c.methods = {parse_method_spec("contour"), parse_method_spec("pel")};
  const auto r = run_extract(c);
  const std::string svg = render_svg(r.mesh, r.sets, c.camera);
  EXPECT_EQ(count(svg, "<g "), 2u);
  EXPECT_NE(svg.find("<g id=\"contour\""), std::string::npos);
  EXPECT_NE(svg.find("<g id=\"pel\""), std::string::npos);
}

TEST(Svg, CoordinatesInsideViewport) {
  const auto c = sphere_contour_config();
  const auto r = run_extract(c);
  SvgOptions opt;
  const std::string svg = render_svg(r.mesh, r.sets, c.camera, opt);
  const std::regex pts("points=\"([^\"]*)\"");
  std::size_t n = 0;
  for (std::sregex_iterator it(svg.begin(), svg.end(), pts), end; it != end; ++it) {
    std::istringstream in((*it)[1].str());
    std::string pair;
    while (in >> pair) {
      const auto comma = pair.find(',');
      const double x = std::stod(pair.substr(0, comma)), y = std::stod(pair.substr(comma + 1));
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, opt.width);
      EXPECT_GE(y, 0.0);
      EXPECT_LE(y, opt.height);
      ++n;
    }
  }
  EXPECT_GT(n, 10u);
}

TEST(Svg, GridHasEightCells) {
  PipelineConfig c = compare_config(sphere_contour_config());
  ASSERT_EQ(c.methods.size(), 8u);
  const auto r = run_extract(c);
  const std::string svg = render_svg_grid(r.mesh, r.sets, c.camera, 4);
  EXPECT_EQ(count(svg, "<g id=\"cell-"), 8u);
}

// ---------------------------------------------------------------------------
// Inspect

TEST(Inspect, SphereCurvatureMedian) {
  const auto j = inspect(shapes::icosphere(3), "curvature");
  const double med = j["kappa1"]["median"].get<double>();
  EXPECT_GE(med, 0.95);
  EXPECT_LE(med, 1.05);
}

TEST(Inspect, MeanValueSymFails) {
  const auto j = inspect(shapes::irregular_star(), "laplacian-properties", parse_laplacian_choice("scheme=mean-value"));
  EXPECT_FALSE(j["Sym"]["holds"].get<bool>());
  EXPECT_FALSE(j["Sym"]["witness"].get<std::string>().empty());
}

TEST(Inspect, AreasPartition) {
  const auto j = inspect(shapes::random_planar(20, 4), "areas");
  EXPECT_LT(j["relative_difference"].get<double>(), 1e-6);
  EXPECT_THROW(inspect(shapes::icosphere(1), "volume"), ParseError);
}

// ---------------------------------------------------------------------------
// Binary

TEST(Cli, ExtractWritesJson) {
  std::string out;
  ASSERT_EQ(run_cli("extract --in shape:icosphere:2 --method contour --camera eye=0.3,0.2,5,proj=ortho --out-json -",
                    &out),
            0);
  const auto j = nlohmann::ordered_json::parse(out);
  EXPECT_EQ(j["linesets"][0]["method"], "contour");
  EXPECT_EQ(j["linesets"][0]["polylines"].size(), 1u);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("extract --in shape:icosphere:1"), 2);
  EXPECT_EQ(run_cli("extract --in shape:icosphere:1 --method nope"), 2);
  EXPECT_EQ(run_cli("extract --bogus-flag"), 2);
  const std::string bad = temp_path("nonmanifold.obj");
  write(bad, "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nv 0 -1 0\nf 1 2 3\nf 2 1 4\nf 1 2 5\n");
  EXPECT_EQ(run_cli("extract --in " + bad + " --method crease"), 3);
  const std::string broken = temp_path("broken.obj");
  write(broken, "v 0 0 0\nv 1 0\n");
  EXPECT_EQ(run_cli("extract --in " + broken + " --method crease"), 2);
}

TEST(Cli, ConfigFileAndSave) {
  const std::string cfg = temp_path("saved.cfg");
  ASSERT_EQ(run_cli("extract --in shape:icosphere:2 --method contour --method crease:angle=20 --save-config " + cfg +
                    " --out-json " + temp_path("a.json")),
            0);
  const PipelineConfig c = parse_config(slurp(cfg));
  ASSERT_EQ(c.methods.size(), 2u);
  EXPECT_EQ(c.methods[1].text(), "crease:angle=20");
  std::string out;
  ASSERT_EQ(run_cli("extract --config " + cfg + " --out-json -", &out), 0);
  EXPECT_EQ(out, slurp(temp_path("a.json")));
}

TEST(Cli, InspectPrintsJson) {
  std::string out;
  ASSERT_EQ(run_cli("inspect --in shape:icosphere:3 --what curvature --what areas", &out), 0);
  const auto j = nlohmann::ordered_json::parse(out);
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[1]["what"], "areas");
}

TEST(Cli, RenderEmitsSvg) {
  std::string out;
  ASSERT_EQ(run_cli("render --in shape:cube --method crease --camera eye=3,2,4,proj=ortho", &out), 0);
  EXPECT_EQ(out.rfind("<svg", 0), 0u);
  EXPECT_EQ(count(out, "<g id=\"crease\""), 1u);
}
