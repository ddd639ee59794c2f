#pragma once

// load -> smooth -> differentials -> extract -> filter, with a per-stage
// report. Differentials are computed only when a selected method needs them.

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "ddg.hpp"
#include "features.hpp"
#include "laplace.hpp"
#include "lineset_io.hpp"
#include "mesh_io.hpp"
#include "oracle.hpp"
#include "shapes.hpp"
#include "smoothing.hpp"
#include "svg.hpp"

namespace meshlines {

struct StageReport {
  std::string name;
  double ms = 0.0;
  std::string detail;
};

struct RunReport {
  std::vector<StageReport> stages;
  std::vector<std::string> warnings;
  std::vector<std::string> notes;

  std::vector<std::string> stage_names() const {
    std::vector<std::string> n;
    for (const auto& s : stages) n.push_back(s.name);
    return n;
  }

  /// Timings are left out unless asked for, so the JSON stays reproducible.
  nlohmann::ordered_json to_json(bool timings = false) const {
    nlohmann::ordered_json j;
    j["stages"] = nlohmann::ordered_json::array();
    for (const auto& s : stages) {
      nlohmann::ordered_json e{{"name", s.name}};
      if (!s.detail.empty()) e["detail"] = s.detail;
      if (timings) e["ms"] = round9(s.ms);
      j["stages"].push_back(e);
    }
    j["warnings"] = warnings;
    j["notes"] = notes;
    return j;
  }
};

struct ExtractResult {
  MeshBuffer mesh;  // as loaded (before any smoothing)
  std::vector<LineSet> sets;
  RunReport report;
};

/// Re-raises `e` with the stage name prefixed, keeping its kind.
[[noreturn]] inline void rethrow_in_stage(const Error& e, const std::string& stage) {
  const std::string msg = "stage " + stage + ": " + e.what();
  switch (e.kind()) {
    case ErrorKind::parse: throw ParseError(msg);
    case ErrorKind::geometry: throw GeometryError(msg);
    case ErrorKind::numeric: throw NumericError(msg);
  }
  throw NumericError(msg);
}

/// Mesh sources: a file path, "oracle:<surface spec>" (see parse_surface_spec)
/// or "shape:<name>[:n]" with names icosphere, cube, subdivided-cube,
/// rounded-box, grid.
inline MeshBuffer load_input(const std::string& path, std::optional<MeshFormat> format = std::nullopt) {
  if (path.empty()) throw ParseError("no input mesh given");
  if (path.rfind("oracle:", 0) == 0) {
    const auto spec = oracle::parse_surface_spec(path.substr(7));
    return oracle::tessellate(spec.surface, spec.nu, spec.nv).mesh;
  }
  if (path.rfind("shape:", 0) == 0) {
    std::string name = path.substr(6);
    int n = -1;
    if (const auto c = name.find(':'); c != std::string::npos) {
      n = static_cast<int>(detail::parse_number(name.substr(c + 1), "shape resolution"));
      name = name.substr(0, c);
    }
    if (name == "icosphere") return shapes::icosphere(n < 0 ? 3 : n);
    if (name == "cube") return shapes::cube(2.0);
    if (name == "subdivided-cube") return shapes::subdivided_cube(n < 0 ? 8 : n, 2.0);
    if (name == "rounded-box") return shapes::rounded_box(1.0, 0.25, n < 0 ? 12 : n, n < 0 ? 6 : std::max(2, n / 2));
    if (name == "grid") return shapes::square_grid(n < 0 ? 16 : n, 2.0);
    throw ParseError("unknown shape '" + name + "'");
  }
  return load_mesh(read_file(path), format ? *format : format_from_path(path));
}

// ---------------------------------------------------------------------------
// Method options from specs

inline Threshold threshold_of(const MethodSpec& m, const std::string& key, double fallback) {
  return Threshold{m.number(key, m.number("tau", fallback)), m.flag("abs")};
}

inline RidgeValleyOptions rv_options(const MethodSpec& m) {
  RidgeValleyOptions o;
  o.ridge = threshold_of(m, "ridge", o.ridge.value);
  o.valley = threshold_of(m, "valley", o.valley.value);
  return o;
}

inline SuggestiveOptions sc_options(const MethodSpec& m) {
  SuggestiveOptions o;
  o.low = threshold_of(m, "low", o.low.value);
  o.high = Threshold{m.number("high", std::max(o.high.value, o.low.value)), m.flag("abs")};
  o.illumination = m.word("variant", "curvature") == "light";
  return o;
}

inline ApparentOptions ar_options(const MethodSpec& m) { return {threshold_of(m, "tau", ApparentOptions{}.tau.value)}; }
inline PhoticOptions pel_options(const MethodSpec& m) { return {threshold_of(m, "tau", PhoticOptions{}.tau.value)}; }
inline LaplacianLineOptions ll_options(const MethodSpec& m) {
  return {threshold_of(m, "tau", LaplacianLineOptions{}.tau.value)};
}
inline DemarcatingOptions dc_options(const MethodSpec& m) {
  DemarcatingOptions o;
  o.tau = threshold_of(m, "tau", o.tau.value);
  o.keep_above = m.word("keep", "above") == "above";
  return o;
}

/// Smoothing applied with --smooth-presets: normal smoothing for the
/// normal-driven methods, anti-shrink geometry smoothing for the
/// curvature-tensor ones, nothing for creases.
inline std::vector<SmoothingConfig> preset_smoothing(const std::string& method) {
  if (method == "pel" || method == "ll" || method == "contour" || method == "sc")
    return {SmoothingConfig{SmoothTarget::normals, 3, 0.5, std::nullopt}};
  if (method == "rv" || method == "ar" || method == "dc")
    return {SmoothingConfig{SmoothTarget::geometry, 10, 0.33, -0.34}};
  return {};
}

// ---------------------------------------------------------------------------
// Pipeline

namespace detail {

/// Lazily computed differentials for one smoothing variant of the mesh.
struct Variant {
  std::string suffix;
  std::vector<SmoothingConfig> steps;
  std::optional<MeshGeometry> geometry;
  std::optional<CurvatureField> curvature;
  std::optional<CurvatureDerivative> derivative;
  std::optional<ViewContext> view;
  std::optional<SparseLaplacian> laplacian;
};

class Runner {
 public:
  Runner(const PipelineConfig& cfg, RunReport& report) : cfg_(cfg), report_(report) {}

  template <class F>
  auto stage(const std::string& name, F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto finish = [&] {
      const auto t1 = std::chrono::steady_clock::now();
      report_.stages.push_back({name, std::chrono::duration<double, std::milli>(t1 - t0).count(), {}});
    };
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        finish();
      } else {
        auto r = fn();
        finish();
        return r;
      }
    } catch (const Error& e) {
      rethrow_in_stage(e, name);
    }
  }

  MeshGeometry& geometry(Variant& v) {
    if (!v.geometry) {
      MeshBuffer m = base_;
      bool smoothed = false;
      for (const auto& s : v.steps)
        if (s.target == SmoothTarget::geometry && s.iterations > 0) smoothed = true;
      if (smoothed) {
        m = stage("smooth-geometry" + v.suffix, [&] {
          const Adjacency adj = build_adjacency(m);
          MeshBuffer out = m;
          for (const auto& s : v.steps)
            if (s.target == SmoothTarget::geometry) out = smooth_mesh(out, adj, s);
          return out;
        });
      }
      v.geometry = stage("normals" + v.suffix, [&] {
        MeshGeometry g = make_geometry(m, nullptr, &diag_);
        bool normal_steps = false;
        for (const auto& s : v.steps) normal_steps |= s.target == SmoothTarget::normals && s.iterations > 0;
        if (!normal_steps) return g;
        std::vector<Vec3> n = g.normals.vertex;
        for (const auto& s : v.steps)
          if (s.target == SmoothTarget::normals) n = smooth_normals(g.adj, n, s);
        return make_geometry(std::move(m), &n, &diag_);
      });
    }
    return *v.geometry;
  }

  CurvatureField& curvature(Variant& v) {
    MeshGeometry& g = geometry(v);
    if (!v.curvature) v.curvature = stage("curvature" + v.suffix, [&] { return vertex_shape_operators(g, &diag_); });
    return *v.curvature;
  }

  CurvatureDerivative& derivative(Variant& v) {
    CurvatureField& cf = curvature(v);
    if (!v.derivative)
      v.derivative = stage("derivative" + v.suffix, [&] { return curvature_derivative(*v.geometry, cf); });
    return *v.derivative;
  }

  ViewContext& view(Variant& v) {
    MeshGeometry& g = geometry(v);
    if (!v.view) {
      v.view = stage("view" + v.suffix, [&] {
        ViewContext ctx = view_context(g, cfg_.camera, LightRig{cfg_.lights});
        for (const auto& s : v.steps)
          if (s.target == SmoothTarget::scalar_field) ctx.f = smooth_scalar_field(g.adj, ctx.f, s);
        return ctx;
      });
    }
    return *v.view;
  }

  SparseLaplacian& laplacian(Variant& v) {
    MeshGeometry& g = geometry(v);
    if (!v.laplacian)
      v.laplacian = stage("laplacian" + v.suffix, [&] {
        return build_laplacian(g.mesh, g.adj, cfg_.laplacian.scheme, cfg_.laplacian.options);
      });
    return *v.laplacian;
  }

  LineSet run_method(const MethodSpec& m, Variant& v) {
    // Differentials first so that their stages precede the method's own.
    if (m.name == "rv" || m.name == "sc" || m.name == "ar") curvature(v);
    if (m.name == "dc") derivative(v);
    if (is_view_dependent(m.name)) view(v);
    if (m.name == "ll") laplacian(v);
    MeshGeometry& g = geometry(v);
    return stage(m.name, [&]() -> LineSet {
      if (m.name == "contour")
        return contours(g, *v.view, cfg_.camera, m.word("mode", "smooth") == "edge" ? ContourMode::edge : ContourMode::smooth);
      if (m.name == "crease") return crease_lines(g, m.number("angle", 30.0));
      if (m.name == "rv") return ridges_valleys(g, *v.curvature, rv_options(m), &diag_);
      if (m.name == "sc") return suggestive_contours(g, *v.curvature, *v.view, sc_options(m), &diag_);
      if (m.name == "ar") return apparent_ridges(g, *v.curvature, *v.view, cfg_.camera, ar_options(m), &diag_);
      if (m.name == "pel") return photic_extremum_lines(g, *v.view, pel_options(m), &diag_);
      if (m.name == "dc") return demarcating_curves(g, *v.curvature, *v.derivative, dc_options(m), &diag_);
      if (m.name == "ll") return laplacian_lines(g, *v.laplacian, *v.view, ll_options(m), &diag_);
      throw ParseError("unknown method '" + m.name + "'");
    });
  }

  ExtractResult run() {
    cfg_.validate();
    ExtractResult res;
    base_ = stage("load", [&] { return load_input(cfg_.input, cfg_.format); });
    res.mesh = base_;
    const bool any_smoothing = !cfg_.smoothing.empty() || cfg_.smoothing_presets;
    for (const auto& m : cfg_.methods) {
      if (!any_smoothing && (m.name == "rv" || m.name == "dc"))
        report_.warnings.push_back(m.name + " uses third-order derivatives and is very susceptible to noise; "
                                            "consider smoothing the input");
      Variant& v = variant_for(m.name);
      res.sets.push_back(run_method(m, v));
    }
    report_.notes = diag_.notes;
    return res;
  }

 private:
  Variant& variant_for(const std::string& method) {
    std::string key = "user";
    std::vector<SmoothingConfig> steps = cfg_.smoothing;
    if (cfg_.smoothing_presets) {
      const auto p = preset_smoothing(method);
      if (!p.empty()) {
        key = p.front().target == SmoothTarget::normals ? "normal-preset" : "geometry-preset";
        steps.insert(steps.end(), p.begin(), p.end());
      }
    }
    auto it = variants_.find(key);
    if (it == variants_.end()) {
      auto v = std::make_unique<Variant>();
      v->suffix = key == "user" ? "" : "[" + key + "]";
      v->steps = std::move(steps);
      it = variants_.emplace(key, std::move(v)).first;
    }
    return *it->second;
  }

  const PipelineConfig& cfg_;
  RunReport& report_;
  MeshBuffer base_;
  Diagnostics diag_;
  std::map<std::string, std::unique_ptr<Variant>> variants_;
};

}  // namespace detail

inline ExtractResult run_extract(const PipelineConfig& cfg) {
  RunReport report;
  detail::Runner runner(cfg, report);
  ExtractResult r = runner.run();
  r.report = std::move(report);
  return r;
}

inline SvgOptions svg_options(const PipelineConfig& cfg) {
  SvgOptions o;
  o.sample_factor = cfg.svg_sample;
  o.shaded_underlay = cfg.svg_underlay;
  return o;
}

/// JSON document for an extraction: input, camera, line sets and the
/// run report without timings.
inline std::string extract_json(const PipelineConfig& cfg, const ExtractResult& r) {
  nlohmann::ordered_json extra;
  extra["input"] = cfg.input;
  extra["camera"] = camera_text(cfg.camera);
  extra["report"] = r.report.to_json(false);
  return linesets_json(r.sets, extra);
}

/// All eight methods with the configured camera and thresholds (per-method
/// specs in `cfg.methods` override the defaults).
inline PipelineConfig compare_config(PipelineConfig cfg) {
  std::vector<MethodSpec> all;
  for (const auto& name : method_names()) {
    MethodSpec m{name, {}};
    for (const auto& given : cfg.methods)
      if (given.name == name) m = given;
    all.push_back(m);
  }
  cfg.methods = std::move(all);
  return cfg;
}

// ---------------------------------------------------------------------------
// Inspection

inline nlohmann::ordered_json summary_stats(std::vector<double> v) {
  nlohmann::ordered_json j;
  if (v.empty()) return j;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const double median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  j["min"] = round9(v.front());
  j["median"] = round9(median);
  j["max"] = round9(v.back());
  return j;
}

inline nlohmann::ordered_json property_json(const PropertyCheck& p) {
  nlohmann::ordered_json j;
  j["holds"] = p.holds;
  j["skipped"] = p.skipped;
  j["witness"] = p.witness;
  return j;
}

/// what: "curvature", "laplacian-properties" or "areas".
inline nlohmann::ordered_json inspect(const MeshBuffer& mesh, const std::string& what,
                                      const LaplacianChoice& lap = {}) {
  nlohmann::ordered_json j;
  j["what"] = what;
  j["vertices"] = mesh.positions.size();
  j["triangles"] = mesh.triangles.size();
  if (what == "curvature") {
    Diagnostics diag;
    const MeshGeometry g = make_geometry(mesh, nullptr, &diag);
    const CurvatureField cf = vertex_shape_operators(g, &diag);
    j["kappa1"] = summary_stats(cf.kappa1);
    j["kappa2"] = summary_stats(cf.kappa2);
    j["rank_deficient_triangles"] = cf.rank_deficient_triangles;
    j["dropped_corners"] = g.dropped_corners;
    j["notes"] = diag.notes;
  } else if (what == "laplacian-properties") {
    const Adjacency adj = build_adjacency(mesh);
    const SparseLaplacian L = build_laplacian(mesh, adj, lap.scheme, lap.options);
    const PropertyReport r = check_properties(L, mesh, adj);
    j["scheme"] = scheme_name(lap.scheme);
    j["Sym"] = property_json(r.sym);
    j["Loc"] = property_json(r.loc);
    j["Pos"] = property_json(r.pos);
    j["Lin"] = property_json(r.lin);
    std::vector<std::string> notes = L.notes;
    notes.insert(notes.end(), r.notes.begin(), r.notes.end());
    j["notes"] = notes;
  } else if (what == "areas") {
    const MeshGeometry g = make_geometry(mesh);
    double tri = 0.0, vor = 0.0;
    for (const auto& t : mesh.triangles) tri += triangle_area(mesh, t);
    for (double a : g.vertex_area) vor += a;
    j["triangle_area_total"] = round9(tri);
    j["voronoi_area_total"] = round9(vor);
    j["relative_difference"] = round9(tri > 0 ? std::abs(vor - tri) / tri : 0.0);
  } else {
    throw ParseError("unknown inspection '" + what + "' (curvature, laplacian-properties, areas)");
  }
  return j;
}

}  // namespace meshlines
