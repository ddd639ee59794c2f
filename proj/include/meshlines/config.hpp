#pragma once

// Pipeline configuration and its plain-text file form:
//
//   # comment
//   [input]
//   path = bunny.obj
//   format = obj
//   [smoothing]
//   step = target=normals,iters=5,lambda=0.5
//   presets = false
//   [methods]
//   method = rv:tau=0.02
//   method = contour
//   [camera]
//   spec = eye=0,0,5,look=0,0,0,up=0,1,0,proj=persp,fov=30
//   [lights]
//   light = headlight,intensity=1
//   [laplacian]
//   spec = scheme=belkin
//   [output]
//   json = lines.json
//
// Keys inside [smoothing], [methods] and [lights] may repeat; order is kept.

#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "features.hpp"
#include "laplace.hpp"
#include "mesh_io.hpp"
#include "smoothing.hpp"

namespace meshlines {

inline const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"contour", "crease", "rv", "sc", "ar", "pel", "dc", "ll"};
  return names;
}

inline bool is_view_dependent(const std::string& m) {
  return m == "contour" || m == "sc" || m == "ar" || m == "pel" || m == "ll";
}

namespace detail {

inline std::string strip(const std::string& s) { return std::string(trim(s)); }

inline double parse_number(const std::string& s, const std::string& what) {
  double v = 0.0;
  const std::string t = strip(s);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc{} || r.ptr != t.data() + t.size())
    throw ParseError("bad number '" + s + "' for " + what);
  return v;
}

inline Vec3 parse_vec3(const std::string& s, const std::string& what) {
  std::vector<double> v;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto c = s.find(',', pos);
    if (c == std::string::npos) c = s.size();
    v.push_back(parse_number(s.substr(pos, c - pos), what));
    pos = c + 1;
  }
  if (v.size() != 3) throw ParseError(what + " needs three comma-separated numbers");
  return {v[0], v[1], v[2]};
}

inline std::string vec3_text(const Vec3& v) { return format_roundtrip(v.x) + "," + format_roundtrip(v.y) + "," + format_roundtrip(v.z); }

/// "k=a,b,c,k2=d" -> ordered (key, value) pairs; a token without '=' extends
/// the previous value, except a leading one, which gets the key "".
inline std::vector<std::pair<std::string, std::string>> key_runs(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto c = text.find(',', pos);
    if (c == std::string::npos) c = text.size();
    const std::string tok = strip(text.substr(pos, c - pos));
    pos = c + 1;
    if (tok.empty()) continue;
    const auto eq = tok.find('=');
    if (eq != std::string::npos) out.push_back({strip(tok.substr(0, eq)), strip(tok.substr(eq + 1))});
    else if (out.empty()) out.push_back({"", tok});
    else out.back().second += "," + tok;
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Camera / light / laplacian / method specs

inline Camera parse_camera(const std::string& text, Camera cam = {}) {
  for (const auto& [k, v] : detail::key_runs(text)) {
    if (k == "eye") cam.eye = detail::parse_vec3(v, "camera eye");
    else if (k == "look") cam.look = detail::parse_vec3(v, "camera look");
    else if (k == "up") cam.up = detail::parse_vec3(v, "camera up");
    else if (k == "fov") cam.fov_deg = detail::parse_number(v, "camera fov");
    else if (k == "proj" || k == "projection") {
      if (v == "ortho" || v == "orthographic") cam.projection = Projection::orthographic;
      else if (v == "persp" || v == "perspective") cam.projection = Projection::perspective;
      else throw ParseError("unknown projection '" + v + "'");
    } else throw ParseError("unknown camera option '" + k + "'");
  }
  cam.validate();
  return cam;
}

inline std::string camera_text(const Camera& c) {
  return "eye=" + detail::vec3_text(c.eye) + ",look=" + detail::vec3_text(c.look) + ",up=" + detail::vec3_text(c.up) +
         ",proj=" + (c.projection == Projection::orthographic ? "ortho" : "persp") + ",fov=" + format_roundtrip(c.fov_deg);
}

/// "headlight", "directional,dir=1,2,3,intensity=0.5", "point,pos=0,4,0".
inline Light parse_light(const std::string& text) {
  Light l;
  bool kind_set = false, vec_set = false;
  for (const auto& [k, v] : detail::key_runs(text)) {
    if (k.empty() || k == "type") {
      if (v == "headlight") l.kind = LightKind::headlight;
      else if (v == "directional" || v == "dir") l.kind = LightKind::directional;
      else if (v == "point") l.kind = LightKind::point;
      else throw ParseError("unknown light type '" + v + "'");
      kind_set = true;
    } else if (k == "dir" || k == "pos") {
      l.vec = detail::parse_vec3(v, "light " + k);
      vec_set = true;
    } else if (k == "intensity" || k == "i") {
      l.intensity = detail::parse_number(v, "light intensity");
    } else {
      throw ParseError("unknown light option '" + k + "'");
    }
  }
  if (!kind_set) throw ParseError("light spec needs a type");
  if (l.kind != LightKind::headlight && !vec_set) throw ParseError("light needs dir= or pos=");
  if (l.kind == LightKind::directional && norm(l.vec) == 0.0) throw ParseError("light direction is zero");
  if (!std::isfinite(l.intensity)) throw ParseError("light intensity must be finite");
  return l;
}

inline std::string light_text(const Light& l) {
  switch (l.kind) {
    case LightKind::headlight: return "headlight,intensity=" + format_roundtrip(l.intensity);
    case LightKind::directional:
      return "directional,dir=" + detail::vec3_text(l.vec) + ",intensity=" + format_roundtrip(l.intensity);
    case LightKind::point: return "point,pos=" + detail::vec3_text(l.vec) + ",intensity=" + format_roundtrip(l.intensity);
  }
  return "";
}

inline std::string smoothing_text(const SmoothingConfig& s) {
  std::string t = std::string("target=") + target_name(s.target) + ",iters=" + std::to_string(s.iterations) +
                  ",lambda=" + format_roundtrip(s.lambda);
  if (s.mu) t += ",mu=" + format_roundtrip(*s.mu);
  return t;
}

struct LaplacianChoice {
  LaplacianScheme scheme = LaplacianScheme::belkin;
  LaplacianOptions options;
};

inline LaplacianChoice parse_laplacian_choice(const std::string& text) {
  LaplacianChoice c;
  for (const auto& [k, v] : detail::key_runs(text)) {
    if (k == "scheme" || k.empty()) c.scheme = parse_scheme(v);
    else if (k == "h") {
      c.options.h = detail::parse_number(v, "laplacian h");
      if (!(*c.options.h > 0)) throw ParseError("laplacian h must be positive");
    } else if (k == "exact") c.options.exact = v == "1" || v == "true";
    else throw ParseError("unknown laplacian option '" + k + "'");
  }
  return c;
}

inline std::string laplacian_text(const LaplacianChoice& c) {
  std::string t = std::string("scheme=") + scheme_name(c.scheme);
  if (c.options.h) t += ",h=" + format_roundtrip(*c.options.h);
  if (c.options.exact) t += ",exact=1";
  return t;
}

/// "rv:tau=0.02,valley=0.05". Keys are checked against the method.
struct MethodSpec {
  std::string name;
  std::map<std::string, std::string> params;

  bool operator==(const MethodSpec&) const = default;

  std::string text() const {
    std::string t = name;
    char sep = ':';
    for (const auto& [k, v] : params) {
      t += sep + k + "=" + v;
      sep = ',';
    }
    return t;
  }

  double number(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : detail::parse_number(it->second, name + " " + key);
  }

  bool flag(const std::string& key) const {
    const auto it = params.find(key);
    return it != params.end() && (it->second == "1" || it->second == "true");
  }

  std::string word(const std::string& key, const std::string& fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
};

inline const std::set<std::string>& method_keys(const std::string& m) {
  static const std::map<std::string, std::set<std::string>> keys{
      {"contour", {"mode"}},
      {"crease", {"angle"}},
      {"rv", {"tau", "ridge", "valley", "abs"}},
      {"sc", {"tau", "low", "high", "variant", "abs"}},
      {"ar", {"tau", "abs"}},
      {"pel", {"tau", "abs"}},
      {"dc", {"tau", "abs", "keep"}},
      {"ll", {"tau", "abs"}}};
  const auto it = keys.find(m);
  if (it == keys.end()) throw ParseError("unknown method '" + m + "'");
  return it->second;
}

inline void validate_method(const MethodSpec& m) {
  const auto& allowed = method_keys(m.name);
  for (const auto& [k, v] : m.params)
    if (!allowed.count(k)) throw ParseError("method " + m.name + " has no option '" + k + "'");
  auto nonneg = [&](const char* key) {
    if (m.params.count(key)) {
      const double x = m.number(key, 0.0);
      if (!(x >= 0.0) || !std::isfinite(x)) throw ParseError(m.name + " " + key + " must be a finite value >= 0");
    }
  };
  for (const char* k : {"tau", "ridge", "valley", "low", "high"}) nonneg(k);
  if (m.params.count("angle")) {
    const double a = m.number("angle", 30.0);
    if (!(a >= 0.0 && a <= 180.0)) throw ParseError("crease angle must lie in [0, 180]");
  }
  if (m.name == "sc") {
    const double lo = m.number("low", m.number("tau", 0.05)), hi = m.number("high", 0.1);
    if (lo > hi) throw ParseError("sc hysteresis requires low <= high");
    const std::string v = m.word("variant", "curvature");
    if (v != "curvature" && v != "light") throw ParseError("sc variant must be curvature or light");
  }
  if (m.name == "contour") {
    const std::string mode = m.word("mode", "smooth");
    if (mode != "smooth" && mode != "edge") throw ParseError("contour mode must be smooth or edge");
  }
  if (m.name == "dc") {
    const std::string k = m.word("keep", "above");
    if (k != "above" && k != "below") throw ParseError("dc keep must be above or below");
  }
}

inline MethodSpec parse_method_spec(const std::string& text) {
  MethodSpec m;
  const auto colon = text.find(':');
  m.name = detail::strip(text.substr(0, colon));
  if (colon != std::string::npos) {
    for (auto [k, v] : detail::key_runs(text.substr(colon + 1))) {
      if (k == "\xcf\x84") k = "tau";  // Greek tau
      if (k.empty()) throw ParseError("method option '" + v + "' lacks '='");
      m.params[k] = v;
    }
  }
  validate_method(m);
  return m;
}

// ---------------------------------------------------------------------------
// Pipeline config

struct PipelineConfig {
  std::string input;
  std::optional<MeshFormat> format;
  std::vector<SmoothingConfig> smoothing;
  bool smoothing_presets = false;
  std::vector<MethodSpec> methods;
  Camera camera;
  std::vector<Light> lights{Light{}};
  LaplacianChoice laplacian;
  std::string out_json, out_obj, out_svg;
  double svg_sample = 0.5;
  bool svg_underlay = false;

  void validate() const {
    if (methods.empty()) throw ParseError("config lists no methods");
    for (const auto& m : methods) validate_method(m);
    for (const auto& s : smoothing) s.validate();
    camera.validate();
    if (lights.empty()) throw ParseError("config lists no lights");
    if (!(svg_sample > 0.0)) throw ParseError("svg sample factor must be positive");
  }
};

inline std::string config_text(const PipelineConfig& c) {
  std::ostringstream o;
  o << "[input]\npath = " << c.input << "\n";
  if (c.format) o << "format = " << (*c.format == MeshFormat::obj ? "obj" : "ply") << "\n";
  o << "[smoothing]\n";
  for (const auto& s : c.smoothing) o << "step = " << smoothing_text(s) << "\n";
  o << "presets = " << (c.smoothing_presets ? "true" : "false") << "\n";
  o << "[methods]\n";
  for (const auto& m : c.methods) o << "method = " << m.text() << "\n";
  o << "[camera]\n" << "spec = " << camera_text(c.camera) << "\n";
  o << "[lights]\n";
  for (const auto& l : c.lights) o << "light = " << light_text(l) << "\n";
  o << "[laplacian]\nspec = " << laplacian_text(c.laplacian) << "\n";
  o << "[output]\njson = " << c.out_json << "\nobj = " << c.out_obj << "\nsvg = " << c.out_svg << "\n";
  o << "svg_sample = " << format_roundtrip(c.svg_sample) << "\nsvg_underlay = " << (c.svg_underlay ? "true" : "false") << "\n";
  return o.str();
}

inline bool parse_bool(const std::string& v, const std::string& what) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ParseError("bad boolean '" + v + "' for " + what);
}

inline PipelineConfig parse_config(const std::string& text) {
  PipelineConfig c;
  c.lights.clear();
  bool lights_seen = false;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::strip(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    try {
      if (line.front() == '[') {
        if (line.back() != ']') throw ParseError("unterminated section header");
        section = detail::strip(line.substr(1, line.size() - 2));
        if (section == "lights") lights_seen = true;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError("expected 'key = value'");
      const std::string key = detail::strip(line.substr(0, eq)), val = detail::strip(line.substr(eq + 1));
      const std::string sk = section + "." + key;
      if (sk == "input.path") c.input = val;
      else if (sk == "input.format") {
        if (val == "obj") c.format = MeshFormat::obj;
        else if (val == "ply") c.format = MeshFormat::ply;
        else throw ParseError("unknown mesh format '" + val + "'");
      } else if (sk == "smoothing.step") c.smoothing.push_back(parse_smoothing(val));
      else if (sk == "smoothing.presets") c.smoothing_presets = parse_bool(val, key);
      else if (sk == "methods.method") c.methods.push_back(parse_method_spec(val));
      else if (sk == "camera.spec") c.camera = parse_camera(val);
      else if (sk == "lights.light") c.lights.push_back(parse_light(val));
      else if (sk == "laplacian.spec") c.laplacian = parse_laplacian_choice(val);
      else if (sk == "output.json") c.out_json = val;
      else if (sk == "output.obj") c.out_obj = val;
      else if (sk == "output.svg") c.out_svg = val;
      else if (sk == "output.svg_sample") c.svg_sample = detail::parse_number(val, key);
      else if (sk == "output.svg_underlay") c.svg_underlay = parse_bool(val, key);
      else throw ParseError("unknown key '" + key + "' in section [" + section + "]");
    } catch (const ParseError& e) {
      throw ParseError(std::string("config: ") + e.what(), line_no);
    }
  }
  if (!lights_seen || c.lights.empty()) c.lights = {Light{}};
  return c;
}

inline bool operator==(const Light& a, const Light& b) {
  return a.kind == b.kind && a.vec == b.vec && a.intensity == b.intensity;
}

inline bool same_config(const PipelineConfig& a, const PipelineConfig& b) {
  auto cam = [](const Camera& c) { return camera_text(c); };
  auto smooth = [](const std::vector<SmoothingConfig>& v) {
    std::string s;
    for (const auto& x : v) s += smoothing_text(x) + ";";
    return s;
  };
  return a.input == b.input && a.format == b.format && smooth(a.smoothing) == smooth(b.smoothing) &&
         a.smoothing_presets == b.smoothing_presets && a.methods == b.methods && cam(a.camera) == cam(b.camera) &&
         a.lights == b.lights && laplacian_text(a.laplacian) == laplacian_text(b.laplacian) &&
         a.out_json == b.out_json && a.out_obj == b.out_obj && a.out_svg == b.out_svg &&
         a.svg_sample == b.svg_sample && a.svg_underlay == b.svg_underlay;
}

}  // namespace meshlines
