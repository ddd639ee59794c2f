// meshlines: feature-line extraction from triangle meshes.
//
//   meshlines extract --in bunny.obj --method rv:tau=0.05 --method contour --out-json lines.json
//   meshlines render  --in bunny.obj --method sc --camera eye=0,0,4,look=0,0,0,up=0,1,0 --out-svg sc.svg
//   meshlines inspect --in sphere.obj --what curvature
//   meshlines compare --in oracle:torus --out-json all.json --out-svg grid.svg
//
// Exit codes: 0 ok, 1 other failure, 2 parse/config error, 3 geometry error, 4 numeric error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "meshlines/meshlines.hpp"

namespace {

using namespace meshlines;

struct Flags {
  std::string config_file, save_config;
  std::string input, format;
  std::vector<std::string> methods, lights, smooth, what;
  std::string camera, laplacian;
  std::string out_json, out_obj, out_svg;
  double svg_sample = 0.0;
  bool presets = false, underlay = false, no_hidden = false, timings = false;
};

void add_common(CLI::App* cmd, Flags& f, bool with_methods) {
  cmd->add_option("--config", f.config_file, "pipeline config file (flags override its values)");
  cmd->add_option("--save-config", f.save_config, "write the effective config to this file");
  cmd->add_option("--in", f.input, "mesh path (.obj/.ply), oracle:<surface> or shape:<name>[:n]");
  cmd->add_option("--format", f.format, "mesh format when the extension is missing")->check(CLI::IsMember({"obj", "ply"}));
  if (with_methods)
    cmd->add_option("--method", f.methods, "method[:key=value,...]; contour crease rv sc ar pel dc ll");
  cmd->add_option("--camera", f.camera, "eye=x,y,z,look=x,y,z,up=x,y,z,proj=ortho|persp,fov=deg");
  cmd->add_option("--light", f.lights, "headlight | directional,dir=x,y,z | point,pos=x,y,z [,intensity=s]");
  cmd->add_option("--laplacian", f.laplacian, "scheme=combinatorial|uniform|mean-value|cotangent|belkin[,h=..]");
  cmd->add_option("--smooth", f.smooth, "target=normals|geometry|scalar-field,iters=n,lambda=l[,mu=m]");
  cmd->add_flag("--smooth-presets", f.presets, "per-method default smoothing");
  cmd->add_option("--out-json", f.out_json, "line sets as JSON ('-' for stdout)");
  cmd->add_option("--out-obj", f.out_obj, "line sets as OBJ polylines");
  cmd->add_option("--out-svg", f.out_svg, "SVG drawing with hidden lines removed");
  cmd->add_option("--svg-sample", f.svg_sample, "visibility sample spacing in mean edge lengths (default 0.5)");
  cmd->add_flag("--underlay", f.underlay, "shade front faces under the lines");
  cmd->add_flag("--no-hidden", f.no_hidden, "keep hidden lines");
  cmd->add_flag("--timings", f.timings, "print stage timings to stderr");
}

PipelineConfig effective_config(const Flags& f) {
  PipelineConfig c;
  if (!f.config_file.empty()) c = parse_config(read_file(f.config_file));
  if (!f.input.empty()) c.input = f.input;
  if (!f.format.empty()) c.format = f.format == "ply" ? MeshFormat::ply : MeshFormat::obj;
  if (!f.methods.empty()) {
    c.methods.clear();
    for (const auto& m : f.methods) c.methods.push_back(parse_method_spec(m));
  }
  if (!f.camera.empty()) c.camera = parse_camera(f.camera, c.camera);
  if (!f.lights.empty()) {
    c.lights.clear();
    for (const auto& l : f.lights) c.lights.push_back(parse_light(l));
  }
  if (!f.laplacian.empty()) c.laplacian = parse_laplacian_choice(f.laplacian);
  if (!f.smooth.empty()) {
    c.smoothing.clear();
    for (const auto& s : f.smooth) c.smoothing.push_back(parse_smoothing(s));
  }
  if (f.presets) c.smoothing_presets = true;
  if (!f.out_json.empty()) c.out_json = f.out_json;
  if (!f.out_obj.empty()) c.out_obj = f.out_obj;
  if (!f.out_svg.empty()) c.out_svg = f.out_svg;
  if (f.svg_sample > 0) c.svg_sample = f.svg_sample;
  if (f.underlay) c.svg_underlay = true;
  return c;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

void print_report(const RunReport& r, bool timings) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  if (!timings) return;
  for (const auto& s : r.stages) std::fprintf(stderr, "stage %-28s %10.3f ms\n", s.name.c_str(), s.ms);
  for (const auto& n : r.notes) std::cerr << "note: " << n << "\n";
}

void summarize(const std::vector<LineSet>& sets) {
  for (const auto& ls : sets)
    std::fprintf(stderr, "%-8s %5zu polylines  length %.6g\n", ls.method.c_str(), ls.polylines.size(), total_length(ls));
}

int cmd_extract(const Flags& f, bool render) {
  PipelineConfig cfg = effective_config(f);
  if (!f.save_config.empty()) write_text(f.save_config, config_text(cfg));
  const ExtractResult r = run_extract(cfg);
  print_report(r.report, f.timings);
  summarize(r.sets);
  bool wrote = false;
  if (!cfg.out_json.empty()) write_text(cfg.out_json, extract_json(cfg, r)), wrote = true;
  if (!cfg.out_obj.empty()) write_text(cfg.out_obj, linesets_obj(r.sets)), wrote = true;
  SvgOptions so = svg_options(cfg);
  so.hidden_line_removal = !f.no_hidden;
  if (!cfg.out_svg.empty()) write_text(cfg.out_svg, render_svg(r.mesh, r.sets, cfg.camera, so)), wrote = true;
  if (!wrote) write_text("-", render ? render_svg(r.mesh, r.sets, cfg.camera, so) : extract_json(cfg, r));
  return 0;
}

int cmd_compare(const Flags& f) {
  PipelineConfig cfg = compare_config(effective_config(f));
  if (!f.save_config.empty()) write_text(f.save_config, config_text(cfg));
  const ExtractResult r = run_extract(cfg);
  print_report(r.report, f.timings);
  summarize(r.sets);
  SvgOptions so = svg_options(cfg);
  so.hidden_line_removal = !f.no_hidden;
  bool wrote = false;
  if (!cfg.out_json.empty()) write_text(cfg.out_json, extract_json(cfg, r)), wrote = true;
  if (!cfg.out_obj.empty()) write_text(cfg.out_obj, linesets_obj(r.sets)), wrote = true;
  if (!cfg.out_svg.empty()) write_text(cfg.out_svg, render_svg_grid(r.mesh, r.sets, cfg.camera, 4, so)), wrote = true;
  if (!wrote) write_text("-", extract_json(cfg, r));
  return 0;
}

int cmd_inspect(const Flags& f) {
  PipelineConfig cfg = effective_config(f);
  const MeshBuffer mesh = load_input(cfg.input, cfg.format);
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  const std::vector<std::string> what = f.what.empty() ? std::vector<std::string>{"curvature"} : f.what;
  for (const auto& w : what) j.push_back(inspect(mesh, w, cfg.laplacian));
  write_text(cfg.out_json.empty() ? "-" : cfg.out_json, (what.size() == 1 ? j[0] : j).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature lines on triangle meshes"};
  app.require_subcommand(1);
  Flags f;
  auto* extract = app.add_subcommand("extract", "extract line sets");
  auto* render = app.add_subcommand("render", "extract and draw an SVG");
  auto* insp = app.add_subcommand("inspect", "report curvature, Laplacian properties or areas");
  auto* compare = app.add_subcommand("compare", "run all eight methods; SVG grid");
  add_common(extract, f, true);
  add_common(render, f, true);
  add_common(insp, f, false);
  add_common(compare, f, true);
  insp->add_option("--what", f.what, "curvature | laplacian-properties | areas (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (extract->parsed()) return cmd_extract(f, false);
    if (render->parsed()) return cmd_extract(f, true);
    if (insp->parsed()) return cmd_inspect(f);
    if (compare->parsed()) return cmd_compare(f);
  } catch (const meshlines::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case meshlines::ErrorKind::parse: return 2;
      case meshlines::ErrorKind::geometry: return 3;
      case meshlines::ErrorKind::numeric: return 4;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
