#pragma once

#include <charconv>
#include <cstdint>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "mesh.hpp"

namespace meshlines {

enum class MeshFormat { obj, ply };

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t j0 = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > j0) out.push_back(s.substr(j0, i - j0));
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline bool parse_long(std::string_view s, long& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

/// Appends a fan triangulation of `poly` to `tris`.
inline void fan(const std::vector<int>& poly, std::vector<Triangle>& tris) {
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) tris.push_back({poly[0], poly[k], poly[k + 1]});
}

}  // namespace detail

/// Parses Wavefront OBJ text: `v x y z` and `f i j k ...` records
/// (1-based or negative relative indices; `/vt/vn` suffixes ignored).
inline MeshBuffer parse_obj(std::string_view text) {
  MeshBuffer mesh;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string_view line = detail::trim(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = detail::trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto tok = detail::split_ws(line);
    if (tok[0] == "v") {
      if (tok.size() < 4) throw ParseError("vertex record needs three coordinates", line_no);
      Vec3 p;
      for (int k = 0; k < 3; ++k)
        if (!detail::parse_double(tok[1 + k], p[k]))
          throw ParseError("bad coordinate '" + std::string(tok[1 + k]) + "'", line_no);
      mesh.positions.push_back(p);
    } else if (tok[0] == "f") {
      if (tok.size() < 4) throw ParseError("face record needs at least three vertices", line_no);
      std::vector<int> poly;
      for (std::size_t k = 1; k < tok.size(); ++k) {
        std::string_view idx = tok[k].substr(0, tok[k].find('/'));
        long v = 0;
        if (!detail::parse_long(idx, v) || v == 0)
          throw ParseError("bad face index '" + std::string(tok[k]) + "'", line_no);
        const long n = static_cast<long>(mesh.positions.size());
        const long resolved = v > 0 ? v - 1 : n + v;
        if (resolved < 0)
          throw ParseError("face index " + std::to_string(v) + " out of range", line_no);
        poly.push_back(static_cast<int>(resolved));
      }
      detail::fan(poly, mesh.triangles);
    }
    // other records (vt, vn, o, g, s, usemtl, mtllib, l) are ignored
  }
  const int n = static_cast<int>(mesh.positions.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    for (int v : mesh.triangles[t])
      if (v >= n)
        throw GeometryError("face " + std::to_string(t) + " references vertex " + std::to_string(v + 1) + " of " +
                            std::to_string(n) + ": index out of range");
  return mesh;
}

namespace detail {

enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

inline bool ply_type(std::string_view s, PlyType& t) {
  if (s == "char" || s == "int8") t = PlyType::i8;
  else if (s == "uchar" || s == "uint8") t = PlyType::u8;
  else if (s == "short" || s == "int16") t = PlyType::i16;
  else if (s == "ushort" || s == "uint16") t = PlyType::u16;
  else if (s == "int" || s == "int32") t = PlyType::i32;
  else if (s == "uint" || s == "uint32") t = PlyType::u32;
  else if (s == "float" || s == "float32") t = PlyType::f32;
  else if (s == "double" || s == "float64") t = PlyType::f64;
  else return false;
  return true;
}

inline std::size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::i8:
    case PlyType::u8: return 1;
    case PlyType::i16:
    case PlyType::u16: return 2;
    case PlyType::i32:
    case PlyType::u32:
    case PlyType::f32: return 4;
    case PlyType::f64: return 8;
  }
  return 0;
}

template <class T>
T read_le(const unsigned char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));  // host is little-endian (x86/ARM)
  return v;
}

inline double ply_read(PlyType t, const unsigned char* p) {
  switch (t) {
    case PlyType::i8: return read_le<std::int8_t>(p);
    case PlyType::u8: return read_le<std::uint8_t>(p);
    case PlyType::i16: return read_le<std::int16_t>(p);
    case PlyType::u16: return read_le<std::uint16_t>(p);
    case PlyType::i32: return read_le<std::int32_t>(p);
    case PlyType::u32: return read_le<std::uint32_t>(p);
    case PlyType::f32: return read_le<float>(p);
    case PlyType::f64: return read_le<double>(p);
  }
  return 0.0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::f32;
  bool is_list = false;
  PlyType count_type = PlyType::u8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

}  // namespace detail

/// Parses PLY (ascii or binary_little_endian) with `vertex` (x,y,z) and
/// `face` (vertex index list) elements. Other elements are skipped.
inline MeshBuffer parse_ply(std::string_view data) {
  using namespace detail;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::string_view {
    if (pos >= data.size()) throw ParseError("unexpected end of PLY header", line_no);
    const std::size_t nl = data.find('\n', pos);
    const std::string_view line = data.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? data.size() : nl + 1;
    ++line_no;
    return trim(line);
  };
  if (next_line() != "ply") throw ParseError("missing 'ply' magic", 1);
  bool binary = false;
  std::vector<PlyElement> elements;
  for (;;) {
    const auto line = next_line();
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "format") {
      if (tok.size() < 2) throw ParseError("bad format line", line_no);
      if (tok[1] == "ascii") binary = false;
      else if (tok[1] == "binary_little_endian") binary = true;
      else throw ParseError("unsupported PLY format '" + std::string(tok[1]) + "'", line_no);
    } else if (tok[0] == "element") {
      long count = 0;
      if (tok.size() < 3 || !parse_long(tok[2], count) || count < 0) throw ParseError("bad element line", line_no);
      elements.push_back({std::string(tok[1]), static_cast<std::size_t>(count), {}});
    } else if (tok[0] == "property") {
      if (elements.empty()) throw ParseError("property before element", line_no);
      PlyProperty prop;
      if (tok.size() >= 5 && tok[1] == "list") {
        prop.is_list = true;
        if (!ply_type(tok[2], prop.count_type) || !ply_type(tok[3], prop.type))
          throw ParseError("bad list property types", line_no);
        prop.name = std::string(tok[4]);
      } else if (tok.size() >= 3) {
        if (!ply_type(tok[1], prop.type)) throw ParseError("bad property type '" + std::string(tok[1]) + "'", line_no);
        prop.name = std::string(tok[2]);
      } else {
        throw ParseError("bad property line", line_no);
      }
      elements.back().props.push_back(prop);
    }
    // comment / obj_info lines are ignored
  }

  MeshBuffer mesh;
  std::vector<std::string_view> ascii_tokens;
  std::size_t ascii_at = 0;
  std::vector<std::size_t> ascii_token_line;
  if (!binary) {
    std::size_t p = pos;
    std::size_t ln = line_no;
    while (p < data.size()) {
      const std::size_t nl = data.find('\n', p);
      const auto line = data.substr(p, nl == std::string_view::npos ? std::string_view::npos : nl - p);
      ++ln;
      for (auto t : split_ws(line)) {
        ascii_tokens.push_back(t);
        ascii_token_line.push_back(ln);
      }
      p = nl == std::string_view::npos ? data.size() : nl + 1;
    }
  }
  const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
  std::size_t bpos = pos;
  auto read_value = [&](PlyType t) -> double {
    if (binary) {
      const std::size_t sz = ply_size(t);
      if (bpos + sz > data.size()) throw ParseError("truncated binary PLY body");
      const double v = ply_read(t, bytes + bpos);
      bpos += sz;
      return v;
    }
    if (ascii_at >= ascii_tokens.size()) throw ParseError("truncated ASCII PLY body", line_no);
    double v = 0.0;
    if (!parse_double(ascii_tokens[ascii_at], v))
      throw ParseError("bad number '" + std::string(ascii_tokens[ascii_at]) + "'", ascii_token_line[ascii_at]);
    ++ascii_at;
    return v;
  };

  for (const auto& el : elements) {
    const bool is_vertex = el.name == "vertex";
    const bool is_face = el.name == "face";
    int ix = -1, iy = -1, iz = -1, iface = -1;
    for (std::size_t k = 0; k < el.props.size(); ++k) {
      const auto& n = el.props[k].name;
      if (n == "x") ix = static_cast<int>(k);
      if (n == "y") iy = static_cast<int>(k);
      if (n == "z") iz = static_cast<int>(k);
      if (el.props[k].is_list && (n == "vertex_indices" || n == "vertex_index")) iface = static_cast<int>(k);
    }
    if (is_vertex && (ix < 0 || iy < 0 || iz < 0)) throw ParseError("vertex element lacks x/y/z");
    if (is_face && iface < 0) throw ParseError("face element lacks a vertex index list");
    for (std::size_t r = 0; r < el.count; ++r) {
      Vec3 p;
      std::vector<int> poly;
      for (std::size_t k = 0; k < el.props.size(); ++k) {
        const auto& prop = el.props[k];
        if (prop.is_list) {
          const double cnt = read_value(prop.count_type);
          if (cnt < 0 || cnt > 1e6) throw ParseError("bad list length in PLY element " + el.name);
          for (int c = 0; c < static_cast<int>(cnt); ++c) {
            const double v = read_value(prop.type);
            if (static_cast<int>(k) == iface) poly.push_back(static_cast<int>(v));
          }
        } else {
          const double v = read_value(prop.type);
          if (static_cast<int>(k) == ix) p.x = v;
          if (static_cast<int>(k) == iy) p.y = v;
          if (static_cast<int>(k) == iz) p.z = v;
        }
      }
      if (is_vertex) mesh.positions.push_back(p);
      if (is_face) {
        if (poly.size() < 3) throw ParseError("face with fewer than three vertices");
        fan(poly, mesh.triangles);
      }
    }
  }
  const int n = static_cast<int>(mesh.positions.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    for (int v : mesh.triangles[t])
      if (v < 0 || v >= n)
        throw GeometryError("face " + std::to_string(t) + " references vertex " + std::to_string(v) + " of " +
                            std::to_string(n) + ": index out of range");
  return mesh;
}

/// Parses and validates a mesh. Errors: ParseError (with line number),
/// GeometryError (range, degeneracy, non-manifold edge ids, empty mesh).
inline MeshBuffer load_mesh(std::string_view bytes, MeshFormat format) {
  MeshBuffer mesh = format == MeshFormat::obj ? parse_obj(bytes) : parse_ply(bytes);
  validate_mesh(mesh);
  return mesh;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline MeshFormat format_from_path(const std::string& path) {
  const auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == "ply") return MeshFormat::ply;
  if (ext == "obj") return MeshFormat::obj;
  throw ParseError("cannot infer mesh format from '" + path + "'");
}

inline MeshBuffer load_mesh_file(const std::string& path) { return load_mesh(read_file(path), format_from_path(path)); }

/// Shortest decimal form that parses back to the same double.
inline std::string format_roundtrip(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// OBJ text whose positions reload bit-identically.
inline std::string write_obj(const MeshBuffer& mesh) {
  std::string out;
  out.reserve(mesh.positions.size() * 40 + mesh.triangles.size() * 20);
  for (const auto& p : mesh.positions) {
    out += "v ";
    out += format_roundtrip(p.x);
    out += ' ';
    out += format_roundtrip(p.y);
    out += ' ';
    out += format_roundtrip(p.z);
    out += '\n';
  }
  for (const auto& t : mesh.triangles) {
    out += "f " + std::to_string(t[0] + 1) + ' ' + std::to_string(t[1] + 1) + ' ' + std::to_string(t[2] + 1) + '\n';
  }
  return out;
}

}  // namespace meshlines
