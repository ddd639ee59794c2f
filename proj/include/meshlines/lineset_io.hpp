#pragma once

// LineSet serialization. All floats go out with 9 significant digits so
// identical inputs give identical bytes.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "isoline.hpp"

namespace meshlines {

/// x rounded to 9 significant digits (the double nearest its %.9g text).
inline double round9(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

inline std::string fmt9(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

inline nlohmann::ordered_json to_json(const LineSet& ls) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["method"] = ls.method;
  ordered_json lines = ordered_json::array();
  for (const auto& pl : ls.polylines) {
    ordered_json p;
    p["strength"] = round9(pl.strength);
    p["polarity"] = polarity_name(pl.polarity);
    p["closed"] = pl.closed;
    ordered_json pts = ordered_json::array();
    for (const auto& q : pl.points) {
      pts.push_back({{"edge", {q.a, q.b}},
                     {"t", round9(q.t)},
                     {"xyz", {round9(q.xyz.x), round9(q.xyz.y), round9(q.xyz.z)}}});
    }
    p["points"] = std::move(pts);
    lines.push_back(std::move(p));
  }
  j["polylines"] = std::move(lines);
  return j;
}

inline Polarity parse_polarity(const std::string& s) {
  if (s == "ridge") return Polarity::ridge;
  if (s == "valley") return Polarity::valley;
  if (s == "none") return Polarity::none;
  throw ParseError("unknown polarity '" + s + "'");
}

inline LineSet lineset_from_json(const nlohmann::ordered_json& j) {
  try {
    LineSet ls;
    ls.method = j.at("method").get<std::string>();
    for (const auto& p : j.at("polylines")) {
      Polyline pl;
      pl.strength = p.at("strength").get<double>();
      pl.polarity = parse_polarity(p.at("polarity").get<std::string>());
      pl.closed = p.value("closed", false);
      for (const auto& q : p.at("points")) {
        OnEdgePoint e;
        e.a = q.at("edge").at(0).get<int>();
        e.b = q.at("edge").at(1).get<int>();
        e.t = q.at("t").get<double>();
        const auto& x = q.at("xyz");
        e.xyz = {x.at(0).get<double>(), x.at(1).get<double>(), x.at(2).get<double>()};
        pl.points.push_back(e);
      }
      ls.polylines.push_back(std::move(pl));
    }
    return ls;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed line set JSON: ") + e.what());
  }
}

/// {"linesets": [...]} for several methods, in the given order.
inline std::string linesets_json(const std::vector<LineSet>& sets, const nlohmann::ordered_json& extra = {}) {
  nlohmann::ordered_json j;
  if (extra.is_object())
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  j["linesets"] = nlohmann::ordered_json::array();
  for (const auto& ls : sets) j["linesets"].push_back(to_json(ls));
  return j.dump(2) + "\n";
}

/// Wavefront OBJ with one `v` per point and one `l` record per polyline;
/// closed polylines repeat their first index. Methods become `g` groups.
inline std::string linesets_obj(const std::vector<LineSet>& sets) {
  std::string out;
  std::size_t next = 1;
  for (const auto& ls : sets) {
    out += "g " + ls.method + "\n";
    for (const auto& pl : ls.polylines) {
      if (pl.points.size() < 2) continue;
      const std::size_t first = next;
      for (const auto& p : pl.points) {
        out += "v " + fmt9(p.xyz.x) + " " + fmt9(p.xyz.y) + " " + fmt9(p.xyz.z) + "\n";
        ++next;
      }
      out += "l";
      for (std::size_t i = first; i < next; ++i) out += " " + std::to_string(i);
      if (pl.closed) out += " " + std::to_string(first);
      out += "\n";
    }
  }
  return out;
}

}  // namespace meshlines
