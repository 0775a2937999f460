#include "blobtrack/params.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "blobtrack/error.hpp"

namespace blobtrack {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

template <typename T>
void read_key(const json& section, const char* key, T& out, std::string_view section_name) {
  const auto it = section.find(key);
  if (it == section.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw InputError("parameter " + std::string(section_name) + "." + key + " has the wrong type");
  }
}

void reject_unknown(const json& section, std::string_view name, std::initializer_list<std::string_view> known) {
  if (!section.is_object()) throw InputError("parameter section '" + std::string(name) + "' must be an object");
  for (const auto& [key, _] : section.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InputError("unknown parameter " + std::string(name) + "." + key);
    }
  }
}

}  // namespace

std::string_view to_string(Pooling pooling) {
  return pooling == Pooling::per_plane ? "per-plane" : "pooled";
}

std::string_view to_string(AreaChangeMode mode) {
  return mode == AreaChangeMode::absolute ? "absolute" : "relative";
}

Pooling parse_pooling(std::string_view text) {
  if (text == "pooled") return Pooling::pooled_across_planes;
  if (text == "per-plane") return Pooling::per_plane;
  throw ArgumentError("pooling must be 'pooled' or 'per-plane', got '" + std::string(text) + "'");
}

AreaChangeMode parse_area_mode(std::string_view text) {
  if (text == "absolute") return AreaChangeMode::absolute;
  if (text == "relative") return AreaChangeMode::relative;
  throw ArgumentError("area change mode must be 'absolute' or 'relative', got '" + std::string(text) + "'");
}

void Parameters::validate() const {
  detection.validate();
  blob.validate();
  tracking.validate();
  if (refine_levels < 0) throw ArgumentError("refine levels must be >= 0");
}

bool operator==(const Parameters& a, const Parameters& b) {
  const auto& da = a.detection;
  const auto& db = b.detection;
  const auto& ba = a.blob;
  const auto& bb = b.blob;
  const auto& ta = a.tracking;
  const auto& tb = b.tracking;
  return da.alpha == db.alpha && da.beta == db.beta && da.min_abs_density == db.min_abs_density &&
         da.min_rel_density == db.min_rel_density && da.pooling == db.pooling && ba.min_area == bb.min_area &&
         ba.min_abs_median == bb.min_abs_median && ba.min_rel_median == bb.min_rel_median &&
         ba.max_abs_median == bb.max_abs_median && ta.max_jump == tb.max_jump &&
         ta.max_area_change == tb.max_area_change && ta.min_frames == tb.min_frames &&
         ta.max_frames == tb.max_frames && ta.area_mode == tb.area_mode && a.refine_levels == b.refine_levels;
}

Parameters parse_parameters(const std::string& json_text, const Parameters& base) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("parameter file is not valid JSON: ") + e.what());
  }
  reject_unknown(root, "<root>", {"detection", "blob", "tracking", "mesh", "notes"});

  Parameters p = base;
  if (root.contains("detection")) {
    const auto& s = root["detection"];
    reject_unknown(s, "detection", {"alpha", "beta", "minAbsden", "minRden", "pooling"});
    read_key(s, "alpha", p.detection.alpha, "detection");
    read_key(s, "beta", p.detection.beta, "detection");
    read_key(s, "minAbsden", p.detection.min_abs_density, "detection");
    read_key(s, "minRden", p.detection.min_rel_density, "detection");
    std::string pooling{to_string(p.detection.pooling)};
    read_key(s, "pooling", pooling, "detection");
    p.detection.pooling = parse_pooling(pooling);
  }
  if (root.contains("blob")) {
    const auto& s = root["blob"];
    reject_unknown(s, "blob", {"minArea", "minAbsMden", "minMden", "maxAbsMden"});
    read_key(s, "minArea", p.blob.min_area, "blob");
    read_key(s, "minAbsMden", p.blob.min_abs_median, "blob");
    read_key(s, "minMden", p.blob.min_rel_median, "blob");
    read_key(s, "maxAbsMden", p.blob.max_abs_median, "blob");
  }
  if (root.contains("tracking")) {
    const auto& s = root["tracking"];
    reject_unknown(s, "tracking", {"maxJump", "maxAreaChange", "minFrames", "maxFrames", "areaChangeMode"});
    read_key(s, "maxJump", p.tracking.max_jump, "tracking");
    read_key(s, "maxAreaChange", p.tracking.max_area_change, "tracking");
    read_key(s, "minFrames", p.tracking.min_frames, "tracking");
    read_key(s, "maxFrames", p.tracking.max_frames, "tracking");
    std::string mode{to_string(p.tracking.area_mode)};
    read_key(s, "areaChangeMode", mode, "tracking");
    p.tracking.area_mode = parse_area_mode(mode);
  }
  if (root.contains("mesh")) {
    const auto& s = root["mesh"];
    reject_unknown(s, "mesh", {"refineLevels"});
    read_key(s, "refineLevels", p.refine_levels, "mesh");
  }
  p.validate();
  return p;
}

Parameters load_parameters(const std::filesystem::path& path, const Parameters& base) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open parameter file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_parameters(ss.str(), base);
}

std::string to_json(const Parameters& p) {
  ordered_json j;
  j["detection"] = {{"alpha", p.detection.alpha},
                    {"beta", p.detection.beta},
                    {"minAbsden", p.detection.min_abs_density},
                    {"minRden", p.detection.min_rel_density},
                    {"pooling", to_string(p.detection.pooling)}};
  j["blob"] = {{"minArea", p.blob.min_area},
               {"minAbsMden", p.blob.min_abs_median},
               {"minMden", p.blob.min_rel_median},
               {"maxAbsMden", p.blob.max_abs_median}};
  j["tracking"] = {{"maxJump", p.tracking.max_jump},
                   {"maxAreaChange", p.tracking.max_area_change},
                   {"minFrames", p.tracking.min_frames},
                   {"maxFrames", p.tracking.max_frames},
                   {"areaChangeMode", to_string(p.tracking.area_mode)}};
  j["mesh"] = {{"refineLevels", p.refine_levels}};
  return j.dump(2);
}

}  // namespace blobtrack
