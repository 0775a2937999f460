#pragma once

#include <filesystem>
#include <string>

#include "blobtrack/detect.hpp"
#include "blobtrack/label.hpp"
#include "blobtrack/track.hpp"

namespace blobtrack {

// Every tunable of a run. Default-constructed values equal the shipped
// config/default_params.json.
struct Parameters {
  DetectionParams detection;
  BlobParams blob;
  TrackParams tracking;
  int refine_levels = 1;  // 0 disables refinement

  void validate() const;
  friend bool operator==(const Parameters&, const Parameters&);
};

// Parameter files are JSON objects with optional sections "detection", "blob",
// "tracking" and "mesh"; absent keys keep their defaults, unknown keys are an
// InputError. Key names follow the reference parameter table (minAbsden, maxJump, ...).
Parameters parse_parameters(const std::string& json_text, const Parameters& base = {});
Parameters load_parameters(const std::filesystem::path& path, const Parameters& base = {});
std::string to_json(const Parameters& params);

std::string_view to_string(Pooling pooling);
std::string_view to_string(AreaChangeMode mode);
Pooling parse_pooling(std::string_view text);
AreaChangeMode parse_area_mode(std::string_view text);

}  // namespace blobtrack
