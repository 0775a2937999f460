#include "blobtrack/track.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "blobtrack/error.hpp"

namespace blobtrack {

void TrackParams::validate() const {
  if (!(max_jump > 0.0) || !(max_area_change > 0.0)) {
    throw ArgumentError("max_jump and max_area_change must be > 0");
  }
  if (min_frames == 0 || max_frames == 0 || min_frames > max_frames) {
    throw ArgumentError("need 0 < min_frames <= max_frames");
  }
}

Velocity Track::mean_velocity() const {
  Velocity mean;
  if (velocities.empty()) return mean;
  for (const auto& v : velocities) {
    mean.dr += v.dr;
    mean.dz += v.dz;
  }
  mean.dr /= static_cast<double>(velocities.size());
  mean.dz /= static_cast<double>(velocities.size());
  return mean;
}

double center_distance(const Blob& a, const Blob& b) {
  return std::hypot(a.summary.center.r - b.summary.center.r, a.summary.center.z - b.summary.center.z);
}

bool gates_pass(const Blob& tail, const Blob& candidate, const TrackParams& params) {
  if (tail.plane_index != candidate.plane_index) return false;
  if (center_distance(tail, candidate) > params.max_jump) return false;
  const double a0 = static_cast<double>(tail.summary.area);
  const double a1 = static_cast<double>(candidate.summary.area);
  const double change = std::abs(a1 - a0);
  const double limit =
      params.area_mode == AreaChangeMode::absolute ? params.max_area_change : params.max_area_change / 100.0 * a0;
  return change <= limit;
}

std::vector<std::optional<std::size_t>> match(std::span<const Blob> blobs, std::span<const Track> tracks,
                                              const TrackParams& params) {
  std::vector<std::optional<std::size_t>> result(blobs.size());
  if (blobs.empty()) return result;

  const auto time = blobs.front().time_index;
  for (const auto& b : blobs) {
    if (b.time_index != time) throw ContractError("blobs passed to match() mix time indices");
  }
  for (const auto& t : tracks) {
    if (t.blobs.empty() || t.last_time() != time - 1) {
      throw ContractError("track " + std::to_string(t.id) + " does not end at time " + std::to_string(time - 1));
    }
  }

  struct Pair {
    double distance;
    std::uint32_t blob_id;
    std::size_t blob;
    std::uint64_t track_id;
    std::size_t track;
  };
  std::vector<Pair> pairs;
  for (std::size_t b = 0; b < blobs.size(); ++b) {
    for (std::size_t t = 0; t < tracks.size(); ++t) {
      if (gates_pass(tracks[t].tail(), blobs[b], params)) {
        pairs.push_back({center_distance(tracks[t].tail(), blobs[b]), blobs[b].id, b, tracks[t].id, t});
      }
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    return std::tie(x.distance, x.blob_id, x.blob, x.track_id) < std::tie(y.distance, y.blob_id, y.blob, y.track_id);
  });

  std::vector<bool> track_taken(tracks.size(), false);
  for (const auto& p : pairs) {
    if (result[p.blob] || track_taken[p.track]) continue;
    result[p.blob] = p.track;
    track_taken[p.track] = true;
  }
  return result;
}

Tracker::Tracker(TrackParams params, double dt) : params_(params), dt_(dt) {
  params_.validate();
  if (!(dt_ > 0.0)) throw ArgumentError("dt must be > 0");
}

void Tracker::end_track(Track&& track) {
  track.status = TrackStatus::ended;
  if (track.length() >= params_.min_frames) finished_.push_back(std::move(track));
}

void Tracker::step(std::int64_t time_index, std::span<const Blob> blobs) {
  if (last_time_ && time_index <= *last_time_) {
    throw ContractError("frame " + std::to_string(time_index) + " arrived after frame " +
                        std::to_string(*last_time_));
  }
  for (const auto& b : blobs) {
    if (b.time_index != time_index) {
      throw ContractError("blob time index " + std::to_string(b.time_index) + " differs from frame " +
                          std::to_string(time_index));
    }
  }
  // No coasting: a gap in time ends everything.
  if (last_time_ && time_index != *last_time_ + 1) {
    for (auto& t : active_) end_track(std::move(t));
    active_.clear();
  }
  last_time_ = time_index;

  const auto assignment = match(blobs, active_, params_);
  std::vector<std::optional<std::size_t>> track_to_blob(active_.size());
  for (std::size_t b = 0; b < assignment.size(); ++b) {
    if (assignment[b]) track_to_blob[*assignment[b]] = b;
  }

  std::vector<Track> still_active;
  still_active.reserve(active_.size() + blobs.size());
  for (std::size_t t = 0; t < active_.size(); ++t) {
    Track& track = active_[t];
    if (!track_to_blob[t]) {
      end_track(std::move(track));
      continue;
    }
    const Blob& blob = blobs[*track_to_blob[t]];
    const Point2& prev = track.tail().summary.center;
    track.velocities.push_back({(blob.summary.center.r - prev.r) / dt_, (blob.summary.center.z - prev.z) / dt_});
    track.blobs.push_back(blob);
    if (track.length() >= params_.max_frames) {
      end_track(std::move(track));
    } else {
      still_active.push_back(std::move(track));
    }
  }
  for (std::size_t b = 0; b < blobs.size(); ++b) {
    if (assignment[b]) continue;
    Track track;
    track.id = next_id_++;
    track.plane_index = blobs[b].plane_index;
    track.blobs.push_back(blobs[b]);
    if (track.length() >= params_.max_frames) {
      end_track(std::move(track));
    } else {
      still_active.push_back(std::move(track));
    }
  }
  active_ = std::move(still_active);
}

std::vector<Track> Tracker::finalize() {
  for (auto& t : active_) end_track(std::move(t));
  active_.clear();
  std::vector<Track> out = std::move(finished_);
  finished_.clear();
  std::sort(out.begin(), out.end(), [](const Track& a, const Track& b) {
    return std::make_tuple(a.first_time(), a.id) < std::make_tuple(b.first_time(), b.id);
  });
  return out;
}

}  // namespace blobtrack
