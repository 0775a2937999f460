#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "blobtrack/geometry.hpp"
#include "blobtrack/mesh.hpp"

namespace blobtrack {

// An accepted blob in one (time, plane) frame.
struct Blob {
  std::int64_t time_index = 0;
  int plane_index = 0;
  std::uint32_t id = 0;  // 1-based within its (time, plane) frame
  BlobSummary summary;
  double median = 0.0;
  std::vector<VertexId> members;
};

enum class AreaChangeMode {
  absolute,  // |a1 - a0| <= max_area_change (vertex count)
  relative,  // |a1 - a0| <= max_area_change percent of a0
};

// Reference tracking criteria: maxAreaChange 25, maxJump 0.04,
// maxFrames 100, minFrames 3.
struct TrackParams {
  double max_jump = 0.04;
  double max_area_change = 25.0;
  std::size_t min_frames = 3;
  std::size_t max_frames = 100;
  AreaChangeMode area_mode = AreaChangeMode::absolute;

  void validate() const;
};

struct Velocity {
  double dr = 0.0;  // length units per second
  double dz = 0.0;
};

enum class TrackStatus { active, ended };

struct Track {
  std::uint64_t id = 0;
  int plane_index = 0;
  TrackStatus status = TrackStatus::active;
  std::vector<Blob> blobs;  // consecutive time indices
  std::vector<Velocity> velocities;  // one per consecutive pair

  std::size_t length() const { return blobs.size(); }
  std::int64_t first_time() const { return blobs.front().time_index; }
  std::int64_t last_time() const { return blobs.back().time_index; }
  const Blob& tail() const { return blobs.back(); }
  Velocity mean_velocity() const;
};

double center_distance(const Blob& a, const Blob& b);

// Both gates of the association test.
bool gates_pass(const Blob& tail, const Blob& candidate, const TrackParams& params);

// Greedy association of one frame's blobs against the tails of active tracks:
// among all gate-passing pairs, the globally closest is committed first, then
// both sides are removed. Ties break on lower blob id, then lower track id.
// result[i] is the index into `tracks` matched to blobs[i], if any.
// Throws ContractError if `blobs` mixes time indices.
std::vector<std::optional<std::size_t>> match(std::span<const Blob> blobs, std::span<const Track> tracks,
                                              const TrackParams& params);

// Sequential track state machine. Feed every frame's blobs in strictly
// increasing time order, then call finalize().
class Tracker {
 public:
  Tracker(TrackParams params, double dt);

  // All blobs of one time index (any planes). An empty span is a blob-free
  // frame and ends every active track.
  void step(std::int64_t time_index, std::span<const Blob> blobs);

  // End all active tracks, drop those shorter than min_frames, and return the
  // kept tracks sorted by first time index, then id.
  std::vector<Track> finalize();

  std::span<const Track> active() const { return active_; }
  std::span<const Track> finished() const { return finished_; }

 private:
  void end_track(Track&& track);

  TrackParams params_;
  double dt_;
  std::optional<std::int64_t> last_time_;
  std::uint64_t next_id_ = 1;
  std::vector<Track> active_;
  std::vector<Track> finished_;
};

}  // namespace blobtrack
