#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blobtrack/container.hpp"
#include "blobtrack/detect.hpp"
#include "blobtrack/mesh.hpp"
#include "blobtrack/params.hpp"
#include "blobtrack/track.hpp"

namespace blobtrack {

// Where frames come from. load() must be safe to call concurrently.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual const TriMesh& mesh() const = 0;
  virtual std::size_t time_count() const = 0;
  virtual std::size_t plane_count() const = 0;
  virtual double dt() const = 0;
  // All planes of one (1-based) time index.
  virtual std::vector<Frame> load(std::int64_t time_index) const = 0;
};

class MemorySource final : public FrameSource {
 public:
  explicit MemorySource(FrameContainer container);

  const TriMesh& mesh() const override { return container_.mesh; }
  std::size_t time_count() const override { return container_.header.time_count(); }
  std::size_t plane_count() const override { return container_.header.plane_count; }
  double dt() const override { return container_.header.dt; }
  std::vector<Frame> load(std::int64_t time_index) const override;

 private:
  FrameContainer container_;
};

class ContainerSource final : public FrameSource {
 public:
  explicit ContainerSource(const std::filesystem::path& path) : reader_(path) {}

  const TriMesh& mesh() const override { return reader_.mesh(); }
  std::size_t time_count() const override { return reader_.header().time_count(); }
  std::size_t plane_count() const override { return reader_.header().plane_count; }
  double dt() const override { return reader_.header().dt; }
  std::vector<Frame> load(std::int64_t time_index) const override;

 private:
  ContainerReader reader_;
};

// Weak-scaling input: time 1 is the base baseline, later times cycle through
// the base source's frames 2..N so the dataset can grow without bound.
class ReplicatedSource final : public FrameSource {
 public:
  ReplicatedSource(const FrameSource& base, std::size_t time_count);

  const TriMesh& mesh() const override { return base_.mesh(); }
  std::size_t time_count() const override { return time_count_; }
  std::size_t plane_count() const override { return base_.plane_count(); }
  double dt() const override { return base_.dt(); }
  std::vector<Frame> load(std::int64_t time_index) const override;

 private:
  const FrameSource& base_;
  std::size_t time_count_;
};

struct FrameRange {
  std::size_t begin = 0;  // offsets into the frame list, half-open
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

// Static schedule: contiguous ranges whose sizes differ by at most one, larger
// ranges first.
std::vector<FrameRange> partition(std::size_t frame_count, std::size_t worker_count);

struct RunConfig {
  std::optional<RegionOfInterest> roi;  // whole mesh when absent
  std::int64_t t_start = 1;
  std::int64_t t_end = 0;  // 0 means the last frame of the source
  std::size_t workers = 1;
  Parameters params;
  // Receives one line per notable event (skipped frames). May be empty.
  std::function<void(std::string_view)> log;
};

// Result of one time index across all planes.
struct FrameResult {
  std::int64_t time_index = 0;
  std::vector<Blob> blobs;  // ordered by plane, then id
  std::vector<FrameStats> stats;  // per plane (identical entries when pooled)
  std::optional<std::string> error;  // set when the frame was skipped
};

struct TimingReport {
  std::vector<std::int64_t> frame_times;   // time indices, ascending
  std::vector<double> frame_seconds;       // detection wall time per frame
  double total_seconds = 0.0;              // whole run incl. baseline preparation
  double baseline_seconds = 0.0;           // loading and preparing the shared baseline
  std::vector<std::size_t> frames_per_worker;
  std::vector<double> worker_seconds;      // busy time per worker
};

struct RunResult {
  std::vector<FrameResult> frames;  // ascending time
  std::vector<Track> tracks;
  TimingReport timing;
};

// Shared, immutable per-run state: restricted (and refined) mesh plus the
// normalized-against baseline. process() is const and thread-safe.
class FrameProcessor {
 public:
  FrameProcessor(const TriMesh& mesh, std::span<const Frame> baseline_planes,
                 const std::optional<RegionOfInterest>& roi, const Parameters& params);

  // Detection, labeling and geometry for every plane of one time index.
  // Throws blobtrack::Error on degenerate frames.
  FrameResult process(std::span<const Frame> planes) const;

  const TriMesh& analysis_mesh() const;
  const TriMesh& restricted_mesh() const { return restriction_.mesh; }

 private:
  Parameters params_;
  Restriction restriction_;
  std::optional<Refinement> refinement_;
  std::vector<std::vector<double>> baseline_;  // restricted, per plane
};

// Detect -> label -> geometry in parallel over frames, tracking in time
// order on the calling thread. Results do not depend on worker count.
RunResult run(const RunConfig& config, const FrameSource& source);

enum class ScalingMode { strong, weak };

struct ScalingRow {
  std::size_t workers = 0;
  std::size_t frames = 0;
  double seconds = 0.0;           // wall time excluding baseline preparation
  double baseline_seconds = 0.0;
  double speedup = 0.0;
  double efficiency = 0.0;
};

// Strong mode: `frames` total frames for every worker count; speedup T1/TP,
// efficiency speedup/P. Weak mode: `frames` frames per worker (data replicated
// from the source); efficiency T1/TP, scaled speedup P*T1/TP. A single-worker
// reference run is always measured first and reported as the first row.
std::vector<ScalingRow> benchmark(const RunConfig& config, const FrameSource& source,
                                  std::span<const std::size_t> worker_counts, ScalingMode mode,
                                  std::size_t frames);

}  // namespace blobtrack
