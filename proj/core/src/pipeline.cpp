#include "blobtrack/pipeline.hpp"

#include <chrono>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "blobtrack/error.hpp"
#include "blobtrack/geometry.hpp"
#include "blobtrack/label.hpp"

namespace blobtrack {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_time(std::int64_t t, std::size_t count) {
  if (t < 1 || static_cast<std::size_t>(t) > count) {
    throw InputError("frame " + std::to_string(t) + " is missing; source holds frames 1.." + std::to_string(count));
  }
}

Restriction identity_restriction(const TriMesh& mesh) {
  Restriction r;
  r.mesh = mesh.edges.empty() ? build_edges(mesh).mesh : mesh;
  r.old_to_new.resize(mesh.vertex_count());
  std::iota(r.old_to_new.begin(), r.old_to_new.end(), VertexId{0});
  r.new_to_old = r.old_to_new;
  return r;
}

}  // namespace

MemorySource::MemorySource(FrameContainer container) : container_(std::move(container)) {
  if (container_.header.plane_count == 0 || container_.frames.size() % container_.header.plane_count != 0) {
    throw ArgumentError("frame count must be a multiple of the plane count");
  }
  container_.header.frame_count = container_.frames.size();
  if (container_.mesh.edges.empty()) container_.mesh = build_edges(std::move(container_.mesh)).mesh;
}

std::vector<Frame> MemorySource::load(std::int64_t time_index) const {
  check_time(time_index, time_count());
  const auto planes = plane_count();
  std::vector<Frame> out;
  out.reserve(planes);
  for (std::size_t p = 0; p < planes; ++p) {
    out.push_back({time_index, static_cast<int>(p), dt(),
                   container_.frames[static_cast<std::size_t>(time_index - 1) * planes + p]});
  }
  return out;
}

std::vector<Frame> ContainerSource::load(std::int64_t time_index) const {
  check_time(time_index, time_count());
  std::vector<Frame> out;
  for (std::size_t p = 0; p < plane_count(); ++p) out.push_back(reader_.read_frame(time_index, static_cast<int>(p)));
  return out;
}

ReplicatedSource::ReplicatedSource(const FrameSource& base, std::size_t time_count)
    : base_(base), time_count_(time_count) {
  if (base_.time_count() < 2) throw ArgumentError("replication needs a baseline plus at least one frame");
}

std::vector<Frame> ReplicatedSource::load(std::int64_t time_index) const {
  check_time(time_index, time_count_);
  if (time_index == 1) return base_.load(1);
  const auto cycle = static_cast<std::int64_t>(base_.time_count() - 1);
  auto frames = base_.load(2 + (time_index - 2) % cycle);
  for (auto& f : frames) f.time_index = time_index;
  return frames;
}

std::vector<FrameRange> partition(std::size_t frame_count, std::size_t worker_count) {
  if (worker_count == 0) throw ArgumentError("worker count must be >= 1");
  std::vector<FrameRange> ranges(worker_count);
  const std::size_t quota = frame_count / worker_count;
  const std::size_t extra = frame_count % worker_count;
  std::size_t begin = 0;
  for (std::size_t w = 0; w < worker_count; ++w) {
    const std::size_t size = quota + (w < extra ? 1 : 0);
    ranges[w] = {begin, begin + size};
    begin += size;
  }
  return ranges;
}

FrameProcessor::FrameProcessor(const TriMesh& mesh, std::span<const Frame> baseline_planes,
                               const std::optional<RegionOfInterest>& roi, const Parameters& params)
    : params_(params), restriction_(roi ? restrict_to(mesh, *roi) : identity_restriction(mesh)) {
  params_.validate();
  if (params_.refine_levels > 0) {
    if (restriction_.mesh.triangles.empty()) throw StructuralError("region of interest contains no triangle");
    refinement_.emplace(restriction_.mesh, params_.refine_levels);
  }
  for (const auto& plane : baseline_planes) {
    auto values = restrict_field(restriction_, plane.values);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] == 0.0) {
        throw NumericalError("baseline density is zero at vertex " + std::to_string(restriction_.new_to_old[i]) +
                             " of plane " + std::to_string(plane.plane_index));
      }
    }
    baseline_.push_back(std::move(values));
  }
}

const TriMesh& FrameProcessor::analysis_mesh() const {
  return refinement_ ? refinement_->mesh() : restriction_.mesh;
}

FrameResult FrameProcessor::process(std::span<const Frame> planes) const {
  if (planes.size() != baseline_.size()) {
    throw ContractError("frame has " + std::to_string(planes.size()) + " planes, baseline has " +
                        std::to_string(baseline_.size()));
  }
  FrameResult result;
  result.time_index = planes.empty() ? 0 : planes.front().time_index;

  std::vector<std::vector<double>> fields;
  fields.reserve(planes.size());
  for (std::size_t p = 0; p < planes.size(); ++p) {
    auto normalized = normalize(restrict_field(restriction_, planes[p].values), baseline_[p]);
    fields.push_back(refinement_ ? refinement_->apply(normalized) : std::move(normalized));
  }

  std::vector<Detection> detections;
  if (params_.detection.pooling == Pooling::pooled_across_planes) {
    std::vector<std::span<const double>> views(fields.begin(), fields.end());
    detections = detect_normalized_pooled(views, params_.detection);
  } else {
    for (const auto& f : fields) detections.push_back(detect_normalized(f, params_.detection));
  }

  const TriMesh& mesh = analysis_mesh();
  for (std::size_t p = 0; p < planes.size(); ++p) {
    const auto& det = detections[p];
    result.stats.push_back(det.stats);
    auto components = label_components(mesh, det.set.candidates);
    compute_medians(components, fields[p]);
    auto accepted = accept_blobs(std::move(components), det.stats.mu2, params_.blob);
    std::uint32_t id = 0;
    for (auto& c : accepted) {
      Blob blob;
      blob.time_index = planes[p].time_index;
      blob.plane_index = planes[p].plane_index;
      blob.id = ++id;
      blob.summary = summarize(mesh, fields[p], c.members);
      blob.median = c.median;
      blob.members = std::move(c.members);
      result.blobs.push_back(std::move(blob));
    }
  }
  return result;
}

RunResult run(const RunConfig& config, const FrameSource& source) {
  const auto run_start = Clock::now();
  if (config.workers == 0) throw ArgumentError("worker count must be >= 1");
  const auto count = source.time_count();
  const std::int64_t t_end = config.t_end == 0 ? static_cast<std::int64_t>(count) : config.t_end;
  if (config.t_start > t_end) throw ArgumentError("t_start must not exceed t_end");
  check_time(config.t_start, count);
  check_time(t_end, count);

  // The baseline is loaded and prepared once and shared read-only.
  const auto baseline_start = Clock::now();
  const auto baseline = source.load(1);
  const FrameProcessor processor(source.mesh(), baseline, config.roi, config.params);
  RunResult out;
  out.timing.baseline_seconds = seconds_since(baseline_start);

  const auto n = static_cast<std::size_t>(t_end - config.t_start + 1);
  const auto ranges = partition(n, config.workers);

  // Ordered hand-off: workers fill slots, the tracker drains them in order.
  std::mutex mutex;
  std::condition_variable ready;
  std::vector<std::optional<FrameResult>> slots(n);
  std::exception_ptr failure;
  std::vector<double> frame_seconds(n, 0.0);
  std::vector<double> worker_seconds(ranges.size(), 0.0);

  auto work = [&](std::size_t w) {
    const auto busy_start = Clock::now();
    for (std::size_t i = ranges[w].begin; i < ranges[w].end; ++i) {
      const std::int64_t t = config.t_start + static_cast<std::int64_t>(i);
      const auto frame_start = Clock::now();
      FrameResult result;
      try {
        const auto planes = source.load(t);
        result = processor.process(planes);
      } catch (const InputError&) {
        // Unreadable input aborts the run; only per-frame analysis failures skip.
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        ready.notify_all();
        return;
      } catch (const Error& e) {
        result = FrameResult{};
        result.time_index = t;
        result.error = e.what();
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        ready.notify_all();
        return;
      }
      result.time_index = t;
      frame_seconds[i] = seconds_since(frame_start);
      {
        std::lock_guard lock(mutex);
        slots[i] = std::move(result);
      }
      ready.notify_all();
    }
    worker_seconds[w] = seconds_since(busy_start);
  };

  Tracker tracker(config.params.tracking, source.dt());
  out.frames.reserve(n);
  {
    std::vector<std::jthread> workers;
    workers.reserve(ranges.size());
    for (std::size_t w = 0; w < ranges.size(); ++w) workers.emplace_back(work, w);

    for (std::size_t i = 0; i < n; ++i) {
      FrameResult result;
      {
        std::unique_lock lock(mutex);
        ready.wait(lock, [&] { return slots[i].has_value() || failure; });
        if (failure) break;
        result = std::move(*slots[i]);
        slots[i].reset();
      }
      if (result.error) {
        if (config.log) config.log("frame " + std::to_string(result.time_index) + " skipped: " + *result.error);
        tracker.step(result.time_index, {});
      } else {
        tracker.step(result.time_index, result.blobs);
      }
      out.frames.push_back(std::move(result));
    }
  }
  if (failure) std::rethrow_exception(failure);

  out.tracks = tracker.finalize();
  auto& timing = out.timing;
  for (std::size_t i = 0; i < n; ++i) timing.frame_times.push_back(config.t_start + static_cast<std::int64_t>(i));
  timing.frame_seconds = std::move(frame_seconds);
  timing.worker_seconds = std::move(worker_seconds);
  for (const auto& r : ranges) timing.frames_per_worker.push_back(r.size());
  timing.total_seconds = seconds_since(run_start);
  return out;
}

std::vector<ScalingRow> benchmark(const RunConfig& config, const FrameSource& source,
                                  std::span<const std::size_t> worker_counts, ScalingMode mode,
                                  std::size_t frames) {
  if (frames == 0) throw ArgumentError("benchmark needs at least one frame");
  auto measure = [&](std::size_t workers) {
    const std::size_t total = mode == ScalingMode::strong ? frames : frames * workers;
    const ReplicatedSource replicated(source, total + 1);
    RunConfig c = config;
    c.workers = workers;
    c.t_start = 2;
    c.t_end = static_cast<std::int64_t>(total + 1);
    const auto result = run(c, replicated);
    ScalingRow row;
    row.workers = workers;
    row.frames = total;
    row.baseline_seconds = result.timing.baseline_seconds;
    row.seconds = result.timing.total_seconds - result.timing.baseline_seconds;
    return row;
  };

  std::vector<ScalingRow> rows;
  rows.push_back(measure(1));
  const double reference = rows.front().seconds;
  for (std::size_t p : worker_counts) {
    if (p == 0) throw ArgumentError("worker count must be >= 1");
    if (p == 1) continue;
    rows.push_back(measure(p));
  }
  for (auto& row : rows) {
    const double p = static_cast<double>(row.workers);
    const double ratio = row.seconds > 0.0 ? reference / row.seconds : 0.0;
    if (mode == ScalingMode::strong) {
      row.speedup = ratio;
      row.efficiency = ratio / p;
    } else {
      row.speedup = ratio * p;
      row.efficiency = ratio;
    }
  }
  return rows;
}

}  // namespace blobtrack
