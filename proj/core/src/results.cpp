#include "blobtrack/results.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "blobtrack/error.hpp"
#include "format_number.hpp"

namespace blobtrack {
namespace {

using detail::format_double;
using nlohmann::ordered_json;

constexpr int kRecordVersion = 1;

ordered_json point(const Point2& p) { return ordered_json::array({p.r, p.z}); }

ordered_json blob_record(const Blob& b) {
  ordered_json hull = ordered_json::array();
  for (const auto& p : b.summary.hull) hull.push_back(point(p));
  return {{"frame", b.time_index},
          {"plane", b.plane_index},
          {"id", b.id},
          {"center", point(b.summary.center)},
          {"area", b.summary.area},
          {"median", b.median},
          {"mass", b.summary.mass},
          {"hull_area", b.summary.hull_area},
          {"hull", std::move(hull)}};
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_blob_records(std::ostream& out, std::span<const FrameResult> frames) {
  out << ordered_json{{"format", "blobtrack-blobs"}, {"version", kRecordVersion}}.dump() << '\n';
  for (const auto& f : frames) {
    for (const auto& b : f.blobs) out << blob_record(b).dump() << '\n';
  }
}

void write_track_records(std::ostream& out, std::span<const Track> tracks) {
  out << ordered_json{{"format", "blobtrack-tracks"}, {"version", kRecordVersion}}.dump() << '\n';
  for (const auto& t : tracks) {
    ordered_json frames = ordered_json::array();
    ordered_json blob_ids = ordered_json::array();
    ordered_json centers = ordered_json::array();
    ordered_json areas = ordered_json::array();
    for (const auto& b : t.blobs) {
      frames.push_back(b.time_index);
      blob_ids.push_back(b.id);
      centers.push_back(point(b.summary.center));
      areas.push_back(b.summary.area);
    }
    ordered_json velocities = ordered_json::array();
    for (const auto& v : t.velocities) velocities.push_back({v.dr, v.dz});
    const auto mean = t.mean_velocity();
    const ordered_json record{{"id", t.id},
                              {"plane", t.plane_index},
                              {"first_frame", t.first_time()},
                              {"last_frame", t.last_time()},
                              {"length", t.length()},
                              {"frames", std::move(frames)},
                              {"blob_ids", std::move(blob_ids)},
                              {"centers", std::move(centers)},
                              {"areas", std::move(areas)},
                              {"velocities", std::move(velocities)},
                              {"mean_velocity", {mean.dr, mean.dz}},
                              {"last_hull", blob_record(t.tail())["hull"]}};
    out << record.dump() << '\n';
  }
}

void write_center_table(std::ostream& out, std::span<const FrameResult> frames) {
  out << "frame,plane,id,r,z,area,median\n";
  for (const auto& f : frames) {
    for (const auto& b : f.blobs) {
      out << b.time_index << ',' << b.plane_index << ',' << b.id << ',' << format_double(b.summary.center.r) << ','
          << format_double(b.summary.center.z) << ',' << b.summary.area << ',' << format_double(b.median) << '\n';
    }
  }
}

void write_scaling_table(std::ostream& out, std::span<const ScalingRow> rows) {
  out << "workers\tframes\tseconds\tbaseline_seconds\tspeedup\tefficiency\n";
  for (const auto& r : rows) {
    out << r.workers << '\t' << r.frames << '\t' << format_double(r.seconds) << '\t'
        << format_double(r.baseline_seconds) << '\t' << format_double(r.speedup) << '\t'
        << format_double(r.efficiency) << '\n';
  }
}

void write_scaling_records(std::ostream& out, std::span<const ScalingRow> rows) {
  for (const auto& r : rows) {
    out << ordered_json{{"workers", r.workers},
                        {"frames", r.frames},
                        {"seconds", r.seconds},
                        {"baseline_seconds", r.baseline_seconds},
                        {"speedup", r.speedup},
                        {"efficiency", r.efficiency}}
               .dump()
        << '\n';
  }
}

void write_timing_table(std::ostream& out, const TimingReport& timing) {
  out << "# total_seconds\t" << format_double(timing.total_seconds) << '\n'
      << "# baseline_seconds\t" << format_double(timing.baseline_seconds) << '\n';
  for (std::size_t w = 0; w < timing.frames_per_worker.size(); ++w) {
    out << "# worker\t" << w << '\t' << timing.frames_per_worker[w] << "\t"
        << format_double(w < timing.worker_seconds.size() ? timing.worker_seconds[w] : 0.0) << '\n';
  }
  out << "frame\tseconds\n";
  for (std::size_t i = 0; i < timing.frame_times.size(); ++i) {
    out << timing.frame_times[i] << '\t' << format_double(timing.frame_seconds[i]) << '\n';
  }
}

ResultFiles write_results(std::span<const FrameResult> frames, std::span<const Track> tracks,
                          const std::filesystem::path& prefix) {
  ResultFiles files{prefix.string() + "blobs.jsonl", prefix.string() + "tracks.jsonl",
                    prefix.string() + "centers.csv"};
  {
    auto out = open_for_write(files.blobs);
    write_blob_records(out, frames);
  }
  {
    auto out = open_for_write(files.tracks);
    write_track_records(out, tracks);
  }
  {
    auto out = open_for_write(files.centers);
    write_center_table(out, frames);
  }
  return files;
}

std::string canonical_serialization(std::span<const FrameResult> frames, std::span<const Track> tracks) {
  std::ostringstream out;
  write_blob_records(out, frames);
  write_track_records(out, tracks);
  return out.str();
}

}  // namespace blobtrack
