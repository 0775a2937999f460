#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>

#include "blobtrack/pipeline.hpp"
#include "blobtrack/track.hpp"

namespace blobtrack {

// One JSON object per line. The first line of each stream is a header record
// naming the format; numbers use shortest round-trip decimal form.
void write_blob_records(std::ostream& out, std::span<const FrameResult> frames);
void write_track_records(std::ostream& out, std::span<const Track> tracks);
// Comma-separated blob centers for plotting.
void write_center_table(std::ostream& out, std::span<const FrameResult> frames);

// Scaling and timing tables, tab-separated.
void write_scaling_table(std::ostream& out, std::span<const ScalingRow> rows);
void write_scaling_records(std::ostream& out, std::span<const ScalingRow> rows);
void write_timing_table(std::ostream& out, const TimingReport& timing);

struct ResultFiles {
  std::filesystem::path blobs;
  std::filesystem::path tracks;
  std::filesystem::path centers;
};

// Writes <prefix>blobs.jsonl, <prefix>tracks.jsonl and <prefix>centers.csv.
ResultFiles write_results(std::span<const FrameResult> frames, std::span<const Track> tracks,
                          const std::filesystem::path& prefix);

// Blob and track records concatenated; equal strings mean equal results.
std::string canonical_serialization(std::span<const FrameResult> frames, std::span<const Track> tracks);

}  // namespace blobtrack
