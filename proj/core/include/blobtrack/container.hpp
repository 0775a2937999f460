#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "blobtrack/mesh.hpp"

namespace blobtrack {

// Frame container: a text header of "key: value" lines closed by a blank line,
// then the mesh and F frame payloads ordered by (time, plane). See
// docs/container_format.md for the byte layout.
inline constexpr std::string_view kContainerMagic = "blobtrack-frames";
inline constexpr int kContainerVersion = 1;

enum class PayloadEncoding { binary, text };

struct ContainerHeader {
  int version = kContainerVersion;
  PayloadEncoding encoding = PayloadEncoding::binary;
  std::size_t vertex_count = 0;
  std::size_t triangle_count = 0;
  std::size_t frame_count = 0;  // total payload arrays = times * planes
  std::size_t plane_count = 1;
  double dt = 2.5e-6;
  std::string units = "r,z: m; values: electron density (arbitrary units)";

  std::size_t time_count() const { return plane_count == 0 ? 0 : frame_count / plane_count; }
};

// Whole container in memory. frames[(t - 1) * plane_count + p] is time t,
// plane p.
struct FrameContainer {
  ContainerHeader header;
  TriMesh mesh;
  std::vector<std::vector<double>> frames;
};

// Header counts are taken from `container.mesh` / `container.frames`; only
// version-independent fields (encoding, planes, dt, units) come from the header.
void write_container(const std::filesystem::path& path, const FrameContainer& container);

// Streaming reader. The mesh is loaded eagerly; frames are read on demand.
// Binary containers are checked for exact payload size on open. Text
// containers are parsed fully on open.
class ContainerReader {
 public:
  explicit ContainerReader(const std::filesystem::path& path);

  const ContainerHeader& header() const { return header_; }
  const TriMesh& mesh() const { return mesh_; }

  // Next frame in file order, or nullopt once all frames were returned.
  std::optional<Frame> next();

  // Random access; time_index is 1-based. Safe to call from several threads.
  Frame read_frame(std::int64_t time_index, int plane_index) const;

 private:
  Frame read_sequential(std::size_t index) const;

  std::filesystem::path path_;
  ContainerHeader header_;
  TriMesh mesh_;
  std::uint64_t frames_offset_ = 0;
  std::vector<std::vector<double>> text_frames_;
  std::size_t cursor_ = 0;
  mutable std::mutex mutex_;
  mutable std::ifstream stream_;
};

FrameContainer read_container(const std::filesystem::path& path);

}  // namespace blobtrack
