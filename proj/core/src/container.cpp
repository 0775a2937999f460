#include "blobtrack/container.hpp"

#include <charconv>
#include <cmath>
#include <iterator>
#include <map>
#include <sstream>

#include "blobtrack/error.hpp"
#include "byte_order.hpp"
#include "format_number.hpp"

namespace blobtrack {
namespace {

using detail::format_double;
using detail::load_le;
using detail::store_le;

constexpr std::uint64_t kCoordBytes = 16;    // r, z as float64
constexpr std::uint64_t kTriangleBytes = 12;  // 3 x uint32
constexpr std::uint64_t kScalarBytes = 8;

std::string_view to_string(PayloadEncoding e) { return e == PayloadEncoding::text ? "text" : "binary"; }

std::string at_offset(std::uint64_t offset) { return " (byte offset " + std::to_string(offset) + ")"; }

template <typename T>
T parse_number(const std::string& text, const std::string& key, std::uint64_t offset) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw InputError("header field '" + key + "' has invalid value '" + text + "'" + at_offset(offset));
  }
  return value;
}

struct ParsedHeader {
  ContainerHeader header;
  std::uint64_t size = 0;  // bytes including the terminating blank line
};

ParsedHeader parse_header(std::istream& in) {
  ParsedHeader out;
  std::string line;
  std::uint64_t offset = 0;

  if (!std::getline(in, line) || line != kContainerMagic) {
    throw InputError("not a blobtrack frame container: missing '" + std::string(kContainerMagic) + "' magic line" +
                     at_offset(0));
  }
  offset += line.size() + 1;

  std::map<std::string, std::pair<std::string, std::uint64_t>> fields;
  bool terminated = false;
  while (std::getline(in, line)) {
    const auto line_offset = offset;
    offset += line.size() + 1;
    if (line.empty()) {
      terminated = true;
      break;
    }
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw InputError("malformed header line '" + line + "'" + at_offset(line_offset));
    std::string key = line.substr(0, colon);
    std::string value = line.substr(colon + 1);
    if (!value.empty() && value.front() == ' ') value.erase(0, 1);
    fields[key] = {value, line_offset};
  }
  if (!terminated) throw InputError("header is not terminated by a blank line" + at_offset(offset));

  auto require = [&](const std::string& key) -> const std::pair<std::string, std::uint64_t>& {
    const auto it = fields.find(key);
    if (it == fields.end()) throw InputError("header is missing required field '" + key + "'");
    return it->second;
  };

  auto& h = out.header;
  const auto& [version_text, version_offset] = require("version");
  h.version = parse_number<int>(version_text, "version", version_offset);
  if (h.version != kContainerVersion) {
    throw InputError("unsupported container version " + std::to_string(h.version) + at_offset(version_offset));
  }
  for (const auto& [key, value] : fields) {
    const auto& [text, at] = value;
    if (key == "version") {
    } else if (key == "encoding") {
      if (text == "binary") {
        h.encoding = PayloadEncoding::binary;
      } else if (text == "text") {
        h.encoding = PayloadEncoding::text;
      } else {
        throw InputError("unknown payload encoding '" + text + "'" + at_offset(at));
      }
    } else if (key == "vertices") {
      h.vertex_count = parse_number<std::size_t>(text, key, at);
    } else if (key == "triangles") {
      h.triangle_count = parse_number<std::size_t>(text, key, at);
    } else if (key == "frames") {
      h.frame_count = parse_number<std::size_t>(text, key, at);
    } else if (key == "planes") {
      h.plane_count = parse_number<std::size_t>(text, key, at);
    } else if (key == "dt") {
      h.dt = parse_number<double>(text, key, at);
    } else if (key == "units") {
      h.units = text;
    } else {
      throw InputError("unknown header field '" + key + "'" + at_offset(at));
    }
  }
  require("vertices");
  require("triangles");
  require("frames");
  if (h.plane_count == 0 || h.frame_count % h.plane_count != 0) {
    throw InputError("frame count " + std::to_string(h.frame_count) + " is not a multiple of plane count " +
                     std::to_string(h.plane_count));
  }
  if (!(h.dt > 0.0) || !std::isfinite(h.dt)) throw InputError("header dt must be a positive finite number");
  out.size = offset;
  return out;
}

void check_mesh(const TriMesh& mesh, std::uint64_t mesh_offset) {
  try {
    validate_topology(mesh);
  } catch (const StructuralError& e) {
    throw InputError(std::string("invalid mesh payload: ") + e.what() + at_offset(mesh_offset));
  }
}

// Whitespace-separated token cursor over the text payload.
class TokenReader {
 public:
  TokenReader(std::string text, std::uint64_t base) : text_(std::move(text)), base_(base) {}

  template <typename T>
  T next(const char* what) {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const auto start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) {
      throw InputError(std::string("text payload ended early while reading ") + what + at_offset(base_ + start));
    }
    T value{};
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc{} || res.ptr != text_.data() + pos_) {
      throw InputError(std::string("invalid ") + what + " '" + text_.substr(start, pos_ - start) + "'" +
                       at_offset(base_ + start));
    }
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(value)) throw InputError(std::string("non-finite ") + what + at_offset(base_ + start));
    }
    return value;
  }

  bool exhausted() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return pos_ == text_.size();
  }
  std::uint64_t offset() const { return base_ + pos_; }

 private:
  std::string text_;
  std::uint64_t base_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_container(const std::filesystem::path& path, const FrameContainer& container) {
  const auto& mesh = container.mesh;
  const std::size_t planes = container.header.plane_count;
  if (planes == 0 || container.frames.size() % planes != 0) {
    throw ArgumentError("frame count must be a multiple of the plane count");
  }
  for (const auto& f : container.frames) {
    if (f.size() != mesh.vertex_count()) throw ArgumentError("frame length does not match the vertex count");
  }
  validate_topology(mesh);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");

  const auto encoding = container.header.encoding;
  out << kContainerMagic << '\n'
      << "version: " << kContainerVersion << '\n'
      << "encoding: " << to_string(encoding) << '\n'
      << "vertices: " << mesh.vertex_count() << '\n'
      << "triangles: " << mesh.triangle_count() << '\n'
      << "frames: " << container.frames.size() << '\n'
      << "planes: " << planes << '\n'
      << "dt: " << format_double(container.header.dt) << '\n'
      << "units: " << container.header.units << '\n'
      << '\n';

  if (encoding == PayloadEncoding::text) {
    for (const auto& v : mesh.vertices) out << format_double(v.r) << ' ' << format_double(v.z) << '\n';
    for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (const auto& f : container.frames) {
      for (std::size_t i = 0; i < f.size(); ++i) out << (i ? " " : "") << format_double(f[i]);
      out << '\n';
    }
  } else {
    std::vector<unsigned char> buf(mesh.vertex_count() * kCoordBytes);
    for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
      store_le(&buf[i * kCoordBytes], mesh.vertices[i].r);
      store_le(&buf[i * kCoordBytes + 8], mesh.vertices[i].z);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    buf.assign(mesh.triangle_count() * kTriangleBytes, 0);
    for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
      for (int k = 0; k < 3; ++k) store_le(&buf[i * kTriangleBytes + 4 * k], mesh.triangles[i][k]);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    buf.assign(mesh.vertex_count() * kScalarBytes, 0);
    for (const auto& f : container.frames) {
      for (std::size_t i = 0; i < f.size(); ++i) store_le(&buf[i * kScalarBytes], f[i]);
      out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
  }
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

ContainerReader::ContainerReader(const std::filesystem::path& path)
    : path_(path), stream_(path, std::ios::binary) {
  if (!stream_) throw InputError("cannot open '" + path.string() + "'");
  auto parsed = parse_header(stream_);
  header_ = parsed.header;
  const std::uint64_t header_size = parsed.size;
  const std::uint64_t V = header_.vertex_count;
  const std::uint64_t T = header_.triangle_count;
  const std::uint64_t F = header_.frame_count;

  if (header_.encoding == PayloadEncoding::text) {
    std::string rest((std::istreambuf_iterator<char>(stream_)), std::istreambuf_iterator<char>());
    TokenReader tokens(std::move(rest), header_size);
    const auto mesh_offset = tokens.offset();
    mesh_.vertices.resize(V);
    for (auto& v : mesh_.vertices) {
      v.r = tokens.next<double>("vertex coordinate");
      v.z = tokens.next<double>("vertex coordinate");
    }
    mesh_.triangles.resize(T);
    for (auto& t : mesh_.triangles) {
      for (auto& idx : t) idx = tokens.next<VertexId>("triangle index");
    }
    check_mesh(mesh_, mesh_offset);
    text_frames_.assign(F, std::vector<double>(V));
    for (auto& f : text_frames_) {
      for (auto& x : f) x = tokens.next<double>("frame value");
    }
    if (!tokens.exhausted()) throw InputError("trailing data after the last frame" + at_offset(tokens.offset()));
    mesh_ = build_edges(std::move(mesh_)).mesh;
    return;
  }

  const std::uint64_t expected = V * kCoordBytes + T * kTriangleBytes + F * V * kScalarBytes;
  const std::uint64_t file_size = std::filesystem::file_size(path);
  const std::uint64_t actual = file_size >= header_size ? file_size - header_size : 0;
  if (actual != expected) {
    throw InputError("payload size mismatch: header implies " + std::to_string(expected) +
                     " bytes after the header, file has " + std::to_string(actual) + at_offset(header_size));
  }

  std::vector<unsigned char> buf(V * kCoordBytes);
  stream_.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  mesh_.vertices.resize(V);
  for (std::uint64_t i = 0; i < V; ++i) {
    const double r = load_le<double>(&buf[i * kCoordBytes]);
    const double z = load_le<double>(&buf[i * kCoordBytes + 8]);
    if (!std::isfinite(r) || !std::isfinite(z)) {
      throw InputError("non-finite vertex coordinate" + at_offset(header_size + i * kCoordBytes));
    }
    mesh_.vertices[i] = {r, z};
  }
  buf.resize(T * kTriangleBytes);
  stream_.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  mesh_.triangles.resize(T);
  for (std::uint64_t i = 0; i < T; ++i) {
    for (int k = 0; k < 3; ++k) mesh_.triangles[i][k] = load_le<std::uint32_t>(&buf[i * kTriangleBytes + 4 * k]);
  }
  if (!stream_) throw InputError("failed reading mesh payload from '" + path.string() + "'");
  check_mesh(mesh_, header_size + V * kCoordBytes);
  mesh_ = build_edges(std::move(mesh_)).mesh;
  frames_offset_ = header_size + V * kCoordBytes + T * kTriangleBytes;
}

Frame ContainerReader::read_sequential(std::size_t index) const {
  const std::size_t planes = header_.plane_count;
  Frame frame;
  frame.time_index = static_cast<std::int64_t>(index / planes) + 1;
  frame.plane_index = static_cast<int>(index % planes);
  frame.dt = header_.dt;

  if (header_.encoding == PayloadEncoding::text) {
    frame.values = text_frames_[index];
    return frame;
  }

  const std::uint64_t V = header_.vertex_count;
  const std::uint64_t offset = frames_offset_ + index * V * kScalarBytes;
  std::vector<unsigned char> buf(V * kScalarBytes);
  {
    std::lock_guard lock(mutex_);
    stream_.clear();
    stream_.seekg(static_cast<std::streamoff>(offset));
    stream_.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!stream_) throw InputError("failed reading frame " + std::to_string(index) + at_offset(offset));
  }
  frame.values.resize(V);
  for (std::uint64_t i = 0; i < V; ++i) {
    const double x = load_le<double>(&buf[i * kScalarBytes]);
    if (!std::isfinite(x)) throw InputError("non-finite frame value" + at_offset(offset + i * kScalarBytes));
    frame.values[i] = x;
  }
  return frame;
}

std::optional<Frame> ContainerReader::next() {
  if (cursor_ >= header_.frame_count) return std::nullopt;
  return read_sequential(cursor_++);
}

Frame ContainerReader::read_frame(std::int64_t time_index, int plane_index) const {
  if (time_index < 1 || static_cast<std::size_t>(time_index) > header_.time_count()) {
    throw InputError("time index " + std::to_string(time_index) + " outside container range 1.." +
                     std::to_string(header_.time_count()));
  }
  if (plane_index < 0 || static_cast<std::size_t>(plane_index) >= header_.plane_count) {
    throw InputError("plane index " + std::to_string(plane_index) + " outside container");
  }
  return read_sequential(static_cast<std::size_t>(time_index - 1) * header_.plane_count +
                         static_cast<std::size_t>(plane_index));
}

FrameContainer read_container(const std::filesystem::path& path) {
  ContainerReader reader(path);
  FrameContainer out;
  out.header = reader.header();
  out.mesh = reader.mesh();
  out.frames.reserve(out.header.frame_count);
  while (auto f = reader.next()) out.frames.push_back(std::move(f->values));
  return out;
}

}  // namespace blobtrack
