#include "blobtrack/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "blobtrack/error.hpp"

namespace blobtrack {
namespace {

// Ring-shaped background, about 1.0 everywhere, peaking at 1.2.
double background(const Point2& p, const SyntheticSpec& spec) {
  const double rc = 0.5 * (spec.r_min + spec.r_max);
  const double zc = 0.5 * (spec.z_min + spec.z_max);
  const double ring = 0.3 * std::min(spec.r_max - spec.r_min, spec.z_max - spec.z_min);
  const double rho = std::hypot(p.r - rc, p.z - zc);
  const double d = (rho - ring) / (0.5 * ring);
  return 1.0 + 0.2 * std::exp(-d * d);
}

double bump_shape(const Point2& p, const Point2& center, double width) {
  const double dr = p.r - center.r;
  const double dz = p.z - center.z;
  return std::exp(-(dr * dr + dz * dz) / (2.0 * width * width));
}

}  // namespace

void SyntheticSpec::validate() const {
  if (!(r_min < r_max) || !(z_min < z_max)) throw ArgumentError("synthetic domain bounds must be increasing");
  if (!(spacing > 0.0)) throw ArgumentError("mesh spacing must be > 0");
  if (!(width > spacing)) throw ArgumentError("bump width must exceed the mesh spacing");
  if (!(noise_sigma >= 0.0)) throw ArgumentError("noise sigma must be >= 0");
  if (frames < 1 || planes < 1) throw ArgumentError("need at least one frame and one plane");
  if (!(dt > 0.0)) throw ArgumentError("dt must be > 0");
  if (!(amplitude_min > 0.0) || amplitude_max < amplitude_min) {
    throw ArgumentError("need 0 < amplitude_min <= amplitude_max");
  }
  if (!(std::hypot(drift_r, drift_z) < max_drift)) {
    throw ArgumentError("drift per frame must stay below max_drift for the bumps to be trackable");
  }
  if (bumps > 0) {
    const double slot = (r_max - r_min) / static_cast<double>(bumps + 1);
    if (slot < 4.0 * width * (1.0 - 1e-9)) throw ArgumentError("too many bumps for the radial extent of the domain");
  }
}

Point2 BumpTruth::center_at(std::int64_t time_index) const {
  const double dt = static_cast<double>(time_index) - reference_time;
  return {reference.r + drift_r * dt, reference.z + drift_z * dt};
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);

  const auto nr = static_cast<std::size_t>(std::llround((spec.r_max - spec.r_min) / spec.spacing)) + 1;
  const auto nz = static_cast<std::size_t>(std::llround((spec.z_max - spec.z_min) / spec.spacing)) + 1;

  SyntheticData data;
  auto& container = data.container;
  container.mesh = make_grid_mesh(spec.r_min, spec.r_max, spec.z_min, spec.z_max, nr, nz);
  container.header.plane_count = spec.planes;
  container.header.dt = spec.dt;
  container.header.units = "r,z: synthetic length units; values: synthetic density";
  const auto& mesh = container.mesh;
  const std::size_t V = mesh.vertex_count();

  auto& truth = data.truth;
  truth.spec = spec;
  const double slot = (spec.r_max - spec.r_min) / static_cast<double>(spec.bumps + 1);
  const double z_mid = 0.5 * (spec.z_min + spec.z_max);
  // Bumps exist for times 2..frames; their paths are centered on that window.
  const double t_mid = 0.5 * (2.0 + static_cast<double>(spec.frames));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < spec.bumps; ++k) {
    BumpTruth b;
    b.id = k + 1;
    b.amplitude = spec.amplitude_min + (spec.amplitude_max - spec.amplitude_min) * unit(rng);
    b.width = spec.width;
    const double jitter_r = (unit(rng) - 0.5) * 0.2 * slot;
    const double jitter_z = (unit(rng) - 0.5) * 2.0 * spec.width;
    b.reference = {spec.r_min + slot * static_cast<double>(k + 1) + jitter_r, z_mid + jitter_z};
    b.reference_time = t_mid;
    b.drift_r = spec.drift_r;
    b.drift_z = spec.drift_z;
    for (const auto t : {2.0, static_cast<double>(spec.frames)}) {
      const Point2 c = b.center_at(static_cast<std::int64_t>(t));
      if (c.r < spec.r_min + 2.0 * b.width || c.r > spec.r_max - 2.0 * b.width ||
          c.z < spec.z_min + 2.0 * b.width || c.z > spec.z_max - 2.0 * b.width) {
        throw ArgumentError("bump trajectories leave the domain; enlarge it or reduce drift/frames");
      }
    }
    truth.bumps.push_back(b);
  }

  std::vector<double> base(V);
  for (std::size_t i = 0; i < V; ++i) base[i] = background(mesh.vertices[i], spec);

  std::normal_distribution<double> noise(0.0, 1.0);
  container.frames.reserve(spec.frames * spec.planes);
  truth.frames.reserve(spec.frames);
  for (std::size_t t = 1; t <= spec.frames; ++t) {
    FrameTruth ft;
    ft.time_index = static_cast<std::int64_t>(t);
    std::vector<double> clean = base;
    if (t >= 2) {
      for (const auto& b : truth.bumps) {
        const Point2 c = b.center_at(ft.time_index);
        ft.centers.push_back(c);
        std::vector<VertexId> members;
        const double label_floor = std::max(3.0 * spec.noise_sigma, 1e-2 * b.amplitude);
        for (std::size_t i = 0; i < V; ++i) {
          const double excess = base[i] * b.amplitude * bump_shape(mesh.vertices[i], c, b.width);
          clean[i] += excess;
          if (excess >= label_floor) members.push_back(static_cast<VertexId>(i));
        }
        ft.members.push_back(std::move(members));
      }
    }
    for (std::size_t p = 0; p < spec.planes; ++p) {
      std::vector<double> values(V);
      for (std::size_t i = 0; i < V; ++i) values[i] = clean[i] + spec.noise_sigma * noise(rng);
      container.frames.push_back(std::move(values));
    }
    truth.frames.push_back(std::move(ft));
  }
  container.header.vertex_count = V;
  container.header.triangle_count = mesh.triangle_count();
  container.header.frame_count = container.frames.size();
  return data;
}

std::string to_json(const GroundTruth& truth) {
  using nlohmann::ordered_json;
  const auto& s = truth.spec;
  ordered_json j;
  j["spec"] = {{"bumps", s.bumps},         {"drift_r", s.drift_r},   {"drift_z", s.drift_z},
               {"noise_sigma", s.noise_sigma}, {"frames", s.frames},     {"planes", s.planes},
               {"spacing", s.spacing},     {"r_min", s.r_min},       {"r_max", s.r_max},
               {"z_min", s.z_min},         {"z_max", s.z_max},       {"amplitude_min", s.amplitude_min},
               {"amplitude_max", s.amplitude_max}, {"width", s.width}, {"dt", s.dt},
               {"seed", s.seed}};
  ordered_json bumps = ordered_json::array();
  for (const auto& b : truth.bumps) {
    bumps.push_back({{"id", b.id},
                     {"amplitude", b.amplitude},
                     {"width", b.width},
                     {"reference_center", {b.reference.r, b.reference.z}},
                     {"reference_time", b.reference_time},
                     {"drift_per_frame", {b.drift_r, b.drift_z}}});
  }
  j["bumps"] = std::move(bumps);
  ordered_json frames = ordered_json::array();
  for (const auto& f : truth.frames) {
    ordered_json centers = ordered_json::array();
    for (const auto& c : f.centers) centers.push_back({c.r, c.z});
    frames.push_back({{"time", f.time_index}, {"centers", std::move(centers)}, {"members", f.members}});
  }
  j["frames"] = std::move(frames);
  return j.dump();
}

}  // namespace blobtrack
