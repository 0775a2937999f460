#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "blobtrack/container.hpp"
#include "blobtrack/mesh.hpp"

namespace blobtrack {

// Synthetic ground-truth scenario: an annular background close to 1.0 with
// additive Gaussian noise, and K Gaussian bumps drifting at constant velocity.
// Frame 1 is bump-free and serves as the baseline; bumps are present from
// frame 2 on. In normalized units a bump adds amplitude * exp(-d^2 / (2 w^2)).
struct SyntheticSpec {
  std::size_t bumps = 3;
  double drift_r = 0.0;   // length units per frame
  double drift_z = 0.02;
  double noise_sigma = 0.01;
  std::size_t frames = 64;  // time frames
  std::size_t planes = 1;
  double spacing = 0.01;  // grid spacing of the generated mesh
  double r_min = 1.6;
  double r_max = 2.4;
  double z_min = -0.9;
  double z_max = 0.9;
  double amplitude_min = 1.5;
  double amplitude_max = 3.0;
  double width = 0.05;   // Gaussian sigma of a bump
  double dt = 2.5e-6;
  double max_drift = 0.04;  // trackability bound on |drift| per frame
  std::uint64_t seed = 1;

  // Throws ArgumentError on an unusable scenario.
  void validate() const;
};

struct BumpTruth {
  std::size_t id = 0;
  double amplitude = 0.0;
  double width = 0.0;
  Point2 reference;       // center at reference_time
  double reference_time = 0.0;
  double drift_r = 0.0;   // per frame
  double drift_z = 0.0;

  Point2 center_at(std::int64_t time_index) const;
};

struct FrameTruth {
  std::int64_t time_index = 0;
  std::vector<Point2> centers;                 // per bump; empty for the baseline
  std::vector<std::vector<VertexId>> members;  // per bump, vertices > 3 noise sigma above background
};

struct GroundTruth {
  SyntheticSpec spec;
  std::vector<BumpTruth> bumps;
  std::vector<FrameTruth> frames;  // index t - 1
};

struct SyntheticData {
  FrameContainer container;
  GroundTruth truth;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Deterministic JSON rendering of the ground truth.
std::string to_json(const GroundTruth& truth);

}  // namespace blobtrack
