#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "blobtrack/mesh.hpp"

namespace blobtrack {

// One byte per vertex; nonzero means "member".
using Mask = std::vector<std::uint8_t>;

enum class Pooling {
  per_plane,             // statistics computed separately for every plane
  pooled_across_planes,  // one set of statistics over all planes of a time frame
};

// Thresholds of the two-step outlier test and the candidate density floor.
// Defaults: alpha/beta need tuning per dataset; the floors are the reference
// settings (minAbsden 2.05, minRden 1.2).
struct DetectionParams {
  double alpha = 2.0;               // multiple of sigma over the ROI
  double beta = 1.0;                // multiple of sigma over the phase-1 survivors
  double min_abs_density = 2.05;    // absolute normalized-density floor
  double min_rel_density = 1.2;     // floor relative to the phase-1 mean
  Pooling pooling = Pooling::pooled_across_planes;

  void validate() const;
};

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

// Population statistics of the normalized density over the ROI (mu, sigma)
// and over the phase-1 survivors (mu2, sigma2). mu2/sigma2 are NaN when
// phase 1 selected nothing.
struct FrameStats {
  double mu = 0.0;
  double sigma = 0.0;
  double mu2 = std::numeric_limits<double>::quiet_NaN();
  double sigma2 = std::numeric_limits<double>::quiet_NaN();
};

struct CandidateSet {
  Mask phase1;      // relatively high density areas
  Mask candidates;  // good blob candidates, subset of phase1
  std::size_t phase1_count = 0;
  std::size_t candidate_count = 0;
};

// value_i / baseline_i. Throws NumericalError naming the first vertex where
// the baseline is zero.
Frame normalize(const Frame& frame, const Frame& baseline);
std::vector<double> normalize(std::span<const double> values, std::span<const double> baseline);

// Population mean and standard deviation over the masked entries (all entries
// when the mask is empty). Throws StatisticsError for fewer than two samples.
Moments moments(std::span<const double> values, std::span<const std::uint8_t> mask = {});

std::size_t count(std::span<const std::uint8_t> mask);

// Vertex i is kept iff value_i - mean > alpha * stddev.
Mask phase1(std::span<const double> values, const Moments& roi_stats, double alpha);

// Vertex i is kept iff it is in `phase1_mask` and value_i - mean2 > beta * stddev2.
Mask phase2(std::span<const double> values, std::span<const std::uint8_t> phase1_mask,
            const Moments& phase1_stats, double beta);

// Convenience overload that computes the phase-1 moments itself; throws
// StatisticsError when the phase-1 set has fewer than two vertices.
Mask phase2(std::span<const double> values, std::span<const std::uint8_t> phase1_mask, double beta);

double density_floor_threshold(double mu2, const DetectionParams& params);

// Keep masked vertex i iff value_i > max(min_abs_density, min_rel_density * mu2).
Mask density_floor(std::span<const double> values, std::span<const std::uint8_t> mask, double mu2,
                   const DetectionParams& params);

struct Detection {
  CandidateSet set;
  FrameStats stats;
};

// Full candidate selection on one already-normalized field.
Detection detect_normalized(std::span<const double> normalized, const DetectionParams& params);

// Candidate selection over several planes of one time frame that share
// statistics (pooled mode). Each span is one plane's normalized field.
std::vector<Detection> detect_normalized_pooled(std::span<const std::span<const double>> planes,
                                                const DetectionParams& params);

// normalize -> moments -> phase1 -> moments -> phase2 -> density_floor.
Detection detect_candidates(const Frame& frame, const Frame& baseline, const DetectionParams& params);

}  // namespace blobtrack
