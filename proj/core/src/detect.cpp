#include "blobtrack/detect.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blobtrack/error.hpp"

namespace blobtrack {
namespace {

// Welford accumulator; population variance.
struct Accumulator {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  void add(std::span<const double> values, std::span<const std::uint8_t> mask) {
    if (mask.empty()) {
      for (double v : values) add(v);
    } else {
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (mask[i]) add(values[i]);
      }
    }
  }
  Moments result() const {
    return {mean, n == 0 ? 0.0 : std::sqrt(std::max(0.0, m2 / static_cast<double>(n)))};
  }
};

void check_mask(std::span<const double> values, std::span<const std::uint8_t> mask) {
  if (!mask.empty() && mask.size() != values.size()) {
    throw ArgumentError("mask length " + std::to_string(mask.size()) + " does not match " +
                        std::to_string(values.size()) + " values");
  }
}

}  // namespace

void DetectionParams::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw ArgumentError("alpha and beta must be > 0");
  if (!(min_abs_density > 0.0) || !(min_rel_density > 0.0)) {
    throw ArgumentError("density floors must be > 0");
  }
}

std::vector<double> normalize(std::span<const double> values, std::span<const double> baseline) {
  if (values.size() != baseline.size()) {
    throw ArgumentError("frame and baseline lengths differ");
  }
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (baseline[i] == 0.0) {
      throw NumericalError("baseline density is zero at vertex " + std::to_string(i));
    }
    out[i] = values[i] / baseline[i];
  }
  return out;
}

Frame normalize(const Frame& frame, const Frame& baseline) {
  Frame out{frame.time_index, frame.plane_index, frame.dt, {}};
  out.values = normalize(frame.values, baseline.values);
  return out;
}

std::size_t count(std::span<const std::uint8_t> mask) {
  return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; }));
}

Moments moments(std::span<const double> values, std::span<const std::uint8_t> mask) {
  check_mask(values, mask);
  Accumulator acc;
  acc.add(values, mask);
  if (acc.n < 2) {
    throw StatisticsError("moments need at least 2 samples, got " + std::to_string(acc.n));
  }
  return acc.result();
}

Mask phase1(std::span<const double> values, const Moments& roi_stats, double alpha) {
  Mask out(values.size(), 0);
  const double cut = alpha * roi_stats.stddev;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (values[i] - roi_stats.mean > cut) ? 1 : 0;
  }
  return out;
}

Mask phase2(std::span<const double> values, std::span<const std::uint8_t> phase1_mask,
            const Moments& phase1_stats, double beta) {
  if (phase1_mask.size() != values.size()) throw ArgumentError("phase-1 mask length mismatch");
  Mask out(values.size(), 0);
  const double cut = beta * phase1_stats.stddev;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (phase1_mask[i] && values[i] - phase1_stats.mean > cut) ? 1 : 0;
  }
  return out;
}

Mask phase2(std::span<const double> values, std::span<const std::uint8_t> phase1_mask, double beta) {
  if (phase1_mask.size() != values.size()) throw ArgumentError("phase-1 mask length mismatch");
  return phase2(values, phase1_mask, moments(values, phase1_mask), beta);
}

double density_floor_threshold(double mu2, const DetectionParams& params) {
  return std::max(params.min_abs_density, params.min_rel_density * mu2);
}

Mask density_floor(std::span<const double> values, std::span<const std::uint8_t> mask, double mu2,
                   const DetectionParams& params) {
  if (mask.size() != values.size()) throw ArgumentError("mask length mismatch");
  const double threshold = density_floor_threshold(mu2, params);
  Mask out(values.size(), 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (mask[i] && values[i] > threshold) ? 1 : 0;
  }
  return out;
}

std::vector<Detection> detect_normalized_pooled(std::span<const std::span<const double>> planes,
                                                const DetectionParams& params) {
  params.validate();

  Accumulator roi;
  for (auto plane : planes) roi.add(plane, {});
  if (roi.n < 2) {
    throw StatisticsError("region of interest holds " + std::to_string(roi.n) +
                          " vertices; at least 2 are needed");
  }
  const Moments roi_stats = roi.result();

  std::vector<Detection> out(planes.size());
  Accumulator high;
  for (std::size_t p = 0; p < planes.size(); ++p) {
    auto& set = out[p].set;
    set.phase1 = phase1(planes[p], roi_stats, params.alpha);
    set.phase1_count = count(set.phase1);
    high.add(planes[p], set.phase1);
  }

  FrameStats stats;
  stats.mu = roi_stats.mean;
  stats.sigma = roi_stats.stddev;
  if (high.n > 0) {
    const Moments high_stats = high.result();
    stats.mu2 = high_stats.mean;
    stats.sigma2 = high_stats.stddev;
    for (std::size_t p = 0; p < planes.size(); ++p) {
      auto& set = out[p].set;
      const Mask outliers = phase2(planes[p], set.phase1, high_stats, params.beta);
      set.candidates = density_floor(planes[p], outliers, stats.mu2, params);
      set.candidate_count = count(set.candidates);
    }
  } else {
    for (std::size_t p = 0; p < planes.size(); ++p) {
      out[p].set.candidates.assign(planes[p].size(), 0);
    }
  }
  for (auto& d : out) d.stats = stats;
  return out;
}

Detection detect_normalized(std::span<const double> normalized, const DetectionParams& params) {
  const std::span<const double> one[] = {normalized};
  return std::move(detect_normalized_pooled(one, params).front());
}

Detection detect_candidates(const Frame& frame, const Frame& baseline, const DetectionParams& params) {
  const auto normalized = normalize(frame.values, baseline.values);
  return detect_normalized(normalized, params);
}

}  // namespace blobtrack
