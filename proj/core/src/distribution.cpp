#include "blobtrack/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "blobtrack/error.hpp"

namespace blobtrack {
namespace {

constexpr std::size_t kMinSamples = 30;

struct MeanVar {
  double mean;
  double var;
};

MeanVar mean_var(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, ss / static_cast<double>(xs.size())};
}

// Gumbel (maximum) MLE. The scale solves
//   beta = mean(x) - sum(x w) / sum(w),  w = exp(-x / beta)
// which is bracketed between 0+ (rhs < 0) and large beta (rhs > 0).
DistributionFit fit_gumbel(std::span<const double> xs, double mean, double stddev) {
  const double xmin = *std::min_element(xs.begin(), xs.end());
  auto residual = [&](double beta) {
    double sw = 0.0;
    double sxw = 0.0;
    for (double x : xs) {
      const double w = std::exp(-(x - xmin) / beta);
      sw += w;
      sxw += (x - xmin) * w;
    }
    return beta - (mean - xmin) + sxw / sw;
  };

  double lo = 1e-6 * stddev;
  double hi = stddev;
  while (residual(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  const double beta = 0.5 * (lo + hi);

  double sw = 0.0;
  for (double x : xs) sw += std::exp(-(x - xmin) / beta);
  const double location = xmin - beta * std::log(sw / static_cast<double>(xs.size()));

  double ll = 0.0;
  for (double x : xs) {
    const double z = (x - location) / beta;
    ll += -std::log(beta) - z - std::exp(-z);
  }
  return {DistributionFamily::extreme_value, location, beta, ll};
}

DistributionFit fit_log_normal(std::span<const double> xs) {
  std::vector<double> logs;
  logs.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0)) {
      throw StatisticsError("log-normal fit needs positive samples; sample " + std::to_string(i) +
                            " is " + std::to_string(xs[i]));
    }
    logs.push_back(std::log(xs[i]));
  }
  const auto [mu, var] = mean_var(logs);
  if (!(var > 0.0)) throw StatisticsError("degenerate variance: log-samples are constant");
  const double sigma = std::sqrt(var);

  double ll = 0.0;
  const double norm = std::log(sigma * std::sqrt(2.0 * std::numbers::pi));
  for (double lx : logs) {
    ll += -lx - norm - (lx - mu) * (lx - mu) / (2.0 * var);
  }
  return {DistributionFamily::log_normal, mu, sigma, ll};
}

}  // namespace

std::string_view to_string(DistributionFamily family) {
  switch (family) {
    case DistributionFamily::extreme_value:
      return "extreme-value";
    case DistributionFamily::log_normal:
      return "log-normal";
  }
  return "unknown";
}

const DistributionFit& DistributionReport::best_fit() const {
  return best == DistributionFamily::log_normal ? *log_normal : *extreme_value;
}

DistributionReport fit_distribution(std::span<const double> values, const FitOptions& options) {
  if (!options.extreme_value && !options.log_normal) {
    throw ArgumentError("no distribution family requested");
  }
  if (values.size() < kMinSamples) {
    throw StatisticsError("distribution fit needs at least " + std::to_string(kMinSamples) +
                          " samples, got " + std::to_string(values.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw StatisticsError("distribution fit got a non-finite sample");
  }
  const auto [mean, var] = mean_var(values);
  if (!(var > 0.0)) throw StatisticsError("degenerate variance: samples are constant");

  DistributionReport report;
  report.sample_count = values.size();
  if (options.extreme_value) report.extreme_value = fit_gumbel(values, mean, std::sqrt(var));
  if (options.log_normal) report.log_normal = fit_log_normal(values);

  if (report.extreme_value && report.log_normal) {
    report.best = report.log_normal->log_likelihood > report.extreme_value->log_likelihood
                      ? DistributionFamily::log_normal
                      : DistributionFamily::extreme_value;
  } else {
    report.best = report.log_normal ? DistributionFamily::log_normal : DistributionFamily::extreme_value;
  }
  return report;
}

}  // namespace blobtrack
