#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace blobtrack {

enum class DistributionFamily { extreme_value, log_normal };

std::string_view to_string(DistributionFamily family);

// Maximum-likelihood fit of one family.
//   extreme_value (Gumbel, maxima): location = mu, scale = beta
//   log_normal: location = mean of log(x), scale = stddev of log(x)
struct DistributionFit {
  DistributionFamily family = DistributionFamily::extreme_value;
  double location = 0.0;
  double scale = 0.0;
  double log_likelihood = 0.0;
};

struct FitOptions {
  bool extreme_value = true;
  bool log_normal = true;
};

struct DistributionReport {
  std::optional<DistributionFit> extreme_value;
  std::optional<DistributionFit> log_normal;
  DistributionFamily best = DistributionFamily::extreme_value;
  std::size_t sample_count = 0;

  const DistributionFit& best_fit() const;
};

// Exploratory utility for choosing outlier quantiles; not used on the
// detection path. Needs >= 30 samples with nonzero spread; the log-normal
// branch also needs every sample > 0.
DistributionReport fit_distribution(std::span<const double> values, const FitOptions& options = {});

}  // namespace blobtrack
