#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "blobtrack/detect.hpp"
#include "blobtrack/error.hpp"
#include "support/random_mesh.hpp"

using namespace blobtrack;
using blobtrack::testing::two_pass_moments;

namespace {

Frame make_frame(std::vector<double> values) { return Frame{2, 0, 2.5e-6, std::move(values)}; }

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Skewed positive field resembling normalized density: mostly ~1 with a tail.
std::vector<double> skewed_field(std::mt19937_64& rng, std::size_t n) {
  std::lognormal_distribution<double> ln(0.0, 0.35);
  std::vector<double> v(n);
  for (auto& x : v) x = ln(rng);
  return v;
}

bool subset(const Mask& a, const Mask& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && !b[i]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("normalize") {
  const auto base = make_frame({2.0, 4.0, 0.5});
  const auto self = normalize(base, base);
  CHECK(self.values == std::vector<double>{1.0, 1.0, 1.0});

  CHECK(normalize(make_frame({5, 5, 5}), make_frame({2, 2, 2})).values == std::vector<double>{2.5, 2.5, 2.5});

  CHECK_THROWS_WITH_AS(normalize(make_frame({1, 1, 1}), make_frame({1, 0, 1})),
                       "baseline density is zero at vertex 1", NumericalError);
  CHECK_THROWS_AS(normalize(make_frame({1, 1}), make_frame({1, 1, 1})), ArgumentError);
}

TEST_CASE("moments") {
  const std::vector<double> ones{1, 1, 1, 1};
  const auto m1 = moments(ones);
  CHECK(m1.mean == 1.0);
  CHECK(m1.stddev == 0.0);

  const std::vector<double> pair{1, 3};
  const auto m2 = moments(pair);
  CHECK(m2.mean == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(m2.stddev == doctest::Approx(1.0).epsilon(1e-15));

  std::mt19937_64 rng(21);
  const auto xs = random_values(rng, 1000, 0.0, 1.0);
  const auto [mean, sd] = two_pass_moments(xs);
  const auto m3 = moments(xs);
  CHECK(std::abs(m3.mean - mean) <= 1e-12 * std::abs(mean));
  CHECK(std::abs(m3.stddev - sd) <= 1e-12 * sd);

  CHECK_THROWS_AS(moments(std::vector<double>{1.0}), StatisticsError);
  const Mask only_one{0, 1, 0, 0};
  CHECK_THROWS_AS(moments(ones, only_one), StatisticsError);
  const Mask two{1, 0, 0, 1};
  CHECK(moments(std::vector<double>{1, 7, 7, 3}, two).mean == 2.0);
}

TEST_CASE("phase1") {
  const std::vector<double> flat(50, 1.3);
  CHECK(count(phase1(flat, moments(flat), 2.0)) == 0);

  std::vector<double> spike(100, 1.0);
  spike[37] = 3.0;
  const auto [mu, sigma] = two_pass_moments(spike);
  Mask expected(100, 0);
  for (std::size_t i = 0; i < spike.size(); ++i) expected[i] = spike[i] - mu > 2.0 * sigma;
  const auto got = phase1(spike, moments(spike), 2.0);
  CHECK(got == expected);
  CHECK(count(got) == 1);
  CHECK(got[37] == 1);

  std::mt19937_64 rng(22);
  const auto xs = random_values(rng, 500, 0.0, 2.0);
  const auto m = moments(xs);
  const auto tiny = phase1(xs, m, 1e-300);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(bool(tiny[i]) == (xs[i] > m.mean));
}

TEST_CASE("phase2") {
  const std::vector<double> values{1, 2, 2, 2, 1};
  const Mask g2{0, 1, 1, 1, 0};
  CHECK(count(phase2(values, g2, 1.0)) == 0);

  // 79% background at 1.0, 20% shelf at 2.0, 1% spike at 3.0. Hand evaluation:
  // mu = 1.22, sigma = 0.4377 -> phase 1 keeps shelf and spike;
  // mu2 = 2.0476, sigma2 = 0.2130 -> phase 2 keeps the spike only.
  std::vector<double> field(1000, 1.0);
  for (std::size_t i = 0; i < 200; ++i) field[i * 5] = 2.0;
  for (std::size_t i = 0; i < 10; ++i) field[i * 100 + 1] = 3.0;
  const auto g = phase1(field, moments(field), 1.0);
  CHECK(count(g) == 210);
  const auto survivors = phase2(field, g, 1.0);
  CHECK(count(survivors) == 10);
  for (std::size_t i = 0; i < field.size(); ++i) CHECK(bool(survivors[i]) == (field[i] == 3.0));

  CHECK(count(phase2(field, g, 1e300)) == 0);

  const Mask single{0, 1, 0, 0, 0};
  CHECK_THROWS_AS(phase2(values, single, 1.0), StatisticsError);
}

TEST_CASE("density floor thresholds follow the shipped defaults") {
  const DetectionParams p;
  CHECK(p.min_abs_density == 2.05);
  CHECK(p.min_rel_density == 1.2);
  CHECK(density_floor_threshold(2.0, p) == 2.4);
  CHECK(density_floor_threshold(1.5, p) == 2.05);
}

TEST_CASE("density_floor matches per-vertex re-evaluation") {
  std::mt19937_64 rng(23);
  const DetectionParams p;
  for (int trial = 0; trial < 20; ++trial) {
    const auto xs = random_values(rng, 400, 0.5, 4.0);
    const auto mask = testing::random_mask(rng, xs.size(), 0.5);
    const double mu2 = std::uniform_real_distribution<double>(1.0, 3.0)(rng);
    const auto got = density_floor(xs, mask, mu2, p);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const bool keep = mask[i] && xs[i] > std::max(2.05, 1.2 * mu2);
      CHECK(bool(got[i]) == keep);
    }
  }
}

TEST_CASE("detect_candidates: constant and baseline frames select nothing") {
  const auto base = make_frame(std::vector<double>(100, 2.0));
  auto det = detect_candidates(base, base, DetectionParams{});
  CHECK(det.set.phase1_count == 0);
  CHECK(det.set.candidate_count == 0);
  CHECK(std::isnan(det.stats.mu2));

  const auto constant = make_frame(std::vector<double>(100, 5.0));
  det = detect_candidates(constant, base, DetectionParams{});
  CHECK(det.set.candidate_count == 0);
}

TEST_CASE("detect_candidates: nesting and monotonicity over random cases") {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto xs = skewed_field(rng, 300);
    DetectionParams p;
    p.alpha = 0.1 + 3.0 * u(rng);
    p.beta = 0.1 + 3.0 * u(rng);
    p.min_abs_density = 0.5 + 2.0 * u(rng);
    p.min_rel_density = 0.5 + 1.0 * u(rng);
    const auto det = detect_normalized(xs, p);
    violations += !subset(det.set.candidates, det.set.phase1);

    auto raised = p;
    raised.alpha *= 1.0 + u(rng);
    violations += !subset(detect_normalized(xs, raised).set.phase1, det.set.phase1);
    raised = p;
    raised.beta *= 1.0 + u(rng);
    violations += !subset(detect_normalized(xs, raised).set.candidates, det.set.candidates);
    raised = p;
    raised.min_abs_density *= 1.0 + u(rng);
    violations += !subset(detect_normalized(xs, raised).set.candidates, det.set.candidates);
    raised = p;
    raised.min_rel_density *= 1.0 + u(rng);
    violations += !subset(detect_normalized(xs, raised).set.candidates, det.set.candidates);

    if (det.set.phase1_count > 0) CHECK(det.stats.mu2 >= det.stats.mu);
    CHECK(det.stats.sigma >= 0.0);
  }
  CHECK(violations == 0);
}

TEST_CASE("detect_candidates: scale covariance and vertex-order independence") {
  std::mt19937_64 rng(25);
  const auto base_values = random_values(rng, 400, 0.8, 1.2);
  auto frame_values = skewed_field(rng, 400);
  for (std::size_t i = 0; i < frame_values.size(); ++i) frame_values[i] *= 2.0 * base_values[i];
  DetectionParams p;
  p.min_abs_density = 1.5;
  p.min_rel_density = 0.8;

  const auto det = detect_candidates(make_frame(frame_values), make_frame(base_values), p);
  REQUIRE(det.set.candidate_count > 0);

  for (double c : {0.25, 8.0, 1024.0}) {
    auto f = frame_values;
    auto b = base_values;
    for (auto& x : f) x *= c;
    for (auto& x : b) x *= c;
    CHECK(normalize(f, b) == normalize(frame_values, base_values));
    const auto scaled = detect_candidates(make_frame(f), make_frame(b), p);
    CHECK(scaled.set.phase1 == det.set.phase1);
    CHECK(scaled.set.candidates == det.set.candidates);
  }

  std::vector<std::size_t> perm(frame_values.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> pf(perm.size()), pb(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    pf[i] = frame_values[perm[i]];
    pb[i] = base_values[perm[i]];
  }
  const auto permuted = detect_candidates(make_frame(pf), make_frame(pb), p);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    CHECK(permuted.set.candidates[i] == det.set.candidates[perm[i]]);
    CHECK(permuted.set.phase1[i] == det.set.phase1[perm[i]]);
  }
}

TEST_CASE("pooled statistics span all planes") {
  std::mt19937_64 rng(26);
  const auto a = skewed_field(rng, 200);
  const auto b = skewed_field(rng, 150);
  const std::span<const double> planes[] = {a, b};
  const auto pooled = detect_normalized_pooled(planes, DetectionParams{});
  REQUIRE(pooled.size() == 2);

  std::vector<double> all(a);
  all.insert(all.end(), b.begin(), b.end());
  const auto [mu, sigma] = two_pass_moments(all);
  CHECK(pooled[0].stats.mu == doctest::Approx(mu).epsilon(1e-12));
  CHECK(pooled[1].stats.sigma == doctest::Approx(sigma).epsilon(1e-12));
  CHECK(pooled[0].set.candidates.size() == a.size());
  CHECK(pooled[1].set.candidates.size() == b.size());

  const auto joint = detect_normalized(all, DetectionParams{});
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(pooled[0].set.candidates[i] == joint.set.candidates[i]);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(pooled[1].set.candidates[i] == joint.set.candidates[a.size() + i]);
}

TEST_CASE("parameter validation") {
  DetectionParams p;
  p.alpha = 0.0;
  CHECK_THROWS_AS(p.validate(), ArgumentError);
  p = {};
  p.min_rel_density = -1.0;
  CHECK_THROWS_AS(p.validate(), ArgumentError);
}
