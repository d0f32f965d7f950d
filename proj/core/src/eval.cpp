#include "relcore/eval.hpp"

#include <chrono>
#include <cmath>

#include "relcore/errors.hpp"
#include "relcore/kcenter.hpp"
#include "relcore/parallel.hpp"
#include "relcore/sample.hpp"

namespace relcore {

DiameterEstimate exact_diameter(const PointSet& points) {
  expect(!points.empty(), "diameter: empty point set");
  const std::size_t n = points.size();
  std::vector<double> row_max(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    double best = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) best = std::max(best, squared_distance(points[i], points[j]));
    row_max[i] = best;
  });
  double best = 0.0;
  for (double v : row_max) best = std::max(best, v);
  const double value = std::sqrt(best);
  return {value, value, "exact"};
}

namespace {

std::size_t farthest_from(const PointSet& points, std::size_t from, double& dist2) {
  std::size_t arg = from;
  dist2 = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = squared_distance(points[i], points[from]);
    if (d > dist2) {
      dist2 = d;
      arg = i;
    }
  }
  return arg;
}

}  // namespace

DiameterEstimate two_pass_diameter(const PointSet& points, std::uint64_t seed) {
  expect(!points.empty(), "diameter: empty point set");
  const std::size_t start = seeded_first_pick(points.size(), seed);
  double d2 = 0.0;
  const std::size_t a = farthest_from(points, start, d2);
  farthest_from(points, a, d2);
  const double value = std::sqrt(d2);
  return {value, 2.0 * value, "two-pass"};
}

DiameterEstimate sampled_diameter(const JoinIndex& index, std::size_t sample_size, std::uint64_t seed) {
  const auto sample = uniform_sample(index, std::nullopt, sample_size, split_seed(seed, 0x6469616dULL));
  return two_pass_diameter(sample, seed);
}

EvalReport evaluate(const LossModel& model, const Theta& theta, const Dataset& full, const Dataset& coreset,
                    std::span<const double> coreset_weights, const DiameterEstimate& diameter) {
  const auto start = std::chrono::steady_clock::now();
  EvalReport r;
  const auto ones = unit_weights(full.size());
  r.full_objective = mean_loss(model, theta, full, ones);
  r.coreset_objective = mean_loss(model, theta, coreset, coreset_weights);
  r.diameter = diameter.value;
  r.diameter_method = diameter.method;
  const double gap = std::abs(r.coreset_objective - r.full_objective);
  r.multiplicative_gap = r.full_objective > 0.0 ? gap / r.full_objective : (gap > 0.0 ? INFINITY : 0.0);
  const double scale = std::pow(diameter.value, model.z());
  r.additive_gap = scale > 0.0 ? gap / scale : (gap > 0.0 ? INFINITY : 0.0);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

double approx_metric(double objective, double optimum) {
  expect(optimum > 0.0, "approx_metric: optimum must be positive");
  return (objective - optimum) / optimum;
}

double additive_allowance(double alpha, double z, double radius, std::size_t subspaces, double delta) {
  return alpha * std::pow(std::sqrt(static_cast<double>(subspaces)) * radius, z) * (1.0 + delta);
}

}  // namespace relcore
