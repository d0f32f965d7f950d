#pragma once

#include <cstdint>
#include <string>

#include "relcore/count.hpp"
#include "relcore/losses.hpp"
#include "relcore/point_set.hpp"

namespace relcore {

struct DiameterEstimate {
  double value = 0.0;        // exact diameter, or a lower bound for the heuristic
  double upper_bound = 0.0;  // equals value when exact; otherwise 2 * value
  std::string method;        // "exact" or "two-pass"
};

/// Exact maximum pairwise distance, O(n^2).
DiameterEstimate exact_diameter(const PointSet& points);

/// Two farthest-point passes from a seeded start: returns d(a, b) where a is farthest from the
/// start and b farthest from a. The true diameter of `points` lies in [value, 2 value].
DiameterEstimate two_pass_diameter(const PointSet& points, std::uint64_t seed);

/// Two-pass estimate on a uniform sample of the join.
DiameterEstimate sampled_diameter(const JoinIndex& index, std::size_t sample_size, std::uint64_t seed);

struct EvalReport {
  double full_objective = 0.0;     // F(theta)
  double coreset_objective = 0.0;  // weighted F~(theta)
  double diameter = 0.0;
  std::string diameter_method;
  double multiplicative_gap = 0.0;  // |F~ - F| / F
  double additive_gap = 0.0;        // |F~ - F| / diameter^z
  double seconds = 0.0;
};

/// Compares the objective on the full data (unit weights) with the weighted coreset objective.
/// Uses mean_loss, so the SVM regularizer (theta only) does not enter the gap.
EvalReport evaluate(const LossModel& model, const Theta& theta, const Dataset& full, const Dataset& coreset,
                    std::span<const double> coreset_weights, const DiameterEstimate& diameter);

/// (F(theta) - F(theta*)) / F(theta*).
double approx_metric(double objective, double optimum);

/// Additive error allowance in absolute units for a coreset whose cubes have per-subspace
/// radius `radius` over `subspaces` blocks and weight accuracy `delta`:
/// alpha * (sqrt(subspaces) * radius)^z * (1 + delta).
double additive_allowance(double alpha, double z, double radius, std::size_t subspaces, double delta);

}  // namespace relcore
