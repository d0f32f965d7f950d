#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "relcore/losses.hpp"

namespace relcore {

struct TrainOptions {
  std::size_t max_iterations = 300;
  std::uint64_t seed = 0;
  /// Ridge term added to the logistic objective during training only (keeps separable data
  /// bounded). Not part of the evaluated risk.
  double logistic_l2 = 1e-4;
  /// Consecutive objective increases that count as divergence.
  std::size_t divergence_window = 10;
};

struct TrainResult {
  Theta theta;
  double objective = 0.0;
  std::size_t iterations = 0;
  std::vector<double> history;  // objective after each iteration
};

/// Weighted Lloyd's with seeded k-means++ seeding for k-means; full-batch gradient descent
/// (step 1/smoothness) for logistic regression; subgradient descent with step 1/t for the SVM,
/// returning the best iterate. Throws DivergenceError when the objective rises for
/// `divergence_window` consecutive iterations.
TrainResult train(const LossModel& model, const Dataset& data, std::span<const double> weights,
                  const TrainOptions& options = {});

/// Weighted k-means++ seeding: first center drawn with probability proportional to weight, each
/// next one proportional to weight times squared distance to the chosen set.
PointSet kmeanspp_seed(const PointSet& points, std::span<const double> weights, std::size_t k, std::uint64_t seed);

}  // namespace relcore
