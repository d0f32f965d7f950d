#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "relcore/aggtree.hpp"
#include "relcore/count.hpp"
#include "relcore/materialize.hpp"
#include "relcore/point_set.hpp"

namespace relcore {

inline constexpr std::size_t kDefaultSampleCap = 1'000'000;

struct WeightParams {
  double eps1 = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  std::size_t k = 0;
  double delta = 0.0;
  double tau = 0.0;
  std::size_t m = 0;          // samples per cube actually used
  double m_formula = 0.0;     // uncapped value from the formula
  bool m_capped = false;
  std::uint64_t seed = 0;

  /// delta = (eps1 - beta) / (2 (1 + beta)), tau = eps1 (1 - delta) / (8 k^2 (1 + beta)),
  /// m = ceil(3 / (delta^2 tau) * ln(2k / lambda)), capped at `m_cap`.
  static WeightParams make(double eps1, double beta, double lambda, std::size_t k, std::uint64_t seed,
                           std::size_t m_cap = kDefaultSampleCap);
};

struct CubeDiagnostics {
  Count exact_count = 0;  // |P ∩ PC_i|
  std::size_t samples = 0;
  std::size_t fresh = 0;  // g: samples outside every earlier heavy cube
  double ratio = 0.0;     // g / m
  bool heavy = false;
};

/// Weighted root centers. Light cubes stay in the record with weight 0.
struct Coreset {
  PointSet points;
  std::vector<double> weights;
  std::vector<CubeDiagnostics> cubes;
  WeightParams params;
  double final_radius = 0.0;

  double total_weight() const;
  /// Heavy centers only, in cube order; this is what gets written out.
  Coreset emitted() const;
};

/// Sequential weighting: cube 1 gets its exact count; each later cube draws `params.m` uniform
/// samples from its region, counts the ones outside every earlier heavy cube, and is heavy
/// iff g/m >= 2 tau, in which case its weight is (g/m) * |P ∩ PC_i|.
Coreset assign_weights(const RootSummary& summary, const JoinIndex& index, const WeightParams& params);

/// Exact first-covering weights over a materialized join. Cube i is heavy iff its exact fresh
/// ratio |P ∩ PC_i \ S| / |P ∩ PC_i| is at least `threshold` (cube 1 always heavy); each row is
/// charged to the first heavy cube containing it.
std::vector<double> exact_weights(const RootSummary& summary, const FeaturePartition& partition,
                                  const DesignMatrix& matrix, double threshold);

/// Same charging rule with the heavy/light decisions given.
std::vector<double> exact_weights_given(const RootSummary& summary, const FeaturePartition& partition,
                                        const DesignMatrix& matrix, const std::vector<bool>& heavy);

/// Removes root cubes (and their centers) that hold no join tuple.
RootSummary drop_empty_cubes(const RootSummary& summary, const JoinIndex& index);

}  // namespace relcore
