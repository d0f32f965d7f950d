#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "relcore/count.hpp"
#include "relcore/point_set.hpp"

namespace relcore {

/// One node of the aggregation tree.
///
/// A node covers the tables in `tables` and lives in the subspace spanned by `dims` (global
/// feature indices, ascending); center coordinates follow `dims`.
struct AggNode {
  std::size_t id = 0;
  std::vector<std::size_t> tables;
  std::vector<std::size_t> dims;
  PointSet centers;
  int level = 0;
  /// Coverage bound L at the node's creation level: every projected join tuple is within this
  /// Euclidean distance of some center.
  double bound = 0.0;
  std::optional<std::size_t> left, right;
  /// Leaves: Gonzalez cover radius over the table's projection. Internal nodes: directed
  /// Hausdorff distance from the surviving grid to the chosen centers.
  double spread = 0.0;
  std::size_t grid_size = 0;
  std::size_t survivors = 0;
  double prune_radius = 0.0;
  double seconds = 0.0;
};

/// Per-level radii: l[h] is the largest spread among nodes built at level h (l[0] is the
/// largest leaf cover radius) and L[h] the coverage bound from the level recursion.
struct LevelRadii {
  std::vector<double> l;
  std::vector<double> L;
};

/// Root centers in full feature order, the final radius, and one pseudo-cube per center.
struct RootSummary {
  PointSet centers;
  double final_radius = 0.0;
  std::vector<PseudoCube> cubes;
  std::size_t k = 0;
};

struct AggTree {
  std::vector<AggNode> nodes;  // creation order; leaves first (node i = table i)
  std::size_t root = 0;
  LevelRadii radii;
  RootSummary summary;
  double leaf_seconds = 0.0;
};

struct BuildOptions {
  std::size_t k = 1;
  std::uint64_t seed = 0;
  /// Use sqrt(max |I|) of the level's new nodes instead of sqrt(2^h) in the level recursion.
  bool tight_level_factor = false;
};

/// Leaf per table: Gonzalez over the distinct projections of the table's rows on its disjoint
/// feature set. Returns the leaves with `bound` set to L_0, the largest leaf cover radius.
std::vector<AggNode> build_leaves(const JoinIndex& index, std::size_t k, std::uint64_t seed);

/// Merges two nodes over disjoint table sets: forms the grid of center pairs, keeps the pairs
/// whose combined pseudo-cube of radius `prune_radius` holds at least one join tuple, and runs
/// Gonzalez over the survivors. The result's `spread` is the node's l contribution; `bound` is
/// left for the caller to set.
AggNode merge_nodes(const AggNode& left, const AggNode& right, std::size_t k, double prune_radius,
                    const JoinIndex& index, std::uint64_t seed, std::size_t id, int level);

/// Full bottom-up construction. Children are paired in creation order; an odd leftover is
/// carried to the next level unchanged.
AggTree build_tree(const JoinIndex& index, const BuildOptions& options);

/// Grows k geometrically (k0, 2k0, ...) until the directed Hausdorff distance from a uniform
/// sample of the join to the root centers is at most `threshold`, or k exceeds `k_max`.
struct DoublingResult {
  std::size_t k = 0;
  double sampled_distance = 0.0;
  AggTree tree;
};
DoublingResult choose_k_by_doubling(const JoinIndex& index, std::size_t k0, std::size_t k_max, double threshold,
                                    std::size_t sample_size, const BuildOptions& base);

/// Coordinates of `node`'s dims taken from a full-dimensional point set.
PointSet project_onto(const PointSet& full, const std::vector<std::size_t>& dims);

}  // namespace relcore
