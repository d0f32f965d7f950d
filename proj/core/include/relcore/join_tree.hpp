#pragma once

#include <cstddef>
#include <vector>

#include "relcore/table.hpp"

namespace relcore {

/// Rooted tree over tables witnessing acyclicity. Node ids are table indices.
struct JoinTree {
  static constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

  std::size_t root = 0;
  std::vector<std::size_t> parent;                 // kNoParent for the root
  std::vector<std::vector<std::size_t>> children;  // ascending
  /// shared[i]: global features shared by table i and its parent (empty for the root or
  /// for a cross-product edge).
  std::vector<std::vector<std::size_t>> shared;

  std::size_t size() const noexcept { return parent.size(); }
  /// Children before parents; deterministic.
  std::vector<std::size_t> post_order() const;
  /// Parents before children; deterministic.
  std::vector<std::size_t> pre_order() const;
};

/// GYO reduction: repeatedly drop features that occur in a single hyperedge and hyperedges
/// contained in another live hyperedge (lowest index first, parent = lowest-index container).
/// Throws CyclicError listing the residual hyperedges when reduction stalls.
JoinTree check_acyclic(const FeaturePartition& partition);
JoinTree check_acyclic(const std::vector<Table>& tables);

/// True when the tree is connected and, for every feature, the tables holding it form a
/// connected subtree.
bool satisfies_running_intersection(const JoinTree& tree, const FeaturePartition& partition);

}  // namespace relcore
