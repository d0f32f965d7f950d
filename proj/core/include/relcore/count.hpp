#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "relcore/join_tree.hpp"
#include "relcore/point_set.hpp"
#include "relcore/table.hpp"

namespace relcore {

using Count = std::uint64_t;

/// Product of closed Euclidean balls, one per disjoint subspace of the listed tables.
///
/// `center` concatenates the center's coordinates on each listed table's disjoint feature set,
/// in ascending table order.
struct PseudoCube {
  std::vector<std::size_t> tables;
  std::vector<double> center;
  double radius = 0.0;
};

/// Rows of one table that pass a predicate, as both a dense mask and a sorted row list.
struct RowFilter {
  std::vector<std::uint8_t> mask;
  std::vector<std::uint32_t> rows;

  static RowFilter from_mask(std::vector<std::uint8_t> mask);
};

/// Closed-ball test on squared distance; boundary points are inside.
inline bool within_ball(std::span<const double> point, std::span<const double> center, double radius) {
  return squared_distance(point, center) <= radius * radius;
}

class CountWorkspace;

/// Precomputed join structure over an acyclic join: per tree edge, the key dictionary, rows
/// grouped by key on both sides, and unfiltered partial counts. Supports exact counting of join
/// tuples under per-table row filters without materializing the join.
///
/// The referenced tables, partition and tree must outlive the index.
class JoinIndex {
 public:
  static constexpr std::uint32_t kNoKey = 0xffffffffU;
  /// Marks a saturated (overflowed) partial count inside cached messages.
  static constexpr Count kSaturated = ~Count{0};

  JoinIndex(const std::vector<Table>& tables, const FeaturePartition& partition, const JoinTree& tree);

  const std::vector<Table>& tables() const noexcept { return *tables_; }
  const FeaturePartition& partition() const noexcept { return *partition_; }
  const JoinTree& tree() const noexcept { return *tree_; }
  std::size_t table_count() const noexcept { return tables_->size(); }

  /// |T_1 join ... join T_s|. Throws CountOverflow past 2^64 - 2.
  Count join_size() const;

  /// Number of join tuples whose row in table i passes filters[i] (nullptr = no filter).
  Count count(std::span<const RowFilter* const> filters, CountWorkspace& workspace) const;
  Count count(std::span<const RowFilter* const> filters) const;

  /// Number of join tuples inside the pseudo-cube.
  Count count(const PseudoCube& cube) const;
  /// Number of join tuples inside every cube; cubes must cover pairwise-disjoint table sets.
  Count count(std::span<const PseudoCube> cubes) const;

  /// Rows of table i whose projection on its disjoint feature set lies in the closed ball.
  RowFilter ball_filter(std::size_t table, std::span<const double> center, double radius) const;

  /// One filter per table (absent for tables outside every cube).
  std::vector<std::optional<RowFilter>> cube_filters(std::span<const PseudoCube> cubes) const;
  std::vector<std::optional<RowFilter>> cube_filters(const PseudoCube& cube) const {
    return cube_filters(std::span<const PseudoCube>(&cube, 1));
  }

  /// Fills `out` (size d, full feature order) with the join tuple formed by rows[i] of table i.
  void assemble(std::span<const std::uint32_t> rows, std::span<double> out) const;

  /// Projection of table row onto its disjoint feature set.
  void disjoint_projection(std::size_t table, std::uint32_t row, std::span<double> out) const;

  struct Edge {
    std::size_t child = 0;
    std::size_t parent = 0;
    std::size_t num_keys = 0;
    std::vector<std::uint32_t> child_key;    // per child row
    std::vector<std::uint32_t> parent_key;   // per parent row, kNoKey when unmatched
    std::vector<std::uint32_t> child_offsets, child_rows;    // child rows grouped by key
    std::vector<std::uint32_t> parent_offsets, parent_rows;  // parent rows grouped by key
    std::vector<Count> base_message;         // unfiltered per-key subtree counts (saturating)
  };

  /// Edge from table `child` to its parent; undefined for the root.
  const Edge& edge(std::size_t child) const { return edges_[child]; }
  const std::vector<std::size_t>& post_order() const noexcept { return post_order_; }
  const std::vector<std::size_t>& pre_order() const noexcept { return pre_order_; }

 private:
  const std::vector<Table>* tables_;
  const FeaturePartition* partition_;
  const JoinTree* tree_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> post_order_, pre_order_;
  Count join_size_ = 0;
};

/// Reusable scratch space for JoinIndex::count; one per concurrent caller.
class CountWorkspace {
 public:
  explicit CountWorkspace(const JoinIndex& index);

 private:
  friend class JoinIndex;
  std::vector<std::vector<Count>> message_;
  std::vector<std::vector<std::uint32_t>> touched_;
  std::vector<std::uint8_t> active_;
};

/// Checked arithmetic for exact counts.
Count checked_add(Count a, Count b);
Count checked_mul(Count a, Count b);

/// Count of join tuples inside every cube. Cubes must have pairwise-disjoint table sets.
Count pc_count(const std::vector<Table>& tables, const FeaturePartition& partition, const JoinTree& tree,
               std::span<const PseudoCube> cubes);
Count join_size(const std::vector<Table>& tables, const FeaturePartition& partition, const JoinTree& tree);

/// Geometric membership of a full-dimensional point (coordinates in FeaturePartition::full
/// order) in a pseudo-cube. Uses the same closed-ball test as the row filters.
bool cube_contains(const FeaturePartition& partition, const PseudoCube& cube, std::span<const double> point);

}  // namespace relcore
