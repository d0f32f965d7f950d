#pragma once

#include <cstdint>
#include <vector>

#include "relcore/point_set.hpp"
#include "relcore/table.hpp"

namespace relcore {

/// The explicit join result. Only built by the testing oracle and at desk scale.
struct DesignMatrix {
  PointSet points;                       // n x d, columns follow feature_order
  std::vector<std::string> feature_order;
  /// provenance[r][i]: row of table i that produced output row r.
  std::vector<std::vector<std::uint32_t>> provenance;

  std::size_t rows() const noexcept { return points.size(); }
};

inline constexpr std::uint64_t kDefaultMaterializeCap = 10'000'000;

/// Exact bag join of all tables projected onto the full feature list. Rows are sorted
/// lexicographically by key columns, then by every column in feature order.
/// Throws CapExceeded (carrying the exact join size) when the result would exceed `cap` rows.
DesignMatrix materialize(const std::vector<Table>& tables, const FeaturePartition& partition,
                         std::uint64_t cap = kDefaultMaterializeCap);

}  // namespace relcore
