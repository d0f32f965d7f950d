#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relcore/aggtree.hpp"
#include "relcore/count.hpp"
#include "relcore/table.hpp"
#include "relcore/weights.hpp"

namespace relcore {

struct CoresetConfig {
  std::size_t k = 8;
  double eps1 = 0.2;
  double beta = 0.0;
  double lambda = 0.05;
  std::uint64_t seed = 0;
  bool tight_level_factor = false;
  std::size_t sample_cap = kDefaultSampleCap;
};

/// One independently built coreset: the whole join, or the tuples of one label class.
struct CoresetPart {
  std::optional<double> label;
  Count join_size = 0;
  AggTree tree;
  RootSummary summary;  // root cubes that hold at least one tuple
  Coreset coreset;      // every cube, light ones with weight 0
  double build_seconds = 0.0;
  double weigh_seconds = 0.0;
};

struct CoresetResult {
  std::vector<std::string> feature_order;
  PointSet points;  // emitted (heavy) centers of every part, in part order
  std::vector<double> weights;
  std::vector<CoresetPart> parts;
};

/// Rows of `table` at the given indices, in that order.
Table select_rows(const Table& table, const std::vector<std::uint32_t>& rows);

/// Splits the instance by the value of `label` (ascending). Only the table that introduces the
/// label is filtered; every class keeps the original schema.
std::vector<std::pair<double, std::vector<Table>>> split_by_label(const std::vector<Table>& tables,
                                                                  const FeaturePartition& partition,
                                                                  const std::string& label);

/// Aggregation tree, empty-cube removal and sampled weighting. With a label, one coreset is
/// built per class with k centers each (labels stay fixed inside a class). Part p draws its
/// randomness from split_seed(seed, p); the tree and the weights use separate sub-streams.
CoresetResult build_coreset(const std::vector<Table>& tables, const FeaturePartition& partition,
                            const std::optional<std::string>& label, const CoresetConfig& config);

}  // namespace relcore
