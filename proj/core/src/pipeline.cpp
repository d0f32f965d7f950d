#include "relcore/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>

#include "relcore/errors.hpp"
#include "relcore/join_tree.hpp"
#include "relcore/rng.hpp"

namespace relcore {

namespace {

constexpr std::uint64_t kTreeStream = 0x74726565;
constexpr std::uint64_t kWeightStream = 0x77656967;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

CoresetPart build_part(const std::vector<Table>& tables, const FeaturePartition& partition,
                       const CoresetConfig& config, std::uint64_t seed) {
  const JoinTree tree = check_acyclic(partition);
  const JoinIndex index(tables, partition, tree);
  CoresetPart part;
  part.join_size = index.join_size();
  if (part.join_size == 0) throw BuildError("coreset: the join is empty");

  auto start = std::chrono::steady_clock::now();
  part.tree = build_tree(index, {config.k, split_seed(seed, kTreeStream), config.tight_level_factor});
  part.summary = drop_empty_cubes(part.tree.summary, index);
  part.build_seconds = seconds_since(start);

  start = std::chrono::steady_clock::now();
  const auto params = WeightParams::make(config.eps1, config.beta, config.lambda, part.summary.cubes.size(),
                                         split_seed(seed, kWeightStream), config.sample_cap);
  part.coreset = assign_weights(part.summary, index, params);
  part.weigh_seconds = seconds_since(start);
  return part;
}

}  // namespace

Table select_rows(const Table& table, const std::vector<std::uint32_t>& rows) {
  std::vector<std::vector<double>> cols(table.width());
  for (std::size_t c = 0; c < table.width(); ++c) {
    cols[c].reserve(rows.size());
    for (auto r : rows) cols[c].push_back(table.value(r, c));
  }
  return Table(table.name(), table.features(), std::move(cols));
}

std::vector<std::pair<double, std::vector<Table>>> split_by_label(const std::vector<Table>& tables,
                                                                  const FeaturePartition& partition,
                                                                  const std::string& label) {
  const auto feature = partition.index_of(label);
  if (!feature) throw ContractViolation("label column '" + label + "' is not a feature of any table");
  const std::size_t owner = partition.owner[*feature];
  const std::size_t col = *tables[owner].find(label);

  std::map<double, std::vector<std::uint32_t>> groups;
  const auto& values = tables[owner].column(col);
  for (std::size_t r = 0; r < values.size(); ++r) groups[values[r]].push_back(static_cast<std::uint32_t>(r));

  std::vector<std::pair<double, std::vector<Table>>> out;
  for (const auto& [value, rows] : groups) {
    std::vector<Table> part = tables;
    part[owner] = select_rows(tables[owner], rows);
    out.emplace_back(value, std::move(part));
  }
  return out;
}

CoresetResult build_coreset(const std::vector<Table>& tables, const FeaturePartition& partition,
                            const std::optional<std::string>& label, const CoresetConfig& config) {
  expect(config.k >= 1, "coreset: k must be at least 1");
  CoresetResult out;
  out.feature_order = partition.full;
  out.points = PointSet(partition.dim());

  auto append = [&](CoresetPart part) {
    const auto emitted = part.coreset.emitted();
    for (std::size_t i = 0; i < emitted.points.size(); ++i) {
      out.points.push_back(emitted.points[i]);
      out.weights.push_back(emitted.weights[i]);
    }
    out.parts.push_back(std::move(part));
  };

  if (!label) {
    append(build_part(tables, partition, config, split_seed(config.seed, 0)));
    return out;
  }
  const auto classes = split_by_label(tables, partition, *label);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    // the schema is unchanged, so the partition carries over
    auto part = build_part(classes[c].second, partition, config, split_seed(config.seed, c));
    part.label = classes[c].first;
    append(std::move(part));
  }
  return out;
}

}  // namespace relcore
