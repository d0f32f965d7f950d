#include "relcore/count.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <string>
#include <unordered_map>

#include "relcore/errors.hpp"

namespace relcore {

namespace {

constexpr Count kSat = JoinIndex::kSaturated;

Count saturating_add(Count a, Count b) {
  Count r;
  if (a == kSat || b == kSat || __builtin_add_overflow(a, b, &r) || r == kSat) return kSat;
  return r;
}

Count saturating_mul(Count a, Count b) {
  if (a == 0 || b == 0) return 0;
  Count r;
  if (a == kSat || b == kSat || __builtin_mul_overflow(a, b, &r) || r == kSat) return kSat;
  return r;
}

[[noreturn]] void overflow() { throw CountOverflow("join count exceeds the 64-bit range"); }

// Bit patterns of the key features of one row; doubles compare by exact representation.
std::string key_bytes(const Table& table, const std::vector<std::size_t>& columns, std::size_t row) {
  std::string out(columns.size() * sizeof(std::uint64_t), '\0');
  for (std::size_t j = 0; j < columns.size(); ++j) {
    auto bits = std::bit_cast<std::uint64_t>(table.value(row, columns[j]));
    std::memcpy(out.data() + j * sizeof bits, &bits, sizeof bits);
  }
  return out;
}

std::vector<std::size_t> columns_of(const Table& table, const FeaturePartition& p,
                                    const std::vector<std::size_t>& features) {
  std::vector<std::size_t> cols;
  cols.reserve(features.size());
  for (auto f : features) cols.push_back(*table.find(p.full[f]));
  return cols;
}

void group_rows(const std::vector<std::uint32_t>& key_of_row, std::size_t num_keys,
                std::vector<std::uint32_t>& offsets, std::vector<std::uint32_t>& rows) {
  offsets.assign(num_keys + 1, 0);
  for (auto k : key_of_row)
    if (k != JoinIndex::kNoKey) ++offsets[k + 1];
  for (std::size_t k = 0; k < num_keys; ++k) offsets[k + 1] += offsets[k];
  rows.assign(offsets[num_keys], 0);
  auto cursor = offsets;
  for (std::uint32_t r = 0; r < key_of_row.size(); ++r)
    if (key_of_row[r] != JoinIndex::kNoKey) rows[cursor[key_of_row[r]]++] = r;
}

}  // namespace

Count checked_add(Count a, Count b) {
  Count r;
  if (a == kSat || b == kSat || __builtin_add_overflow(a, b, &r) || r == kSat) overflow();
  return r;
}

Count checked_mul(Count a, Count b) {
  if (a == 0 || b == 0) return 0;
  Count r;
  if (a == kSat || b == kSat || __builtin_mul_overflow(a, b, &r) || r == kSat) overflow();
  return r;
}

RowFilter RowFilter::from_mask(std::vector<std::uint8_t> mask) {
  RowFilter f;
  for (std::uint32_t r = 0; r < mask.size(); ++r)
    if (mask[r]) f.rows.push_back(r);
  f.mask = std::move(mask);
  return f;
}

JoinIndex::JoinIndex(const std::vector<Table>& tables, const FeaturePartition& partition, const JoinTree& tree)
    : tables_(&tables), partition_(&partition), tree_(&tree) {
  const std::size_t s = tables.size();
  expect(s >= 1 && tree.size() == s && partition.tables() == s, "JoinIndex: tables, partition and tree disagree");
  post_order_ = tree.post_order();
  pre_order_ = tree.pre_order();
  expect(post_order_.size() == s, "JoinIndex: join tree is not connected");

  edges_.resize(s);
  for (std::size_t c = 0; c < s; ++c) {
    if (c == tree.root) continue;
    Edge& e = edges_[c];
    e.child = c;
    e.parent = tree.parent[c];
    const auto& child = tables[c];
    const auto& parent = tables[e.parent];
    const auto child_cols = columns_of(child, partition, tree.shared[c]);
    const auto parent_cols = columns_of(parent, partition, tree.shared[c]);

    std::unordered_map<std::string, std::uint32_t> dict;
    e.child_key.resize(child.rows());
    for (std::size_t r = 0; r < child.rows(); ++r) {
      auto [it, inserted] = dict.emplace(key_bytes(child, child_cols, r), static_cast<std::uint32_t>(dict.size()));
      e.child_key[r] = it->second;
    }
    e.num_keys = dict.size();
    e.parent_key.resize(parent.rows());
    for (std::size_t r = 0; r < parent.rows(); ++r) {
      auto it = dict.find(key_bytes(parent, parent_cols, r));
      e.parent_key[r] = it == dict.end() ? kNoKey : it->second;
    }
    group_rows(e.child_key, e.num_keys, e.child_offsets, e.child_rows);
    group_rows(e.parent_key, e.num_keys, e.parent_offsets, e.parent_rows);
  }

  // Unfiltered bottom-up pass; saturated entries only matter if a query multiplies them.
  std::vector<std::vector<Count>> weight(s);
  for (auto t : post_order_) {
    weight[t].assign(tables[t].rows(), 1);
    for (auto ch : tree.children[t]) {
      const Edge& e = edges_[ch];
      for (std::size_t r = 0; r < weight[t].size(); ++r) {
        const auto k = e.parent_key[r];
        weight[t][r] = k == kNoKey ? 0 : saturating_mul(weight[t][r], e.base_message[k]);
      }
    }
    if (t != tree.root) {
      Edge& e = edges_[t];
      e.base_message.assign(e.num_keys, 0);
      for (std::size_t r = 0; r < weight[t].size(); ++r)
        e.base_message[e.child_key[r]] = saturating_add(e.base_message[e.child_key[r]], weight[t][r]);
    }
  }
  join_size_ = 0;
  for (auto w : weight[tree.root]) join_size_ = saturating_add(join_size_, w);
}

Count JoinIndex::join_size() const {
  if (join_size_ == kSat) overflow();
  return join_size_;
}

CountWorkspace::CountWorkspace(const JoinIndex& index) {
  const std::size_t s = index.table_count();
  message_.resize(s);
  touched_.resize(s);
  active_.assign(s, 0);
  for (std::size_t c = 0; c < s; ++c)
    if (c != index.tree().root) message_[c].assign(index.edge(c).num_keys, 0);
}

Count JoinIndex::count(std::span<const RowFilter* const> filters, CountWorkspace& ws) const {
  const std::size_t s = table_count();
  expect(filters.size() == s, "count: one filter slot per table required");
  const JoinTree& tree = *tree_;

  bool any = false;
  for (auto t : post_order_) {
    bool act = filters[t] != nullptr;
    for (auto ch : tree.children[t]) act = act || ws.active_[ch];
    ws.active_[t] = act;
    any = any || act;
  }
  if (!any) return join_size();

  Count total = 0;
  // Sparse bottom-up pass: only rows reachable from filtered rows are visited.
  auto visit = [&](std::size_t t, std::uint32_t r) {
    const RowFilter* f = filters[t];
    if (f && !f->mask[r]) return;
    Count w = 1;
    for (auto ch : tree.children[t]) {
      const Edge& e = edges_[ch];
      const auto k = e.parent_key[r];
      if (k == kNoKey) return;
      w = checked_mul(w, ws.active_[ch] ? ws.message_[ch][k] : e.base_message[k]);
      if (w == 0) return;
    }
    if (t == tree.root) {
      total = checked_add(total, w);
    } else {
      const auto k = edges_[t].child_key[r];
      Count& slot = ws.message_[t][k];
      if (slot == 0) ws.touched_[t].push_back(k);
      slot = checked_add(slot, w);
    }
  };

  try {
    for (auto t : post_order_) {
      if (!ws.active_[t]) continue;
      // Enumerate the cheapest candidate set: the filter's rows or the parent-side rows of the
      // keys touched by the sparsest active child.
      std::size_t best_child = s;
      std::size_t best_size = filters[t] ? filters[t]->rows.size() : static_cast<std::size_t>(-1);
      for (auto ch : tree.children[t]) {
        if (!ws.active_[ch]) continue;
        const Edge& e = edges_[ch];
        std::size_t size = 0;
        for (auto k : ws.touched_[ch]) size += e.parent_offsets[k + 1] - e.parent_offsets[k];
        if (size < best_size) {
          best_size = size;
          best_child = ch;
        }
      }
      if (best_child == s) {
        for (auto r : filters[t]->rows) visit(t, r);
      } else {
        const Edge& e = edges_[best_child];
        for (auto k : ws.touched_[best_child])
          for (auto i = e.parent_offsets[k]; i < e.parent_offsets[k + 1]; ++i) visit(t, e.parent_rows[i]);
      }
    }
  } catch (...) {
    for (std::size_t t = 0; t < s; ++t) {
      for (auto k : ws.touched_[t]) ws.message_[t][k] = 0;
      ws.touched_[t].clear();
    }
    throw;
  }
  for (std::size_t t = 0; t < s; ++t) {
    for (auto k : ws.touched_[t]) ws.message_[t][k] = 0;
    ws.touched_[t].clear();
  }
  return total;
}

Count JoinIndex::count(std::span<const RowFilter* const> filters) const {
  CountWorkspace ws(*this);
  return count(filters, ws);
}

Count JoinIndex::count(const PseudoCube& cube) const {
  return count(std::span<const PseudoCube>(&cube, 1));
}

Count JoinIndex::count(std::span<const PseudoCube> cubes) const {
  auto filters = cube_filters(cubes);
  std::vector<const RowFilter*> ptrs(table_count(), nullptr);
  for (std::size_t i = 0; i < filters.size(); ++i)
    if (filters[i]) ptrs[i] = &*filters[i];
  return count(ptrs);
}

RowFilter JoinIndex::ball_filter(std::size_t table, std::span<const double> center, double radius) const {
  expect(table < table_count(), "ball_filter: table index out of range");
  expect(radius >= 0.0, "ball_filter: negative radius");
  const auto& cols = partition_->disjoint_columns[table];
  expect(center.size() == cols.size(), "ball_filter: center dimension does not match the table's subspace");
  const Table& t = (*tables_)[table];
  const double r2 = radius * radius;
  std::vector<std::uint8_t> mask(t.rows(), 0);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double diff = t.column(cols[j])[r] - center[j];
      acc += diff * diff;
    }
    mask[r] = acc <= r2;
  }
  return RowFilter::from_mask(std::move(mask));
}

std::vector<std::optional<RowFilter>> JoinIndex::cube_filters(std::span<const PseudoCube> cubes) const {
  std::vector<std::optional<RowFilter>> out(table_count());
  for (const auto& cube : cubes) {
    expect(!cube.tables.empty(), "pseudo-cube: empty index set");
    expect(std::is_sorted(cube.tables.begin(), cube.tables.end()) &&
               std::adjacent_find(cube.tables.begin(), cube.tables.end()) == cube.tables.end(),
           "pseudo-cube: index set must be strictly ascending");
    std::size_t offset = 0;
    for (auto t : cube.tables) {
      expect(t < table_count(), "pseudo-cube: index set references a missing table");
      expect(!out[t].has_value(), "pseudo-cubes: index sets overlap");
      const std::size_t width = partition_->disjoint[t].size();
      expect(offset + width <= cube.center.size(), "pseudo-cube: center dimension too small");
      out[t] = ball_filter(t, std::span<const double>(cube.center).subspan(offset, width), cube.radius);
      offset += width;
    }
    expect(offset == cube.center.size(), "pseudo-cube: center dimension too large");
  }
  return out;
}

void JoinIndex::assemble(std::span<const std::uint32_t> rows, std::span<double> out) const {
  for (std::size_t t = 0; t < table_count(); ++t) {
    const auto& feats = partition_->disjoint[t];
    const auto& cols = partition_->disjoint_columns[t];
    for (std::size_t j = 0; j < feats.size(); ++j) out[feats[j]] = (*tables_)[t].column(cols[j])[rows[t]];
  }
}

void JoinIndex::disjoint_projection(std::size_t table, std::uint32_t row, std::span<double> out) const {
  const auto& cols = partition_->disjoint_columns[table];
  for (std::size_t j = 0; j < cols.size(); ++j) out[j] = (*tables_)[table].column(cols[j])[row];
}

bool cube_contains(const FeaturePartition& partition, const PseudoCube& cube, std::span<const double> point) {
  // Each disjoint block is a contiguous run of the full feature order.
  std::size_t offset = 0;
  for (auto t : cube.tables) {
    const auto& dims = partition.disjoint[t];
    if (dims.empty()) continue;
    if (!within_ball(point.subspan(dims.front(), dims.size()),
                     std::span<const double>(cube.center).subspan(offset, dims.size()), cube.radius))
      return false;
    offset += dims.size();
  }
  return true;
}

Count pc_count(const std::vector<Table>& tables, const FeaturePartition& partition, const JoinTree& tree,
               std::span<const PseudoCube> cubes) {
  JoinIndex index(tables, partition, tree);
  return index.count(cubes);
}

Count join_size(const std::vector<Table>& tables, const FeaturePartition& partition, const JoinTree& tree) {
  return JoinIndex(tables, partition, tree).join_size();
}

}  // namespace relcore
