#pragma once

// Shared fixtures and brute-force oracles for the unit tests. Nothing here calls into the
// library's join, count or sampling code; oracles are written independently.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "relcore/join_tree.hpp"
#include "relcore/table.hpp"

namespace relcore::testing {

struct Instance {
  std::vector<Table> tables;
  FeaturePartition partition;
  JoinTree tree;

  explicit Instance(std::vector<Table> t)
      : tables(std::move(t)), partition(make_partition(tables)), tree(check_acyclic(partition)) {}
};

inline Table make_table(std::string name, std::vector<std::string> features, std::vector<std::vector<double>> rows) {
  std::vector<std::vector<double>> cols(features.size());
  for (const auto& r : rows)
    for (std::size_t c = 0; c < features.size(); ++c) cols[c].push_back(r[c]);
  return Table(std::move(name), std::move(features), std::move(cols));
}

// The two-table example: T1(d1,d2) and T2(d2,d3) with six join rows.
inline std::vector<Table> table1() {
  return {make_table("T1", {"d1", "d2"}, {{1, 1}, {2, 1}, {2, 2}, {3, 3}}),
          make_table("T2", {"d2", "d3"}, {{1, 1}, {1, 4}, {3, 1}, {3, 3}})};
}

using Row = std::vector<double>;  // a join tuple in full feature order

// Every combination of one row per table whose shared features agree, projected onto the
// full feature order. Exponential in the worst case; fine for the small instances used here.
inline std::vector<Row> brute_join(const std::vector<Table>& tables, const FeaturePartition& p) {
  std::vector<Row> out;
  Row current(p.dim(), 0.0);
  std::vector<bool> assigned(p.dim(), false);
  auto rec = [&](auto&& self, std::size_t t) -> void {
    if (t == tables.size()) {
      out.push_back(current);
      return;
    }
    const Table& tab = tables[t];
    for (std::size_t r = 0; r < tab.rows(); ++r) {
      bool ok = true;
      for (std::size_t c = 0; c < tab.width() && ok; ++c) {
        const auto f = p.per_table[t][c];
        if (assigned[f]) ok = current[f] == tab.value(r, c);
      }
      if (!ok) continue;
      std::vector<std::size_t> newly;
      for (std::size_t c = 0; c < tab.width(); ++c) {
        const auto f = p.per_table[t][c];
        if (!assigned[f]) {
          assigned[f] = true;
          current[f] = tab.value(r, c);
          newly.push_back(f);
        }
      }
      self(self, t + 1);
      for (auto f : newly) assigned[f] = false;
    }
  };
  rec(rec, 0);
  return out;
}

// Closed pseudo-cube membership written from the definition: for each table in the index set,
// the squared distance over that table's disjoint block is at most r^2.
inline bool in_cube(const FeaturePartition& p, const std::vector<std::size_t>& index_set,
                    const std::vector<double>& center, double r, const Row& row) {
  std::size_t off = 0;
  for (auto t : index_set) {
    double s = 0.0;
    for (std::size_t j = 0; j < p.disjoint[t].size(); ++j) {
      const double diff = row[p.disjoint[t][j]] - center[off + j];
      s += diff * diff;
    }
    if (s > r * r) return false;
    off += p.disjoint[t].size();
  }
  return true;
}

// Random acyclic schema grown as a tree: each new table shares a subset of one earlier
// table's features and adds fresh ones. Values come from tiny domains so keys collide.
inline std::vector<Table> random_acyclic_tables(std::mt19937_64& rng, std::size_t max_tables, std::size_t max_rows,
                                                std::size_t max_dim) {
  std::uniform_int_distribution<std::size_t> ntab(1, max_tables);
  const std::size_t s = ntab(rng);
  std::vector<std::vector<std::string>> feats(s);
  std::size_t next = 0;
  auto fresh = [&] { return "f" + std::to_string(next++); };
  std::uniform_int_distribution<int> coin(0, 1);
  for (std::size_t t = 0; t < s; ++t) {
    if (t > 0) {
      std::uniform_int_distribution<std::size_t> pick(0, t - 1);
      const auto& parent = feats[pick(rng)];
      for (const auto& f : parent)
        if (coin(rng) && feats[t].size() < 2) feats[t].push_back(f);
    }
    const std::size_t budget = max_dim > next ? max_dim - next : 0;
    const std::size_t remaining_tables = s - t - 1;
    std::size_t want = 1 + coin(rng);
    if (budget <= remaining_tables) want = 0;
    want = std::min(want, budget - std::min(budget, remaining_tables));
    for (std::size_t j = 0; j < want; ++j) feats[t].push_back(fresh());
    if (feats[t].empty()) feats[t].push_back(t == 0 ? fresh() : feats[t - 1].front());
    std::shuffle(feats[t].begin(), feats[t].end(), rng);
  }
  std::uniform_int_distribution<std::size_t> nrows(1, max_rows);
  std::uniform_int_distribution<int> dom(2, 4);
  std::map<std::string, int> domain;
  for (const auto& fs : feats)
    for (const auto& f : fs)
      if (!domain.count(f)) domain[f] = dom(rng);
  std::vector<Table> out;
  for (std::size_t t = 0; t < s; ++t) {
    const std::size_t n = nrows(rng);
    std::vector<std::vector<double>> cols(feats[t].size(), std::vector<double>(n));
    for (std::size_t c = 0; c < feats[t].size(); ++c) {
      std::uniform_int_distribution<int> v(0, domain[feats[t][c]] - 1);
      for (std::size_t r = 0; r < n; ++r) cols[c][r] = 0.5 * v(rng);
    }
    out.emplace_back("T" + std::to_string(t), feats[t], std::move(cols));
  }
  return out;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("relcore_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace relcore::testing
