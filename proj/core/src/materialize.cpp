#include "relcore/materialize.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <numeric>
#include <unordered_map>

#include "relcore/count.hpp"
#include "relcore/errors.hpp"
#include "relcore/join_tree.hpp"

namespace relcore {

namespace {

// Nested-loop join in table order with one hash index per table on the features bound by
// earlier tables. Deliberately independent of JoinIndex so it can serve as an oracle.
class Enumerator {
 public:
  Enumerator(const std::vector<Table>& tables, const FeaturePartition& p, DesignMatrix& out)
      : tables_(tables), p_(p), out_(out), values_(p.dim(), 0.0), rows_(tables.size(), 0) {
    std::vector<bool> bound(p.dim(), false);
    bound_cols_.resize(tables.size());
    bound_feats_.resize(tables.size());
    index_.resize(tables.size());
    for (std::size_t i = 0; i < tables.size(); ++i) {
      for (std::size_t c = 0; c < tables[i].width(); ++c) {
        const auto f = p.per_table[i][c];
        if (bound[f]) {
          bound_cols_[i].push_back(c);
          bound_feats_[i].push_back(f);
        }
      }
      for (std::size_t r = 0; r < tables[i].rows(); ++r) {
        std::string key;
        for (auto c : bound_cols_[i]) append(key, tables[i].value(r, c));
        index_[i][key].push_back(static_cast<std::uint32_t>(r));
      }
      for (auto f : p.per_table[i]) bound[f] = true;
    }
  }

  void run() { descend(0); }

 private:
  static void append(std::string& key, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    char buf[sizeof bits];
    std::memcpy(buf, &bits, sizeof bits);
    key.append(buf, sizeof bits);
  }

  void descend(std::size_t i) {
    if (i == tables_.size()) {
      out_.points.push_back(values_);
      out_.provenance.push_back(rows_);
      return;
    }
    std::string key;
    for (auto f : bound_feats_[i]) append(key, values_[f]);
    auto it = index_[i].find(key);
    if (it == index_[i].end()) return;
    const Table& t = tables_[i];
    for (auto r : it->second) {
      for (std::size_t j = 0; j < p_.disjoint[i].size(); ++j)
        values_[p_.disjoint[i][j]] = t.value(r, p_.disjoint_columns[i][j]);
      rows_[i] = r;
      descend(i + 1);
    }
  }

  const std::vector<Table>& tables_;
  const FeaturePartition& p_;
  DesignMatrix& out_;
  std::vector<double> values_;
  std::vector<std::uint32_t> rows_;
  std::vector<std::vector<std::size_t>> bound_cols_, bound_feats_;
  std::vector<std::unordered_map<std::string, std::vector<std::uint32_t>>> index_;
};

}  // namespace

DesignMatrix materialize(const std::vector<Table>& tables, const FeaturePartition& partition, std::uint64_t cap) {
  const JoinTree tree = check_acyclic(partition);
  const Count n = JoinIndex(tables, partition, tree).join_size();
  if (n > cap)
    throw CapExceeded("materialize: join has " + std::to_string(n) + " rows, above the cap of " +
                          std::to_string(cap),
                      n);

  DesignMatrix raw;
  raw.points = PointSet(partition.dim());
  raw.points.reserve(n);
  raw.provenance.reserve(n);
  Enumerator(tables, partition, raw).run();

  const auto keys = partition.key_features();
  std::vector<std::size_t> order(raw.rows());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    auto pa = raw.points[a];
    auto pb = raw.points[b];
    for (auto f : keys)
      if (pa[f] != pb[f]) return pa[f] < pb[f];
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  };
  std::stable_sort(order.begin(), order.end(), less);

  DesignMatrix out;
  out.feature_order = partition.full;
  out.points = PointSet(partition.dim());
  out.points.reserve(order.size());
  out.provenance.reserve(order.size());
  for (auto i : order) {
    out.points.push_back(raw.points[i]);
    out.provenance.push_back(std::move(raw.provenance[i]));
  }
  return out;
}

}  // namespace relcore
