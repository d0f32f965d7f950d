#include "relcore/sample.hpp"

#include <algorithm>

#include "relcore/errors.hpp"
#include "relcore/parallel.hpp"

namespace relcore {

PreparedSampler::PreparedSampler(const JoinIndex& index, std::span<const RowFilter* const> filters)
    : index_(&index) {
  const std::size_t s = index.table_count();
  expect(filters.size() == s, "sampler: one filter slot per table required");
  const JoinTree& tree = index.tree();
  weight_.resize(s);
  cumulative_.resize(s);
  std::vector<std::vector<Count>> message(s);
  for (auto t : index.post_order()) {
    const auto rows = index.tables()[t].rows();
    auto& w = weight_[t];
    w.assign(rows, 1);
    if (filters[t])
      for (std::size_t r = 0; r < rows; ++r) w[r] = filters[t]->mask[r] ? 1 : 0;
    for (auto ch : tree.children[t]) {
      const auto& e = index.edge(ch);
      for (std::size_t r = 0; r < rows; ++r) {
        const auto k = e.parent_key[r];
        w[r] = k == JoinIndex::kNoKey ? 0 : checked_mul(w[r], message[ch][k]);
      }
    }
    if (t == tree.root) continue;
    const auto& e = index.edge(t);
    message[t].assign(e.num_keys, 0);
    for (std::size_t r = 0; r < rows; ++r) message[t][e.child_key[r]] = checked_add(message[t][e.child_key[r]], w[r]);
    auto& cum = cumulative_[t];
    cum.resize(e.child_rows.size());
    Count running = 0;
    for (std::size_t i = 0; i < e.child_rows.size(); ++i) {
      running = checked_add(running, w[e.child_rows[i]]);
      cum[i] = running;
    }
  }
  const auto& root_w = weight_[tree.root];
  root_cumulative_.resize(root_w.size());
  for (std::size_t r = 0; r < root_w.size(); ++r) {
    total_ = checked_add(total_, root_w[r]);
    root_cumulative_[r] = total_;
  }
}

void PreparedSampler::draw_rows(CounterRng& rng, std::span<std::uint32_t> rows) const {
  if (total_ == 0) throw EmptyRegion("sampler: the requested region contains no join tuple");
  const JoinTree& tree = index_->tree();
  {
    const Count u = rng.uniform_below(total_);
    auto it = std::upper_bound(root_cumulative_.begin(), root_cumulative_.end(), u);
    rows[tree.root] = static_cast<std::uint32_t>(it - root_cumulative_.begin());
  }
  for (auto t : index_->pre_order()) {
    if (t == tree.root) continue;
    const auto& e = index_->edge(t);
    const auto key = e.parent_key[rows[e.parent]];
    const auto& cum = cumulative_[t];
    const auto lo = e.child_offsets[key];
    const auto hi = e.child_offsets[key + 1];
    const Count base = lo == 0 ? 0 : cum[lo - 1];
    const Count u = base + rng.uniform_below(cum[hi - 1] - base);
    auto it = std::upper_bound(cum.begin() + lo, cum.begin() + hi, u);
    rows[t] = e.child_rows[static_cast<std::size_t>(it - cum.begin())];
  }
}

long double PreparedSampler::descent_probability(std::span<const std::uint32_t> rows) const {
  if (total_ == 0) return 0.0L;
  const JoinTree& tree = index_->tree();
  long double p = static_cast<long double>(weight_[tree.root][rows[tree.root]]) / static_cast<long double>(total_);
  for (auto t : index_->pre_order()) {
    if (t == tree.root) continue;
    const auto& e = index_->edge(t);
    const auto key = e.parent_key[rows[e.parent]];
    if (key == JoinIndex::kNoKey || e.child_key[rows[t]] != key) return 0.0L;
    const auto& cum = cumulative_[t];
    const auto lo = e.child_offsets[key];
    const auto hi = e.child_offsets[key + 1];
    const Count segment = cum[hi - 1] - (lo == 0 ? 0 : cum[lo - 1]);
    if (segment == 0) return 0.0L;
    p *= static_cast<long double>(weight_[t][rows[t]]) / static_cast<long double>(segment);
  }
  return p;
}

std::vector<std::vector<std::uint32_t>> uniform_sample_rows(const PreparedSampler& sampler, std::size_t m,
                                                            std::uint64_t seed) {
  if (sampler.total() == 0) throw EmptyRegion("sampler: the requested region contains no join tuple");
  const std::size_t s = sampler.index().table_count();
  std::vector<std::vector<std::uint32_t>> out(m, std::vector<std::uint32_t>(s));
  parallel_for(m, [&](std::size_t j) {
    CounterRng rng(seed, j);
    sampler.draw_rows(rng, out[j]);
  });
  return out;
}

PointSet uniform_sample(const JoinIndex& index, const std::optional<PseudoCube>& cube, std::size_t m,
                        std::uint64_t seed) {
  expect(m >= 1, "uniform_sample: m must be at least 1");
  std::vector<std::optional<RowFilter>> filters(index.table_count());
  if (cube) filters = index.cube_filters(*cube);
  std::vector<const RowFilter*> ptrs(index.table_count(), nullptr);
  for (std::size_t i = 0; i < filters.size(); ++i)
    if (filters[i]) ptrs[i] = &*filters[i];
  PreparedSampler sampler(index, ptrs);
  const auto rows = uniform_sample_rows(sampler, m, seed);
  const std::size_t d = index.partition().dim();
  PointSet points(d, std::vector<double>(m * d));
  for (std::size_t j = 0; j < m; ++j) index.assemble(rows[j], points[j]);
  return points;
}

}  // namespace relcore
