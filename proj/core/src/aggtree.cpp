#include "relcore/aggtree.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "relcore/errors.hpp"
#include "relcore/kcenter.hpp"
#include "relcore/parallel.hpp"
#include "relcore/sample.hpp"

namespace relcore {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Offset of table t's disjoint block inside a node's (ascending) dims.
std::size_t block_offset(const std::vector<std::size_t>& dims, const FeaturePartition& p, std::size_t t) {
  if (p.disjoint[t].empty()) return 0;
  auto it = std::lower_bound(dims.begin(), dims.end(), p.disjoint[t].front());
  return static_cast<std::size_t>(it - dims.begin());
}

// Row filters of every center of `node`, for each table of the node: [center][table slot].
std::vector<std::vector<std::optional<RowFilter>>> center_filters(const AggNode& node, double radius,
                                                                   const JoinIndex& index) {
  const auto& p = index.partition();
  std::vector<std::vector<std::optional<RowFilter>>> out(node.centers.size());
  parallel_for(node.centers.size(), [&](std::size_t c) {
    out[c].resize(node.tables.size());
    auto center = node.centers[c];
    for (std::size_t slot = 0; slot < node.tables.size(); ++slot) {
      const auto t = node.tables[slot];
      const auto width = p.disjoint[t].size();
      if (width == 0) continue;  // empty subspace: every row is inside
      out[c][slot] = index.ball_filter(t, center.subspan(block_offset(node.dims, p, t), width), radius);
    }
  });
  return out;
}

std::vector<double> pairwise_squared(const PointSet& pts) {
  const std::size_t n = pts.size();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out[i * n + j] = out[j * n + i] = squared_distance(pts[i], pts[j]);
  return out;
}

}  // namespace

PointSet project_onto(const PointSet& full, const std::vector<std::size_t>& dims) {
  PointSet out(dims.size());
  std::vector<double> buf(dims.size());
  for (std::size_t i = 0; i < full.size(); ++i) {
    auto p = full[i];
    for (std::size_t j = 0; j < dims.size(); ++j) buf[j] = p[dims[j]];
    out.push_back(buf);
  }
  return out;
}

std::vector<AggNode> build_leaves(const JoinIndex& index, std::size_t k, std::uint64_t seed) {
  expect(k >= 1, "build_leaves: k must be at least 1");
  const auto& p = index.partition();
  std::vector<AggNode> leaves(index.table_count());
  parallel_for(leaves.size(), [&](std::size_t t) {
    const auto start = Clock::now();
    const auto width = p.disjoint[t].size();
    const auto rows = index.tables()[t].rows();
    PointSet proj(width, std::vector<double>(width * rows));
    if (width == 0) {
      proj = PointSet(0);
      proj.push_back({});
    } else {
      for (std::uint32_t r = 0; r < rows; ++r) index.disjoint_projection(t, r, proj[r]);
    }
    auto cs = gonzalez(proj, k, split_seed(seed, t));
    AggNode& leaf = leaves[t];
    leaf.id = t;
    leaf.tables = {t};
    leaf.dims = p.disjoint[t];
    leaf.centers = std::move(cs.centers);
    leaf.level = 0;
    leaf.spread = cs.cover_radius;
    leaf.grid_size = rows;
    leaf.survivors = rows;
    leaf.seconds = seconds_since(start);
  });
  double l0 = 0.0;
  for (const auto& leaf : leaves) l0 = std::max(l0, leaf.spread);
  for (auto& leaf : leaves) leaf.bound = l0;
  return leaves;
}

AggNode merge_nodes(const AggNode& left, const AggNode& right, std::size_t k, double prune_radius,
                    const JoinIndex& index, std::uint64_t seed, std::size_t id, int level) {
  expect(k >= 1, "merge_nodes: k must be at least 1");
  expect(prune_radius >= 0.0, "merge_nodes: negative radius");
  for (auto t : left.tables)
    expect(std::find(right.tables.begin(), right.tables.end(), t) == right.tables.end(),
           "merge_nodes: children share a table");
  const auto start = Clock::now();

  const auto left_filters = center_filters(left, prune_radius, index);
  const auto right_filters = center_filters(right, prune_radius, index);
  const std::size_t nl = left.centers.size();
  const std::size_t nr = right.centers.size();

  std::vector<Count> counts(nl * nr, 0);
  parallel_for(nl, [&](std::size_t a) {
    CountWorkspace ws(index);
    std::vector<const RowFilter*> filters(index.table_count(), nullptr);
    for (std::size_t slot = 0; slot < left.tables.size(); ++slot)
      if (left_filters[a][slot]) filters[left.tables[slot]] = &*left_filters[a][slot];
    for (std::size_t b = 0; b < nr; ++b) {
      for (std::size_t slot = 0; slot < right.tables.size(); ++slot)
        filters[right.tables[slot]] = right_filters[b][slot] ? &*right_filters[b][slot] : nullptr;
      counts[a * nr + b] = index.count(filters, ws);
    }
  });

  std::vector<std::pair<std::uint32_t, std::uint32_t>> survivors;
  for (std::size_t a = 0; a < nl; ++a)
    for (std::size_t b = 0; b < nr; ++b)
      if (counts[a * nr + b] > 0) survivors.emplace_back(a, b);
  if (survivors.empty())
    throw BuildError("merge_nodes: every grid point of node " + std::to_string(id) + " is empty");

  // Squared distances on a product space add up over the two factors.
  const auto dl = pairwise_squared(left.centers);
  const auto dr = pairwise_squared(right.centers);
  auto greedy = farthest_point_greedy(survivors.size(), k, split_seed(seed, id), [&](std::size_t i, std::size_t j) {
    const auto [ai, bi] = survivors[i];
    const auto [aj, bj] = survivors[j];
    return dl[ai * nl + aj] + dr[bi * nr + bj];
  });

  AggNode node;
  node.id = id;
  node.level = level;
  node.left = left.id;
  node.right = right.id;
  node.tables = left.tables;
  node.tables.insert(node.tables.end(), right.tables.begin(), right.tables.end());
  std::sort(node.tables.begin(), node.tables.end());
  node.dims = left.dims;
  node.dims.insert(node.dims.end(), right.dims.begin(), right.dims.end());
  std::sort(node.dims.begin(), node.dims.end());

  // Where each merged coordinate comes from.
  std::vector<std::pair<bool, std::size_t>> source(node.dims.size());
  for (std::size_t j = 0; j < node.dims.size(); ++j) {
    auto it = std::lower_bound(left.dims.begin(), left.dims.end(), node.dims[j]);
    if (it != left.dims.end() && *it == node.dims[j]) {
      source[j] = {true, static_cast<std::size_t>(it - left.dims.begin())};
    } else {
      auto jt = std::lower_bound(right.dims.begin(), right.dims.end(), node.dims[j]);
      source[j] = {false, static_cast<std::size_t>(jt - right.dims.begin())};
    }
  }
  node.centers = PointSet(node.dims.size());
  std::vector<double> buf(node.dims.size());
  for (auto pick : greedy.picks) {
    const auto [a, b] = survivors[pick];
    auto lc = left.centers[a];
    auto rc = right.centers[b];
    for (std::size_t j = 0; j < buf.size(); ++j) buf[j] = source[j].first ? lc[source[j].second] : rc[source[j].second];
    if (node.dims.empty()) {
      node.centers.push_back({});
    } else {
      node.centers.push_back(buf);
    }
  }
  node.spread = greedy.cover_radius;
  node.grid_size = nl * nr;
  node.survivors = survivors.size();
  node.prune_radius = prune_radius;
  node.seconds = seconds_since(start);
  return node;
}

AggTree build_tree(const JoinIndex& index, const BuildOptions& options) {
  expect(options.k >= 1, "build_tree: k must be at least 1");
  AggTree tree;
  const auto leaf_start = Clock::now();
  tree.nodes = build_leaves(index, options.k, options.seed);
  tree.leaf_seconds = seconds_since(leaf_start);
  const double l0 = tree.nodes.front().bound;
  tree.radii.l.push_back(l0);
  tree.radii.L.push_back(l0);

  std::vector<std::size_t> children(tree.nodes.size());
  for (std::size_t i = 0; i < children.size(); ++i) children[i] = i;
  int h = 0;
  while (children.size() >= 2) {
    ++h;
    std::vector<std::size_t> parents;
    double lh = 0.0;
    std::size_t widest = 0;
    for (std::size_t i = 0; i + 1 < children.size(); i += 2) {
      const AggNode& a = tree.nodes[children[i]];
      const AggNode& b = tree.nodes[children[i + 1]];
      const double radius = std::max(a.bound, b.bound);
      AggNode node = merge_nodes(a, b, options.k, radius, index, options.seed, tree.nodes.size(), h);
      lh = std::max(lh, node.spread);
      widest = std::max(widest, node.tables.size());
      parents.push_back(node.id);
      tree.nodes.push_back(std::move(node));
    }
    const double factor = options.tight_level_factor ? std::sqrt(static_cast<double>(widest))
                                                     : std::sqrt(std::ldexp(1.0, h));
    const double Lh = factor * (lh + std::numbers::sqrt2 * tree.radii.L.back());
    tree.radii.l.push_back(lh);
    tree.radii.L.push_back(Lh);
    for (auto id : parents) tree.nodes[id].bound = Lh;

    std::vector<std::size_t> next;
    if (children.size() % 2 == 1) next.push_back(children.back());
    next.insert(next.end(), parents.begin(), parents.end());
    children = std::move(next);
  }
  tree.root = children.front();

  const AggNode& root = tree.nodes[tree.root];
  RootSummary& summary = tree.summary;
  summary.k = options.k;
  summary.final_radius = root.bound;
  summary.centers = root.centers;  // root dims are 0..d-1, i.e. full feature order
  std::vector<std::size_t> all(index.table_count());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  for (std::size_t c = 0; c < root.centers.size(); ++c) {
    auto pt = root.centers[c];
    summary.cubes.push_back(PseudoCube{all, std::vector<double>(pt.begin(), pt.end()), summary.final_radius});
  }
  return tree;
}

DoublingResult choose_k_by_doubling(const JoinIndex& index, std::size_t k0, std::size_t k_max, double threshold,
                                    std::size_t sample_size, const BuildOptions& base) {
  expect(k0 >= 1 && k_max >= k0, "choose_k_by_doubling: need 1 <= k0 <= k_max");
  const auto sample = uniform_sample(index, std::nullopt, sample_size, split_seed(base.seed, 0x646f75626c65ULL));
  DoublingResult out;
  for (std::size_t k = k0;; k *= 2) {
    BuildOptions opts = base;
    opts.k = std::min(k, k_max);
    out.tree = build_tree(index, opts);
    out.k = opts.k;
    out.sampled_distance = directed_hausdorff(sample, out.tree.summary.centers);
    if (out.sampled_distance <= threshold || opts.k == k_max) break;
  }
  return out;
}

}  // namespace relcore
