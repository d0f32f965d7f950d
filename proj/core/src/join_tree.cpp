#include "relcore/join_tree.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "relcore/errors.hpp"

namespace relcore {

std::vector<std::size_t> JoinTree::post_order() const {
  std::vector<std::size_t> order;
  order.reserve(size());
  std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < children[node].size()) {
      auto child = children[node][next++];
      stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

std::vector<std::size_t> JoinTree::pre_order() const {
  std::vector<std::size_t> order;
  order.reserve(size());
  std::vector<std::size_t> stack{root};
  while (!stack.empty()) {
    auto node = stack.back();
    stack.pop_back();
    order.push_back(node);
    for (auto it = children[node].rbegin(); it != children[node].rend(); ++it) stack.push_back(*it);
  }
  return order;
}

JoinTree check_acyclic(const FeaturePartition& partition) {
  const std::size_t s = partition.tables();
  expect(s >= 1, "check_acyclic: at least one table required");

  std::vector<std::set<std::size_t>> edges(s);
  for (std::size_t i = 0; i < s; ++i) edges[i] = {partition.per_table[i].begin(), partition.per_table[i].end()};
  std::vector<bool> alive(s, true);
  std::size_t live = s;

  JoinTree tree;
  tree.parent.assign(s, JoinTree::kNoParent);
  tree.children.assign(s, {});
  tree.shared.assign(s, {});

  auto drop_lonely_features = [&] {
    bool changed = false;
    std::vector<std::size_t> uses(partition.dim(), 0);
    for (std::size_t i = 0; i < s; ++i)
      if (alive[i])
        for (auto f : edges[i]) ++uses[f];
    for (std::size_t i = 0; i < s; ++i) {
      if (!alive[i]) continue;
      for (auto it = edges[i].begin(); it != edges[i].end();) {
        if (uses[*it] == 1) {
          it = edges[i].erase(it);
          changed = true;
        } else {
          ++it;
        }
      }
    }
    return changed;
  };

  auto remove_contained_edge = [&] {
    for (std::size_t e = 0; e < s; ++e) {
      if (!alive[e]) continue;
      for (std::size_t f = 0; f < s; ++f) {
        if (f == e || !alive[f]) continue;
        if (std::includes(edges[f].begin(), edges[f].end(), edges[e].begin(), edges[e].end())) {
          alive[e] = false;
          --live;
          tree.parent[e] = f;
          return true;
        }
      }
    }
    return false;
  };

  while (live > 1) {
    bool progressed = drop_lonely_features();
    if (remove_contained_edge()) progressed = true;
    if (!progressed) {
      std::vector<std::vector<std::string>> residual;
      std::string text = "join is cyclic; residual hyperedges:";
      for (std::size_t i = 0; i < s; ++i) {
        if (!alive[i]) continue;
        std::vector<std::string> names;
        text += " {";
        bool first = true;
        for (auto f : edges[i]) {
          names.push_back(partition.full[f]);
          text += (first ? "" : ",") + partition.full[f];
          first = false;
        }
        text += "}";
        residual.push_back(std::move(names));
      }
      throw CyclicError(text, std::move(residual));
    }
  }

  for (std::size_t i = 0; i < s; ++i) {
    if (tree.parent[i] == JoinTree::kNoParent) {
      tree.root = i;
      continue;
    }
    tree.children[tree.parent[i]].push_back(i);
    const auto& a = partition.per_table[i];
    const auto& b = partition.per_table[tree.parent[i]];
    for (auto f : a)
      if (std::find(b.begin(), b.end(), f) != b.end()) tree.shared[i].push_back(f);
    std::sort(tree.shared[i].begin(), tree.shared[i].end());
  }
  for (auto& c : tree.children) std::sort(c.begin(), c.end());
  return tree;
}

JoinTree check_acyclic(const std::vector<Table>& tables) { return check_acyclic(make_partition(tables)); }

bool satisfies_running_intersection(const JoinTree& tree, const FeaturePartition& partition) {
  const std::size_t s = partition.tables();
  if (tree.size() != s || tree.root >= s) return false;
  // connectivity
  if (tree.pre_order().size() != s) return false;
  for (std::size_t f = 0; f < partition.dim(); ++f) {
    std::vector<bool> holds(s, false);
    std::size_t count = 0;
    for (std::size_t i = 0; i < s; ++i) {
      const auto& d = partition.per_table[i];
      if (std::find(d.begin(), d.end(), f) != d.end()) {
        holds[i] = true;
        ++count;
      }
    }
    // In a tree, a node subset is connected iff it has exactly one member whose parent is
    // outside the subset.
    std::size_t tops = 0;
    for (std::size_t i = 0; i < s; ++i)
      if (holds[i] && (tree.parent[i] == JoinTree::kNoParent || !holds[tree.parent[i]])) ++tops;
    if (count > 0 && tops != 1) return false;
  }
  return true;
}

}  // namespace relcore
