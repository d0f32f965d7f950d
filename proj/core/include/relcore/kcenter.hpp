#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "relcore/errors.hpp"
#include "relcore/point_set.hpp"
#include "relcore/rng.hpp"

namespace relcore {

/// Greedy k-center result. `source_index` refers to the points passed in.
struct CenterSet {
  PointSet centers;
  std::vector<std::size_t> source_index;
  double cover_radius = 0.0;
};

struct GreedyPicks {
  std::vector<std::size_t> picks;
  double cover_radius = 0.0;
};

/// Smallest double r with r * r >= sq, so a ball of radius r keeps its farthest point.
inline double covering_sqrt(double sq) {
  if (!(sq > 0.0)) return 0.0;
  double r = std::sqrt(sq);
  while (r * r < sq) r = std::nextafter(r, INFINITY);
  return r;
}

/// Gonzalez farthest-point traversal over `n` distinct candidates given a squared-distance
/// oracle, starting at candidate `first`. Each next pick is the candidate farthest from the
/// picks so far (lowest index on ties). Stops early once every candidate is a pick.
template <typename SquaredDistance>
GreedyPicks farthest_point_greedy_from(std::size_t n, std::size_t k, std::size_t first, SquaredDistance&& d2) {
  expect(n >= 1, "gonzalez: empty point set");
  expect(k >= 1, "gonzalez: k must be at least 1");
  expect(first < n, "gonzalez: first pick out of range");
  GreedyPicks out;
  std::size_t next = first;
  std::vector<double> nearest(n, INFINITY);
  double worst = 0.0;
  while (true) {
    out.picks.push_back(next);
    worst = -1.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = d2(i, next);
      if (d < nearest[i]) nearest[i] = d;
      if (nearest[i] > worst) {
        worst = nearest[i];
        arg = i;
      }
    }
    if (out.picks.size() >= k || worst <= 0.0) break;
    next = arg;
  }
  out.cover_radius = covering_sqrt(worst);
  return out;
}

/// Seed-chosen first pick: the candidate at position 0 of a seeded uniform shuffle.
inline std::size_t seeded_first_pick(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, 0x6b63656e746572ULL);
  return static_cast<std::size_t>(rng.uniform_below(n));
}

template <typename SquaredDistance>
GreedyPicks farthest_point_greedy(std::size_t n, std::size_t k, std::uint64_t seed, SquaredDistance&& d2) {
  expect(n >= 1, "gonzalez: empty point set");
  return farthest_point_greedy_from(n, k, seeded_first_pick(n, seed), std::forward<SquaredDistance>(d2));
}

/// Indices of the first occurrence of each distinct point (exact comparison, -0.0 == 0.0).
std::vector<std::size_t> distinct_points(const PointSet& points);

/// 2-approximate k-center over the distinct points of `points`.
CenterSet gonzalez(const PointSet& points, std::size_t k, std::uint64_t seed);
/// Same, starting from `points[first]`.
CenterSet gonzalez_from(const PointSet& points, std::size_t k, std::size_t first);

/// max over a in A of min over b in B of ||a - b||.
double directed_hausdorff(const PointSet& a, const PointSet& b);

}  // namespace relcore
