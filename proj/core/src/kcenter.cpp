#include "relcore/kcenter.hpp"

#include <bit>
#include <cstring>
#include <string>
#include <unordered_set>

namespace relcore {

std::vector<std::size_t> distinct_points(const PointSet& points) {
  std::vector<std::size_t> keep;
  std::unordered_set<std::string> seen;
  std::string key(points.dim() * sizeof(std::uint64_t), '\0');
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto p = points[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double v = p[j] == 0.0 ? 0.0 : p[j];
      auto bits = std::bit_cast<std::uint64_t>(v);
      std::memcpy(key.data() + j * sizeof bits, &bits, sizeof bits);
    }
    if (seen.insert(key).second) keep.push_back(i);
  }
  return keep;
}

namespace {

CenterSet run_gonzalez(const PointSet& points, const std::vector<std::size_t>& distinct, std::size_t k,
                       std::size_t first) {
  auto greedy = farthest_point_greedy_from(distinct.size(), k, first, [&](std::size_t a, std::size_t b) {
    return squared_distance(points[distinct[a]], points[distinct[b]]);
  });
  CenterSet out;
  out.centers = PointSet(points.dim());
  for (auto i : greedy.picks) {
    out.centers.push_back(points[distinct[i]]);
    out.source_index.push_back(distinct[i]);
  }
  out.cover_radius = greedy.cover_radius;
  return out;
}

}  // namespace

CenterSet gonzalez(const PointSet& points, std::size_t k, std::uint64_t seed) {
  expect(!points.empty(), "gonzalez: empty point set");
  const auto distinct = distinct_points(points);
  return run_gonzalez(points, distinct, k, seeded_first_pick(distinct.size(), seed));
}

CenterSet gonzalez_from(const PointSet& points, std::size_t k, std::size_t first) {
  expect(first < points.size(), "gonzalez: first pick out of range");
  const auto distinct = distinct_points(points);
  // position of points[first] among the distinct representatives
  std::size_t start = 0;
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    if (squared_distance(points[distinct[i]], points[first]) == 0.0) {
      start = i;
      break;
    }
  }
  return run_gonzalez(points, distinct, k, start);
}

double directed_hausdorff(const PointSet& a, const PointSet& b) {
  expect(!a.empty() && !b.empty(), "directed_hausdorff: empty point set");
  expect(a.dim() == b.dim(), "directed_hausdorff: dimension mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double best = INFINITY;
    for (std::size_t j = 0; j < b.size() && best > worst; ++j) best = std::min(best, squared_distance(a[i], b[j]));
    worst = std::max(worst, best);
  }
  return covering_sqrt(worst);
}

}  // namespace relcore
