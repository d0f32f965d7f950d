#include "relcore/weights.hpp"

#include <cmath>
#include <string>

#include "relcore/errors.hpp"
#include "relcore/parallel.hpp"
#include "relcore/rng.hpp"
#include "relcore/sample.hpp"

namespace relcore {

WeightParams WeightParams::make(double eps1, double beta, double lambda, std::size_t k, std::uint64_t seed,
                                std::size_t m_cap) {
  expect(eps1 > 0.0 && eps1 < 1.0, "weights: eps1 must lie in (0, 1)");
  expect(beta >= 0.0 && beta < 1.0, "weights: beta must lie in [0, 1)");
  expect(eps1 > beta, "weights: eps1 must exceed beta");
  expect(lambda > 0.0 && lambda < 1.0, "weights: lambda must lie in (0, 1)");
  expect(k >= 1, "weights: k must be at least 1");
  expect(m_cap >= 1, "weights: sample cap must be at least 1");
  WeightParams p;
  p.eps1 = eps1;
  p.beta = beta;
  p.lambda = lambda;
  p.k = k;
  p.seed = seed;
  const double kk = static_cast<double>(k);
  p.delta = (eps1 - beta) / (2.0 * (1.0 + beta));
  p.tau = eps1 * (1.0 - p.delta) / (8.0 * kk * kk * (1.0 + beta));
  expect(2.0 * p.tau / (1.0 - p.delta) < 1.0 / kk, "weights: threshold too large for k");
  p.m_formula = std::ceil(3.0 / (p.delta * p.delta * p.tau) * std::log(2.0 * kk / lambda));
  p.m_capped = p.m_formula > static_cast<double>(m_cap);
  p.m = p.m_capped ? m_cap : static_cast<std::size_t>(p.m_formula);
  return p;
}

double Coreset::total_weight() const {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum;
}

Coreset Coreset::emitted() const {
  Coreset out;
  out.points = PointSet(points.dim());
  out.params = params;
  out.final_radius = final_radius;
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    if (!cubes[i].heavy) continue;
    out.points.push_back(points[i]);
    out.weights.push_back(weights[i]);
    out.cubes.push_back(cubes[i]);
  }
  return out;
}

namespace {

constexpr std::size_t kChunk = 4096;

std::vector<const RowFilter*> pointers(const std::vector<std::optional<RowFilter>>& filters) {
  std::vector<const RowFilter*> out(filters.size(), nullptr);
  for (std::size_t i = 0; i < filters.size(); ++i)
    if (filters[i]) out[i] = &*filters[i];
  return out;
}

}  // namespace

Coreset assign_weights(const RootSummary& summary, const JoinIndex& index, const WeightParams& params) {
  expect(!summary.cubes.empty(), "assign_weights: no root cubes");
  expect(params.m >= 1, "assign_weights: sample size must be positive");
  const auto& partition = index.partition();
  const std::size_t d = partition.dim();
  const std::size_t s = index.table_count();

  Coreset out;
  out.points = summary.centers;
  out.params = params;
  out.final_radius = summary.final_radius;
  out.weights.assign(summary.cubes.size(), 0.0);
  out.cubes.resize(summary.cubes.size());

  std::vector<const PseudoCube*> heavy;
  for (std::size_t i = 0; i < summary.cubes.size(); ++i) {
    const PseudoCube& cube = summary.cubes[i];
    const auto filters = index.cube_filters(cube);
    const auto ptrs = pointers(filters);
    PreparedSampler sampler(index, ptrs);
    CubeDiagnostics& diag = out.cubes[i];
    diag.exact_count = sampler.total();
    if (diag.exact_count == 0)
      throw ContractViolation("assign_weights: root cube " + std::to_string(i) + " holds no join tuple");

    if (i == 0) {
      diag.heavy = true;
      diag.ratio = 1.0;
      out.weights[0] = static_cast<double>(diag.exact_count);
      heavy.push_back(&cube);
      continue;
    }

    const std::uint64_t cube_seed = split_seed(params.seed, i);
    const std::size_t m = params.m;
    const std::size_t chunks = (m + kChunk - 1) / kChunk;
    std::vector<std::size_t> fresh(chunks, 0);
    parallel_for(chunks, [&](std::size_t c) {
      std::vector<std::uint32_t> rows(s);
      std::vector<double> point(d);
      const std::size_t end = std::min(m, (c + 1) * kChunk);
      std::size_t g = 0;
      for (std::size_t j = c * kChunk; j < end; ++j) {
        CounterRng rng(cube_seed, j);
        sampler.draw_rows(rng, rows);
        index.assemble(rows, point);
        bool covered = false;
        for (const PseudoCube* h : heavy) {
          if (cube_contains(partition, *h, point)) {
            covered = true;
            break;
          }
        }
        if (!covered) ++g;
      }
      fresh[c] = g;
    });
    std::size_t g = 0;
    for (auto f : fresh) g += f;
    diag.samples = m;
    diag.fresh = g;
    diag.ratio = static_cast<double>(g) / static_cast<double>(m);
    diag.heavy = diag.ratio >= 2.0 * params.tau;
    if (diag.heavy) {
      out.weights[i] = diag.ratio * static_cast<double>(diag.exact_count);
      heavy.push_back(&cube);
    }
  }
  return out;
}

std::vector<double> exact_weights_given(const RootSummary& summary, const FeaturePartition& partition,
                                        const DesignMatrix& matrix, const std::vector<bool>& heavy) {
  expect(heavy.size() == summary.cubes.size(), "exact_weights: one heavy flag per cube expected");
  std::vector<double> w(summary.cubes.size(), 0.0);
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    auto p = matrix.points[r];
    for (std::size_t i = 0; i < summary.cubes.size(); ++i) {
      if (heavy[i] && cube_contains(partition, summary.cubes[i], p)) {
        w[i] += 1.0;
        break;
      }
    }
  }
  return w;
}

std::vector<double> exact_weights(const RootSummary& summary, const FeaturePartition& partition,
                                  const DesignMatrix& matrix, double threshold) {
  const std::size_t k = summary.cubes.size();
  std::vector<bool> heavy(k, false);
  std::vector<std::uint8_t> charged(matrix.rows(), 0);
  std::vector<double> w(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t inside = 0, fresh = 0;
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
      if (!cube_contains(partition, summary.cubes[i], matrix.points[r])) continue;
      ++inside;
      if (!charged[r]) ++fresh;
    }
    heavy[i] = i == 0 || (inside > 0 && static_cast<double>(fresh) >= threshold * static_cast<double>(inside));
    if (!heavy[i]) continue;
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
      if (!charged[r] && cube_contains(partition, summary.cubes[i], matrix.points[r])) {
        charged[r] = 1;
        w[i] += 1.0;
      }
    }
  }
  return w;
}

RootSummary drop_empty_cubes(const RootSummary& summary, const JoinIndex& index) {
  RootSummary out;
  out.k = summary.k;
  out.final_radius = summary.final_radius;
  out.centers = PointSet(summary.centers.dim());
  for (std::size_t i = 0; i < summary.cubes.size(); ++i) {
    if (index.count(summary.cubes[i]) == 0) continue;
    out.centers.push_back(summary.centers[i]);
    out.cubes.push_back(summary.cubes[i]);
  }
  return out;
}

}  // namespace relcore
