#include "relcore/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "relcore/errors.hpp"
#include "relcore/parallel.hpp"
#include "relcore/rng.hpp"

namespace relcore {

namespace {

constexpr std::size_t kChunk = 2048;

class DivergenceWatch {
 public:
  explicit DivergenceWatch(std::size_t window) : window_(window) {}

  void observe(double objective) {
    if (!std::isfinite(objective)) throw DivergenceError("training objective became non-finite");
    rises_ = objective > last_ ? rises_ + 1 : 0;
    last_ = objective;
    if (window_ > 0 && rises_ >= window_)
      throw DivergenceError("training objective increased for " + std::to_string(rises_) + " consecutive steps");
  }

 private:
  std::size_t window_;
  std::size_t rises_ = 0;
  double last_ = std::numeric_limits<double>::infinity();
};

double total_weight(std::span<const double> w) {
  double s = 0.0;
  for (double v : w) {
    expect(v >= 0.0, "train: negative weight");
    s += v;
  }
  expect(s > 0.0, "train: weights sum to zero");
  return s;
}

TrainResult train_kmeans(const LossModel& model, const Dataset& data, std::span<const double> weights,
                         const TrainOptions& options) {
  const std::size_t n = data.size();
  const std::size_t d = data.x.dim();
  Theta theta;
  theta.centers = kmeanspp_seed(data.x, weights, model.clusters, options.seed);
  const std::size_t k = theta.centers.size();
  std::vector<std::uint32_t> assign(n, std::numeric_limits<std::uint32_t>::max());
  TrainResult out;
  DivergenceWatch watch(options.divergence_window);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    std::vector<std::vector<double>> sums(chunks, std::vector<double>(k * d, 0.0));
    std::vector<std::vector<double>> mass(chunks, std::vector<double>(k, 0.0));
    std::vector<std::uint8_t> changed(chunks, 0);
    parallel_for(chunks, [&](std::size_t c) {
      const std::size_t end = std::min(n, (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < end; ++i) {
        auto x = data.x[i];
        std::uint32_t best = 0;
        double best_d = INFINITY;
        for (std::size_t j = 0; j < k; ++j) {
          const double dd = squared_distance(x, theta.centers[j]);
          if (dd < best_d) {
            best_d = dd;
            best = static_cast<std::uint32_t>(j);
          }
        }
        if (assign[i] != best) changed[c] = 1;
        assign[i] = best;
        const double w = weights[i];
        for (std::size_t t = 0; t < d; ++t) sums[c][best * d + t] += w * x[t];
        mass[c][best] += w;
      }
    });
    const bool any_change = std::any_of(changed.begin(), changed.end(), [](auto v) { return v != 0; });
    if (!any_change && it > 0) break;
    for (std::size_t j = 0; j < k; ++j) {
      double m = 0.0;
      std::vector<double> s(d, 0.0);
      for (std::size_t c = 0; c < chunks; ++c) {
        m += mass[c][j];
        for (std::size_t t = 0; t < d; ++t) s[t] += sums[c][j * d + t];
      }
      if (m <= 0.0) continue;  // empty cluster keeps its center
      auto center = theta.centers[j];
      for (std::size_t t = 0; t < d; ++t) center[t] = s[t] / m;
    }
    const double obj = mean_loss(model, theta, data, weights);
    out.history.push_back(obj);
    watch.observe(obj);
    out.iterations = it + 1;
  }
  out.objective = mean_loss(model, theta, data, weights);
  out.theta = std::move(theta);
  return out;
}

double weighted_mean_sq_norm(const Dataset& data, std::span<const double> weights, double mass) {
  double s = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double q = 1.0;  // bias coordinate
    for (double v : data.x[i]) q += v * v;
    s += weights[i] * q;
  }
  return s / mass;
}

TrainResult train_logistic(const LossModel& model, const Dataset& data, std::span<const double> weights,
                           const TrainOptions& options) {
  const std::size_t d = data.x.dim();
  const double mass = total_weight(weights);
  const double l2 = options.logistic_l2;
  const double smooth = 0.25 * weighted_mean_sq_norm(data, weights, mass) + l2;
  const double step = 1.0 / smooth;
  Theta theta;
  theta.omega.assign(d, 0.0);
  auto objective = [&](const Theta& t) {
    double r = 0.0;
    for (double v : t.omega) r += v * v;
    return mean_loss(model, t, data, weights) + 0.5 * l2 * r;
  };
  TrainResult out;
  DivergenceWatch watch(options.divergence_window);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    auto g = risk_gradient(model, theta, data, weights);
    double gn = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      g[j] += l2 * theta.omega[j];
      gn += g[j] * g[j];
    }
    gn += g[d] * g[d];
    if (std::sqrt(gn) < 1e-10) break;
    for (std::size_t j = 0; j < d; ++j) theta.omega[j] -= step * g[j];
    theta.bias -= step * g[d];
    const double obj = objective(theta);
    out.history.push_back(obj);
    watch.observe(obj);
    out.iterations = it + 1;
  }
  out.objective = weighted_risk(model, theta, data, weights);
  out.theta = std::move(theta);
  return out;
}

TrainResult train_svm(const LossModel& model, const Dataset& data, std::span<const double> weights,
                      const TrainOptions& options) {
  const std::size_t d = data.x.dim();
  total_weight(weights);
  Theta theta;
  theta.omega.assign(d, 0.0);
  Theta best = theta;
  double best_obj = weighted_risk(model, theta, data, weights);
  TrainResult out;
  DivergenceWatch watch(options.divergence_window);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const auto g = risk_gradient(model, theta, data, weights);
    // The objective is 1-strongly convex in omega, which gives the 1/t schedule.
    const double step = 1.0 / static_cast<double>(it + 1);
    for (std::size_t j = 0; j < d; ++j) theta.omega[j] -= step * g[j];
    theta.bias -= step * g[d];
    const double obj = weighted_risk(model, theta, data, weights);
    out.history.push_back(obj);
    watch.observe(obj);
    if (obj < best_obj) {
      best_obj = obj;
      best = theta;
    }
    out.iterations = it + 1;
  }
  out.objective = best_obj;
  out.theta = std::move(best);
  return out;
}

}  // namespace

PointSet kmeanspp_seed(const PointSet& points, std::span<const double> weights, std::size_t k, std::uint64_t seed) {
  expect(!points.empty(), "kmeans++: empty point set");
  expect(weights.size() == points.size(), "kmeans++: one weight per point expected");
  expect(k >= 1, "kmeans++: k must be at least 1");
  const double mass = total_weight(weights);
  CounterRng rng(seed, 0x6b6d65616e73ULL);
  auto draw = [&](const std::vector<double>& score, double total) {
    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < score.size(); ++i) {
      if (score[i] <= 0.0) continue;
      acc += score[i];
      last = i;
      if (acc > target) return i;
    }
    return last;
  };
  PointSet centers(points.dim());
  std::vector<double> score(weights.begin(), weights.end());
  std::vector<double> nearest(points.size(), INFINITY);
  std::size_t pick = draw(score, mass);
  while (true) {
    centers.push_back(points[pick]);
    if (centers.size() >= k) break;
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(points[i], points[pick]));
      score[i] = weights[i] * nearest[i];
      total += score[i];
    }
    if (total <= 0.0) break;  // fewer distinct points than k
    pick = draw(score, total);
  }
  return centers;
}

TrainResult train(const LossModel& model, const Dataset& data, std::span<const double> weights,
                  const TrainOptions& options) {
  expect(!data.x.empty(), "train: empty data");
  expect(weights.size() == data.size(), "train: one weight per point expected");
  switch (model.kind) {
    case LossKind::kmeans:
      return train_kmeans(model, data, weights, options);
    case LossKind::logistic:
      return train_logistic(model, data, weights, options);
    case LossKind::svm:
      return train_svm(model, data, weights, options);
  }
  throw ContractViolation("train: unknown model");
}

}  // namespace relcore
