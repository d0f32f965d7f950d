#include "relcore/losses.hpp"

#include <algorithm>
#include <cmath>

#include "relcore/errors.hpp"
#include "relcore/parallel.hpp"

namespace relcore {

namespace {

constexpr std::size_t kChunk = 2048;

// Neumaier's compensated sum.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Labels <= 0 are the negative class for both linear models.
double sign_of(double label) { return label > 0.0 ? 1.0 : -1.0; }

// log(1 + exp(-u)) without overflow.
double softplus_neg(double u) { return u > 0 ? std::log1p(std::exp(-u)) : -u + std::log1p(std::exp(u)); }

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

void check_data(const LossModel& model, const Theta& theta, const Dataset& data, std::span<const double> weights) {
  expect(weights.size() == data.size(), "loss: one weight per point expected");
  expect(!model.needs_labels() || data.labeled(), "loss: labels are required for this model");
  expect(!data.labeled() || data.y.size() == data.size(), "loss: one label per point expected");
  if (model.kind == LossKind::kmeans) {
    expect(!theta.centers.empty(), "loss: k-means needs at least one center");
    expect(theta.centers.dim() == data.x.dim(), "loss: center dimension mismatch");
  } else {
    expect(theta.omega.size() == data.x.dim(), "loss: omega dimension mismatch");
  }
}

}  // namespace

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kmeans:
      return "kmeans";
    case LossKind::logistic:
      return "logistic";
    case LossKind::svm:
      return "svm";
  }
  return "unknown";
}

LossKind parse_loss_kind(const std::string& name) {
  if (name == "kmeans") return LossKind::kmeans;
  if (name == "logistic") return LossKind::logistic;
  if (name == "svm") return LossKind::svm;
  throw ContractViolation("unknown loss '" + name + "' (expected kmeans, logistic or svm)");
}

double Theta::norm() const {
  double s = bias * bias;
  for (double v : omega) s += v * v;
  return std::sqrt(s);
}

LossModel LossModel::kmeans(std::size_t clusters, double epsilon) {
  expect(clusters >= 1, "kmeans: at least one cluster");
  expect(epsilon > 0.0 && epsilon < 1.0, "kmeans: epsilon must lie in (0, 1)");
  LossModel m;
  m.kind = LossKind::kmeans;
  m.clusters = clusters;
  m.epsilon = epsilon;
  return m;
}

LossModel LossModel::logistic() {
  LossModel m;
  m.kind = LossKind::logistic;
  return m;
}

LossModel LossModel::svm(double reg) {
  expect(reg > 0.0, "svm: hinge weight must be positive");
  LossModel m;
  m.kind = LossKind::svm;
  m.reg = reg;
  return m;
}

double LossModel::alpha(const Theta& theta) const {
  return kind == LossKind::kmeans ? 1.0 + 1.0 / epsilon : theta.norm();
}

double LossModel::beta() const { return kind == LossKind::kmeans ? epsilon : 0.0; }

double LossModel::z() const { return kind == LossKind::kmeans ? 2.0 : 1.0; }

Dataset split_label(const PointSet& points, std::optional<std::size_t> label) {
  Dataset out;
  if (!label) {
    out.x = points;
    return out;
  }
  expect(*label < points.dim(), "split_label: label column out of range");
  const std::size_t d = points.dim() - 1;
  out.x = PointSet(d);
  out.x.reserve(points.size());
  out.y.reserve(points.size());
  std::vector<double> buf(d);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto p = points[i];
    std::size_t j = 0;
    for (std::size_t c = 0; c < p.size(); ++c)
      if (c != *label) buf[j++] = p[c];
    out.x.push_back(buf);
    out.y.push_back(p[*label]);
  }
  return out;
}

double loss_value(const LossModel& model, const Theta& theta, std::span<const double> x, std::optional<double> label) {
  switch (model.kind) {
    case LossKind::kmeans: {
      double best = INFINITY;
      for (std::size_t c = 0; c < theta.centers.size(); ++c) best = std::min(best, squared_distance(x, theta.centers[c]));
      return best;
    }
    case LossKind::logistic: {
      expect(label.has_value(), "logistic loss needs a label");
      const double t = dot(theta.omega, x) + theta.bias;
      return softplus_neg(sign_of(*label) * t);
    }
    case LossKind::svm: {
      expect(label.has_value(), "SVM loss needs a label");
      const double t = dot(theta.omega, x) + theta.bias;
      return std::max(0.0, 1.0 - sign_of(*label) * t);
    }
  }
  return 0.0;
}

double mean_loss(const LossModel& model, const Theta& theta, const Dataset& data, std::span<const double> weights) {
  check_data(model, theta, data, weights);
  const std::size_t n = data.size();
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<Accumulator> partial(chunks), mass(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      expect(weights[i] >= 0.0, "loss: negative weight");
      if (weights[i] == 0.0) continue;
      const auto label = data.labeled() ? std::optional<double>(data.y[i]) : std::nullopt;
      partial[c].add(weights[i] * loss_value(model, theta, data.x[i], label));
      mass[c].add(weights[i]);
    }
  });
  Accumulator total, total_mass;
  for (std::size_t c = 0; c < chunks; ++c) {
    total.add(partial[c].sum);
    total.add(partial[c].comp);
    total_mass.add(mass[c].sum);
    total_mass.add(mass[c].comp);
  }
  expect(total_mass.value() > 0.0, "loss: weights sum to zero");
  return total.value() / total_mass.value();
}

double weighted_risk(const LossModel& model, const Theta& theta, const Dataset& data,
                     std::span<const double> weights) {
  const double mean = mean_loss(model, theta, data, weights);
  if (model.kind != LossKind::svm) return mean;
  return 0.5 * dot(theta.omega, theta.omega) + model.reg * mean;
}

std::vector<double> risk_gradient(const LossModel& model, const Theta& theta, const Dataset& data,
                                  std::span<const double> weights) {
  expect(model.kind != LossKind::kmeans, "risk_gradient: only for linear models");
  check_data(model, theta, data, weights);
  const std::size_t n = data.size();
  const std::size_t d = data.x.dim();
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<std::vector<double>> partial(chunks, std::vector<double>(d + 1, 0.0));
  std::vector<double> mass(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    auto& g = partial[c];
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      if (weights[i] == 0.0) continue;
      auto x = data.x[i];
      const double sgn = sign_of(data.y[i]);
      const double t = dot(theta.omega, x) + theta.bias;
      double coef = 0.0;  // d f / d t
      if (model.kind == LossKind::logistic) {
        coef = -sgn * sigmoid(-sgn * t);
      } else if (1.0 - sgn * t > 0.0) {
        coef = -sgn;
      }
      coef *= weights[i];
      for (std::size_t j = 0; j < d; ++j) g[j] += coef * x[j];
      g[d] += coef;
      mass[c] += weights[i];
    }
  });
  std::vector<double> grad(d + 1, 0.0);
  double total_mass = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t j = 0; j <= d; ++j) grad[j] += partial[c][j];
    total_mass += mass[c];
  }
  expect(total_mass > 0.0, "loss: weights sum to zero");
  const double scale = (model.kind == LossKind::svm ? model.reg : 1.0) / total_mass;
  for (auto& v : grad) v *= scale;
  if (model.kind == LossKind::svm)
    for (std::size_t j = 0; j < d; ++j) grad[j] += theta.omega[j];
  return grad;
}

double continuity_check(const LossModel& model, const Theta& theta, const Dataset& data,
                        std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  expect(!model.needs_labels() || data.labeled(), "continuity_check: labels are required for this model");
  const double a = model.alpha(theta);
  const double b = model.beta();
  const double z = model.z();
  double worst = -INFINITY;
  for (auto [i, j] : pairs) {
    expect(i < data.size() && j < data.size(), "continuity_check: index out of range");
    std::optional<double> yi, yj;
    if (data.labeled()) {
      yi = data.y[i];
      yj = data.y[j];
      expect(!model.needs_labels() || (*yi > 0.0) == (*yj > 0.0), "continuity_check: pair labels differ");
    }
    const double fp = loss_value(model, theta, data.x[i], yi);
    const double fq = loss_value(model, theta, data.x[j], yj);
    const double dist = std::sqrt(squared_distance(data.x[i], data.x[j]));
    worst = std::max(worst, std::abs(fp - fq) - (a * std::pow(dist, z) + b * std::abs(fq)));
  }
  return worst;
}

std::vector<double> unit_weights(std::size_t n) { return std::vector<double>(n, 1.0); }

}  // namespace relcore
