#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relcore/point_set.hpp"

namespace relcore {

enum class LossKind { kmeans, logistic, svm };

std::string to_string(LossKind kind);
LossKind parse_loss_kind(const std::string& name);

/// Model parameters. k-means uses `centers`; the linear models use `omega` and `bias`.
struct Theta {
  PointSet centers;
  std::vector<double> omega;
  double bias = 0.0;

  /// Euclidean norm of (omega, bias).
  double norm() const;
};

/// A loss family together with its continuity constants:
/// |f(theta, p) - f(theta, q)| <= alpha ||p - q||^z + beta |f(theta, q)|.
struct LossModel {
  LossKind kind = LossKind::kmeans;
  std::size_t clusters = 1;  // k-means only
  double epsilon = 0.5;      // k-means only, sets beta
  double reg = 1.0;          // SVM hinge weight: F = 0.5 ||omega||^2 + reg * mean hinge

  static LossModel kmeans(std::size_t clusters, double epsilon = 0.5);
  static LossModel logistic();
  static LossModel svm(double reg = 1.0);

  bool needs_labels() const noexcept { return kind != LossKind::kmeans; }
  double alpha(const Theta& theta) const;
  double beta() const;
  double z() const;
};

/// Points with optional labels in {0, 1}. SVM maps labels <= 0 to -1.
struct Dataset {
  PointSet x;
  std::vector<double> y;  // empty when unlabeled

  std::size_t size() const noexcept { return x.size(); }
  bool labeled() const noexcept { return !y.empty(); }
};

/// Splits a point set whose column `label` holds the label into features and labels.
Dataset split_label(const PointSet& points, std::optional<std::size_t> label);

/// Per-point loss f(theta, p). Logistic is the cross-entropy of 1/(1+e^-t), SVM the hinge.
double loss_value(const LossModel& model, const Theta& theta, std::span<const double> x,
                  std::optional<double> label = std::nullopt);

/// sum_i w_i f(theta, p_i) / sum_i w_i, with compensated summation. No regularizer.
double mean_loss(const LossModel& model, const Theta& theta, const Dataset& data, std::span<const double> weights);

/// Full objective: mean_loss, and for SVM 0.5 ||omega||^2 + reg * mean hinge.
double weighted_risk(const LossModel& model, const Theta& theta, const Dataset& data,
                     std::span<const double> weights);

/// Gradient of weighted_risk with respect to (omega, bias) for the linear models; the SVM
/// gradient is a subgradient at kinks. Last entry is the bias component.
std::vector<double> risk_gradient(const LossModel& model, const Theta& theta, const Dataset& data,
                                  std::span<const double> weights);

/// Largest violation of the continuity bound over the given pairs; <= 0 means it holds.
/// Pairs index into `data` and must share labels for the linear models.
double continuity_check(const LossModel& model, const Theta& theta, const Dataset& data,
                        std::span<const std::pair<std::size_t, std::size_t>> pairs);

/// Uniform weights of 1.
std::vector<double> unit_weights(std::size_t n);

}  // namespace relcore
