#include <gtest/gtest.h>

#include <random>

#include "relcore/errors.hpp"
#include "relcore/parallel.hpp"
#include "relcore/train.hpp"

using namespace relcore;

namespace {

Dataset separable(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Dataset d;
  d.x = PointSet(2);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = i % 2 ? 1.0 : 0.0;
    const double shift = y > 0 ? 2.5 : -2.5;
    d.x.push_back(std::vector<double>{shift + 0.5 * g(rng), 0.5 * g(rng)});
    d.y.push_back(y);
  }
  return d;
}

}  // namespace

TEST(Train, KmeansSingleClusterIsWeightedCentroid) {
  Dataset d;
  d.x = PointSet(2);
  d.x.push_back(std::vector<double>{0, 0});
  d.x.push_back(std::vector<double>{4, 2});
  d.x.push_back(std::vector<double>{1, 1});
  const std::vector<double> w = {1, 3, 0};
  const auto r = train(LossModel::kmeans(1), d, w, {});
  ASSERT_EQ(r.theta.centers.size(), 1u);
  EXPECT_DOUBLE_EQ(r.theta.centers[0][0], 3.0);
  EXPECT_DOUBLE_EQ(r.theta.centers[0][1], 1.5);
}

TEST(Train, KmeansFindsSeparatedClusters) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 0.1);
  Dataset d;
  d.x = PointSet(1);
  for (int i = 0; i < 300; ++i) d.x.push_back(std::vector<double>{(i % 3) * 10.0 + g(rng)});
  const auto r = train(LossModel::kmeans(3), d, unit_weights(300), {100, 4});
  EXPECT_LT(r.objective, 0.05);
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1] + 1e-12);
}

TEST(Train, KmeansPlusPlusHandlesFewDistinctPoints) {
  Dataset d;
  d.x = PointSet(1);
  for (int i = 0; i < 5; ++i) d.x.push_back(std::vector<double>{1.0});
  const auto centers = kmeanspp_seed(d.x, unit_weights(5), 3, 0);
  EXPECT_EQ(centers.size(), 1u);
}

TEST(Train, LogisticLossDecreasesMonotonically) {
  std::mt19937_64 rng(2);
  const auto d = separable(rng, 400);
  const auto r = train(LossModel::logistic(), d, unit_weights(400), {200, 0});
  ASSERT_FALSE(r.history.empty());
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1] + 1e-12);
  EXPECT_LT(r.objective, 0.1);
  EXPECT_GT(r.theta.omega[0], 0.0);
}

TEST(Train, SvmSeparatesAndKeepsBestIterate) {
  std::mt19937_64 rng(3);
  const auto d = separable(rng, 400);
  const auto model = LossModel::svm(10.0);
  const auto r = train(model, d, unit_weights(400), {300, 0});
  double best = INFINITY;
  for (double h : r.history) best = std::min(best, h);
  EXPECT_LE(r.objective, best + 1e-12);
  EXPECT_DOUBLE_EQ(r.objective, weighted_risk(model, r.theta, d, unit_weights(400)));
  EXPECT_LT(r.objective, weighted_risk(model, Theta{{}, {0.0, 0.0}, 0.0}, d, unit_weights(400)));
  EXPECT_GT(r.theta.omega[0], 0.0);
}

TEST(Train, DeterministicAcrossThreads) {
  std::mt19937_64 rng(4);
  const auto d = separable(rng, 5000);
  for (auto model : {LossModel::kmeans(4), LossModel::logistic(), LossModel::svm()}) {
    set_thread_count(1);
    const auto a = train(model, d, unit_weights(d.size()), {50, 9});
    set_thread_count(8);
    const auto b = train(model, d, unit_weights(d.size()), {50, 9});
    set_thread_count(1);
    EXPECT_EQ(a.history, b.history) << to_string(model.kind);
  }
}

TEST(Train, NonFiniteObjectiveIsDivergence) {
  // squared distances to the centroid overflow to infinity
  Dataset d;
  d.x = PointSet(1);
  d.x.push_back(std::vector<double>{1e200});
  d.x.push_back(std::vector<double>{-1e200});
  EXPECT_THROW(train(LossModel::kmeans(1), d, unit_weights(2), {}), DivergenceError);
}

TEST(Train, RejectsBadInput) {
  Dataset d;
  d.x = PointSet(1);
  d.x.push_back(std::vector<double>{1.0});
  d.y = {1.0};
  EXPECT_THROW(train(LossModel::logistic(), d, std::vector<double>{0.0}, {}), ContractViolation);
  EXPECT_THROW(train(LossModel::logistic(), d, std::vector<double>{}, {}), ContractViolation);
}
