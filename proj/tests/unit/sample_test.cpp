#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <map>

#include "relcore/count.hpp"
#include "relcore/errors.hpp"
#include "relcore/parallel.hpp"
#include "relcore/sample.hpp"
#include "support.hpp"

using namespace relcore;
using relcore::testing::Instance;
using relcore::testing::make_table;
using relcore::testing::Row;

namespace {

// p-value of Pearson's chi-squared statistic against equal expected counts.
double uniformity_p_value(const std::map<Row, std::size_t>& observed, std::size_t support, std::size_t draws) {
  const double expected = static_cast<double>(draws) / static_cast<double>(support);
  double stat = 0.0;
  std::size_t seen = 0;
  for (const auto& [row, n] : observed) {
    const double diff = static_cast<double>(n) - expected;
    stat += diff * diff / expected;
    ++seen;
  }
  stat += static_cast<double>(support - seen) * expected;  // categories never drawn
  if (support < 2) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(support - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

std::map<Row, std::size_t> tally(const PointSet& pts) {
  std::map<Row, std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) ++out[Row(pts[i].begin(), pts[i].end())];
  return out;
}

}  // namespace

TEST(Sample, SingleTableIsUniform) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({static_cast<double>(i)});
  const Instance in({make_table("A", {"a"}, rows)});
  const JoinIndex index(in.tables, in.partition, in.tree);
  const auto pts = uniform_sample(index, std::nullopt, 100000, 3);
  const auto counts = tally(pts);
  ASSERT_EQ(counts.size(), 10u);
  const double sigma = std::sqrt(100000 * 0.1 * 0.9);
  for (const auto& [row, n] : counts) EXPECT_NEAR(static_cast<double>(n), 10000.0, 3 * sigma);
}

TEST(Sample, TwoTableExampleIsUniform) {
  const Instance in(relcore::testing::table1());
  const JoinIndex index(in.tables, in.partition, in.tree);
  const auto pts = uniform_sample(index, std::nullopt, 60000, 17);
  const auto counts = tally(pts);
  ASSERT_EQ(counts.size(), 6u);
  const double sigma = std::sqrt(60000 * (1.0 / 6) * (5.0 / 6));
  for (const auto& [row, n] : counts) EXPECT_NEAR(static_cast<double>(n), 10000.0, 3 * sigma);
  EXPECT_GT(uniformity_p_value(counts, 6, 60000), 0.001);
}

TEST(Sample, FilteredByCube) {
  const Instance in(relcore::testing::table1());
  const JoinIndex index(in.tables, in.partition, in.tree);
  const auto pts = uniform_sample(index, PseudoCube{{0, 1}, {2, 1, 1}, 1.5}, 20000, 5);
  const auto counts = tally(pts);
  ASSERT_EQ(counts.size(), 2u);
  EXPECT_TRUE(counts.count(Row{1, 1, 1}));
  EXPECT_TRUE(counts.count(Row{2, 1, 1}));
  EXPECT_GT(uniformity_p_value(counts, 2, 20000), 0.001);
}

TEST(Sample, EmptyRegionThrows) {
  const Instance in(relcore::testing::table1());
  const JoinIndex index(in.tables, in.partition, in.tree);
  EXPECT_THROW(uniform_sample(index, PseudoCube{{0, 1}, {9, 9, 9}, 0.5}, 10, 1), EmptyRegion);
  EXPECT_THROW(uniform_sample(index, std::nullopt, 0, 1), ContractViolation);
}

TEST(Sample, SeedDeterminismAndThreadIndependence) {
  std::mt19937_64 rng(8);
  const Instance in(relcore::testing::random_acyclic_tables(rng, 4, 40, 8));
  const JoinIndex index(in.tables, in.partition, in.tree);
  if (index.join_size() == 0) GTEST_SKIP() << "empty instance";
  set_thread_count(1);
  const auto a = uniform_sample(index, std::nullopt, 5000, 42);
  const auto b = uniform_sample(index, std::nullopt, 5000, 42);
  set_thread_count(8);
  const auto c = uniform_sample(index, std::nullopt, 5000, 42);
  set_thread_count(1);
  const auto d = uniform_sample(index, std::nullopt, 5000, 43);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_FALSE(a == d);
}

TEST(Sample, DescentProbabilityIsExactlyUniform) {
  std::mt19937_64 rng(31);
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const Instance in(relcore::testing::random_acyclic_tables(rng, 4, 12, 8));
    const JoinIndex index(in.tables, in.partition, in.tree);
    const Count n = index.join_size();
    if (n == 0) continue;
    std::vector<const RowFilter*> none(in.tables.size(), nullptr);
    const PreparedSampler sampler(index, none);
    ASSERT_EQ(sampler.total(), n);
    // enumerate every row tuple; join members must get exactly 1/n, others 0
    std::vector<std::uint32_t> rows(in.tables.size(), 0);
    const auto members = relcore::testing::brute_join(in.tables, in.partition);
    std::size_t positive = 0;
    long double mass = 0.0L;
    while (true) {
      const long double p = sampler.descent_probability(rows);
      if (p > 0.0L) {
        ++positive;
        EXPECT_NEAR(static_cast<double>(p * static_cast<long double>(n)), 1.0, 1e-12);
      }
      mass += p;
      std::size_t t = 0;
      while (t < rows.size() && ++rows[t] == in.tables[t].rows()) rows[t++] = 0;
      if (t == rows.size()) break;
    }
    EXPECT_EQ(positive, members.size());
    EXPECT_NEAR(static_cast<double>(mass), 1.0, 1e-12);
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Sample, SamplesAreMembersAndPassChiSquared) {
  std::mt19937_64 rng(4242);
  int tested = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Instance in(relcore::testing::random_acyclic_tables(rng, 4, 10, 8));
    const auto members = relcore::testing::brute_join(in.tables, in.partition);
    if (members.empty() || members.size() > 100) continue;
    const JoinIndex index(in.tables, in.partition, in.tree);
    const auto pts = uniform_sample(index, std::nullopt, 100000, 1000 + trial);
    std::map<Row, std::size_t> multiplicity;
    for (const auto& m : members) ++multiplicity[m];
    auto counts = tally(pts);
    for (const auto& [row, n] : counts) ASSERT_TRUE(multiplicity.count(row)) << "sample outside the join";
    // duplicates in the bag: compare each distinct row against its multiplicity share
    double stat = 0.0;
    for (const auto& [row, mult] : multiplicity) {
      const double expected = 100000.0 * static_cast<double>(mult) / static_cast<double>(members.size());
      const double diff = static_cast<double>(counts[row]) - expected;
      stat += diff * diff / expected;
    }
    if (multiplicity.size() >= 2) {
      boost::math::chi_squared dist(static_cast<double>(multiplicity.size() - 1));
      EXPECT_GT(boost::math::cdf(boost::math::complement(dist, stat)), 0.001) << "trial " << trial;
    }
    ++tested;
  }
  EXPECT_GT(tested, 10);
}
