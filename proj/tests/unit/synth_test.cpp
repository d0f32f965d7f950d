#include <gtest/gtest.h>

#include "relcore/count.hpp"
#include "relcore/join_tree.hpp"
#include "relcore/synth.hpp"
#include "support.hpp"

using namespace relcore;

TEST(Synth, ChainShapeAndDimensions) {
  SynthOptions o;
  o.tables = 3;
  o.rows = 200;
  o.features = 3;
  o.label = true;
  const auto tables = synth_tables(o);
  ASSERT_EQ(tables.size(), 3u);
  const auto p = make_partition(tables);
  EXPECT_EQ(p.dim(), 12u);
  EXPECT_EQ(tables[0].features().back(), "k1");
  EXPECT_TRUE(tables[0].find("y").has_value());
  EXPECT_EQ(tables[1].features().front(), "k1");
  EXPECT_EQ(tables[1].features().back(), "k2");
  const auto tree = check_acyclic(p);
  EXPECT_TRUE(satisfies_running_intersection(tree, p));
  EXPECT_GT(join_size(tables, p, tree), 0u);
  for (std::size_t r = 0; r < tables[0].rows(); ++r) {
    const double y = tables[0].value(r, *tables[0].find("y"));
    EXPECT_TRUE(y == 0.0 || y == 1.0);
  }
}

TEST(Synth, SeededAndControllable) {
  SynthOptions o;
  o.rows = 100;
  o.seed = 5;
  const auto a = synth_tables(o);
  const auto b = synth_tables(o);
  for (std::size_t t = 0; t < a.size(); ++t)
    for (std::size_t c = 0; c < a[t].width(); ++c) EXPECT_EQ(a[t].column(c), b[t].column(c));
  o.seed = 6;
  const auto c = synth_tables(o);
  EXPECT_NE(a[0].column(0), c[0].column(0));
  o.features_per_table = {3, 2, 2};
  EXPECT_EQ(make_partition(synth_tables(o)).dim(), 9u);
  o.tables = 1;
  o.features_per_table.clear();
  EXPECT_EQ(synth_tables(o).size(), 1u);
}

TEST(Synth, SkewConcentratesKeys) {
  SynthOptions flat, skewed;
  flat.rows = skewed.rows = 4000;
  flat.skew = 0.0;
  skewed.skew = 2.5;
  auto top_share = [](const Table& t) {
    std::map<double, std::size_t> freq;
    const auto& col = t.column(t.width() - 1);
    for (double v : col) ++freq[v];
    std::size_t best = 0;
    for (const auto& [v, n] : freq) best = std::max(best, n);
    return static_cast<double>(best) / static_cast<double>(col.size());
  };
  EXPECT_GT(top_share(synth_tables(skewed)[0]), top_share(synth_tables(flat)[0]));
}

TEST(Synth, WritesLoadableSpec) {
  const auto dir = relcore::testing::temp_dir("synth");
  SynthOptions o;
  o.rows = 50;
  o.label = true;
  const auto spec_path = write_synth(o, dir);
  const auto loaded = load_tables(load_join_spec(spec_path));
  EXPECT_EQ(loaded.tables.size(), 3u);
  const auto direct = synth_tables(o);
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t c = 0; c < direct[t].width(); ++c) EXPECT_EQ(loaded.tables[t].column(c), direct[t].column(c));
}
