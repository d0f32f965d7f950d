#include "relcore/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "relcore/errors.hpp"
#include "relcore/rng.hpp"

namespace relcore {

namespace {

struct FeatureMap {
  double a0, a1, b0, b1, phase;
};

std::size_t own_features(const SynthOptions& o, std::size_t t) {
  return o.features_per_table.empty() ? o.features : o.features_per_table[t];
}

double key_value(const SynthOptions& o, std::size_t key, double z0, double z1) {
  const double shift = key % 2 == 0 ? 0.5 / static_cast<double>(o.cells) : 0.0;
  const auto side = static_cast<double>(o.cells);
  auto cell = [&](double v) { return std::clamp(std::floor((v + shift) * side), 0.0, side); };
  const double id = cell(z0) * (side + 1.0) + cell(z1);
  return (id + 1.0) * o.key_scale;
}

}  // namespace

std::vector<Table> synth_tables(const SynthOptions& o) {
  expect(o.tables >= 1, "synth: need at least one table");
  expect(o.rows >= 1, "synth: need at least one row per table");
  expect(o.clusters >= 1, "synth: need at least one cluster");
  expect(o.cells >= 1, "synth: need at least one key cell");
  expect(o.features_per_table.empty() || o.features_per_table.size() == o.tables,
         "synth: one feature count per table expected");

  CounterRng params(o.seed, 1);
  std::vector<std::pair<double, double>> centers(o.clusters);
  std::vector<double> cumulative(o.clusters);
  double acc = 0.0;
  for (std::size_t c = 0; c < o.clusters; ++c) {
    centers[c] = {0.1 + 0.8 * params.uniform(), 0.1 + 0.8 * params.uniform()};
    acc += 1.0 / std::pow(static_cast<double>(c + 1), o.skew);
    cumulative[c] = acc;
  }
  std::vector<std::vector<FeatureMap>> maps(o.tables);
  for (std::size_t t = 0; t < o.tables; ++t) {
    for (std::size_t j = 0; j < own_features(o, t); ++j) {
      maps[t].push_back({params.normal(), params.normal(), 3.0 * params.normal(), 3.0 * params.normal(),
                         2.0 * std::numbers::pi * params.uniform()});
    }
  }
  const double w0 = params.normal(), w1 = params.normal();
  const double threshold = 0.5 * (w0 + w1);

  std::vector<Table> out;
  for (std::size_t t = 0; t < o.tables; ++t) {
    std::vector<std::string> names;
    if (t > 0) names.push_back("k" + std::to_string(t));
    for (std::size_t j = 0; j < maps[t].size(); ++j) names.push_back("t" + std::to_string(t) + "_x" + std::to_string(j));
    const bool has_label = o.label && t == 0;
    if (has_label) names.push_back("y");
    if (t + 1 < o.tables) names.push_back("k" + std::to_string(t + 1));

    std::vector<std::vector<double>> cols(names.size(), std::vector<double>(o.rows));
    const std::uint64_t table_seed = split_seed(o.seed, 100 + t);
    for (std::size_t r = 0; r < o.rows; ++r) {
      CounterRng rng(table_seed, r);
      const double u = rng.uniform() * acc;
      const auto c = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                              cumulative.begin());
      const auto [cx, cy] = centers[std::min(c, o.clusters - 1)];
      const double z0 = std::clamp(cx + o.cluster_spread * rng.normal(), 0.0, 1.0);
      const double z1 = std::clamp(cy + o.cluster_spread * rng.normal(), 0.0, 1.0);
      std::size_t col = 0;
      if (t > 0) cols[col++][r] = key_value(o, t, z0, z1);
      for (const auto& m : maps[t]) {
        const double v = m.a0 * z0 + m.a1 * z1 + 0.3 * std::sin(m.b0 * z0 + m.b1 * z1 + m.phase);
        cols[col++][r] = o.feature_scale * (v + o.noise * rng.normal());
      }
      if (has_label) cols[col++][r] = w0 * z0 + w1 * z1 + o.label_noise * rng.normal() > threshold ? 1.0 : 0.0;
      if (t + 1 < o.tables) cols[col++][r] = key_value(o, t + 1, z0, z1);
    }
    out.emplace_back("t" + std::to_string(t), std::move(names), std::move(cols));
  }
  return out;
}

std::filesystem::path write_synth(const SynthOptions& options, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw LoadError(dir.string() + ": cannot create directory (" + ec.message() + ")");
  const auto tables = synth_tables(options);
  JoinSpec spec;
  for (const auto& t : tables) {
    const auto file = t.name() + ".csv";
    write_csv_table(t, dir / file);
    spec.tables.push_back({t.name(), file, std::nullopt});
  }
  if (options.label) spec.label = "y";
  const auto path = dir / "spec.json";
  save_join_spec(spec, path);
  return path;
}

}  // namespace relcore
