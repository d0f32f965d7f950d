#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "relcore/table.hpp"

namespace relcore {

/// Seeded chain-join generator. Every row of every table carries a latent point z in [0,1]^2
/// drawn from a Zipf-weighted mixture of Gaussian clusters. Table i joins table i+1 on key
/// k<i+1>, the cell of z in a grid (the grid is shifted by half a cell on odd keys). Own
/// features are a fixed smooth random map of z plus noise, so join tuples lie near a
/// low-dimensional manifold. With `label` set, table 0 gets a column y in {0, 1} that thresholds
/// a random linear function of z.
struct SynthOptions {
  std::size_t tables = 3;
  std::size_t rows = 1000;
  std::size_t features = 3;                   // own features per table
  std::vector<std::size_t> features_per_table;  // overrides `features` when non-empty
  std::size_t clusters = 8;
  double cluster_spread = 0.06;
  double skew = 1.0;       // Zipf exponent over clusters; 0 is uniform
  std::size_t cells = 8;   // key grid is cells x cells
  double key_scale = 1e-3;
  double noise = 0.02;
  double feature_scale = 1.0;
  bool label = false;
  double label_noise = 0.05;
  std::uint64_t seed = 0;
};

std::vector<Table> synth_tables(const SynthOptions& options);

/// Writes one CSV per table plus spec.json into `dir` and returns the spec path.
std::filesystem::path write_synth(const SynthOptions& options, const std::filesystem::path& dir);

}  // namespace relcore
