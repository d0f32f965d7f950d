#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "relcore/count.hpp"
#include "relcore/point_set.hpp"
#include "relcore/rng.hpp"

namespace relcore {

/// Exact uniform sampling from a (filtered) acyclic join.
///
/// Preparation runs one dense bottom-up count pass and keeps, per tree edge, the cumulative
/// subtree counts of child rows grouped by join key. A draw then descends from the root picking
/// each row with probability proportional to its subtree count, which makes every join tuple
/// equally likely.
class PreparedSampler {
 public:
  PreparedSampler(const JoinIndex& index, std::span<const RowFilter* const> filters);

  /// Size of the filtered join.
  Count total() const noexcept { return total_; }

  /// One uniform draw: rows[i] is the chosen row of table i. Throws EmptyRegion when total() == 0.
  void draw_rows(CounterRng& rng, std::span<std::uint32_t> rows) const;

  /// Probability that draw_rows returns exactly `rows`, from the descent weights.
  long double descent_probability(std::span<const std::uint32_t> rows) const;

  const JoinIndex& index() const noexcept { return *index_; }

 private:
  const JoinIndex* index_;
  std::vector<std::vector<Count>> weight_;      // per table row
  std::vector<std::vector<Count>> cumulative_;  // per child table, along Edge::child_rows
  std::vector<Count> root_cumulative_;
  Count total_ = 0;
};

/// `m` independent uniform draws (with replacement) from the join restricted to `cube`, or the
/// whole join when `cube` is absent. Draw j uses stream j of `seed`, so the result does not
/// depend on the thread count. Throws EmptyRegion when the region holds no tuple.
PointSet uniform_sample(const JoinIndex& index, const std::optional<PseudoCube>& cube, std::size_t m,
                        std::uint64_t seed);

/// Same as above but returns the chosen row tuples (m x s).
std::vector<std::vector<std::uint32_t>> uniform_sample_rows(const PreparedSampler& sampler, std::size_t m,
                                                            std::uint64_t seed);

}  // namespace relcore
