#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "relcore/errors.hpp"

namespace relcore {

/// Dense row-major set of points sharing one dimension.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}
  PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
    expect(dim_ == 0 ? coords_.empty() : coords_.size() % dim_ == 0,
           "PointSet: coordinate count is not a multiple of the dimension");
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? zero_dim_count_ : coords_.size() / dim_; }
  bool empty() const noexcept { return size() == 0; }

  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<double> operator[](std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

  void push_back(std::span<const double> p) {
    expect(p.size() == dim_, "PointSet: dimension mismatch on insert");
    coords_.insert(coords_.end(), p.begin(), p.end());
    if (dim_ == 0) ++zero_dim_count_;
  }

  void reserve(std::size_t n) { coords_.reserve(n * dim_); }

  const std::vector<double>& coords() const noexcept { return coords_; }

  friend bool operator==(const PointSet& a, const PointSet& b) {
    return a.dim_ == b.dim_ && a.size() == b.size() && a.coords_ == b.coords_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::size_t zero_dim_count_ = 0;  // points of an empty subspace still have a count
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

}  // namespace relcore
