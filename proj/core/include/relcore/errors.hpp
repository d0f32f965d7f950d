#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace relcore {

/// Broad failure category; the CLI maps these onto exit codes.
enum class ErrorKind { validation, build, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Unreadable or malformed input file. The message names the file and line.
class LoadError : public Error {
 public:
  explicit LoadError(const std::string& what) : Error(ErrorKind::io, what) {}
};

/// A precondition of a library call was not met by the caller.
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what) : Error(ErrorKind::validation, what) {}
};

/// GYO reduction stalled; `residual` holds the surviving hyperedges as feature names.
class CyclicError : public Error {
 public:
  CyclicError(const std::string& what, std::vector<std::vector<std::string>> residual)
      : Error(ErrorKind::validation, what), residual_(std::move(residual)) {}
  const std::vector<std::vector<std::string>>& residual() const noexcept { return residual_; }

 private:
  std::vector<std::vector<std::string>> residual_;
};

/// Materialization refused because the join is larger than the configured cap.
class CapExceeded : public Error {
 public:
  CapExceeded(const std::string& what, std::uint64_t estimated)
      : Error(ErrorKind::validation, what), estimated_(estimated) {}
  std::uint64_t estimated_size() const noexcept { return estimated_; }

 private:
  std::uint64_t estimated_;
};

/// An exact join count does not fit in 64 bits.
class CountOverflow : public Error {
 public:
  explicit CountOverflow(const std::string& what) : Error(ErrorKind::build, what) {}
};

/// Sampling was requested from a region that contains no join tuple.
class EmptyRegion : public Error {
 public:
  explicit EmptyRegion(const std::string& what) : Error(ErrorKind::build, what) {}
};

class BuildError : public Error {
 public:
  explicit BuildError(const std::string& what) : Error(ErrorKind::build, what) {}
};

/// A trainer's objective rose for too many consecutive steps.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& what) : Error(ErrorKind::build, what) {}
};

inline void expect(bool condition, const char* message) {
  if (!condition) throw ContractViolation(message);
}

inline void expect(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace relcore
