#pragma once

#include <stdexcept>
#include <string>

namespace fdsec {

/// Incompatible matrix shapes passed to an operation (e.g. differing row
/// counts where a shared ambient space is required).
class DimensionMismatch : public std::runtime_error {
 public:
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

/// More precoding vectors requested from a subset than the channel geometry
/// can supply as linearly independent columns.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// A channel matrix that the algorithms assume to be generically full rank
/// turned out rank-deficient (invalid random draw or adversarial input).
class RankDegenerate : public std::runtime_error {
 public:
  explicit RankDegenerate(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent user-supplied configuration (JSON or CLI).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A power grid unusable for slope estimation (fewer than two distinct points).
class DegenerateGrid : public std::runtime_error {
 public:
  explicit DegenerateGrid(const std::string& what) : std::runtime_error(what) {}
};

/// Two network nodes placed at the same coordinates: the path-loss model has
/// no finite gain for zero distance.
class ZeroDistance : public std::runtime_error {
 public:
  explicit ZeroDistance(const std::string& what) : std::runtime_error(what) {}
};

/// Two internal evaluation routes that must agree produced different results;
/// indicates a bug or a numerically hostile input, never a user error.
class InternalInconsistency : public std::runtime_error {
 public:
  explicit InternalInconsistency(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fdsec
