#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace imdp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Absolute tolerance for exact-steering residuals and input-set membership.
inline constexpr double kSteeringTolerance = 1e-9;

/// Feasibility slack for interval sums (sum of lows <= 1 <= sum of highs).
inline constexpr double kIntervalSumTolerance = 1e-12;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputOutOfBounds : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InfeasibleIntervals : public Error {
 public:
  using Error::Error;
};

class VacuousAbstraction : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Axis-aligned box [lo, hi] in R^n.
struct Box {
  Vector lo;
  Vector hi;

  [[nodiscard]] Eigen::Index dim() const { return lo.size(); }
  [[nodiscard]] Vector center() const { return 0.5 * (lo + hi); }
  [[nodiscard]] bool contains(const Vector& x, double tol = 0.0) const;
  /// True when the two boxes share a set of positive volume.
  [[nodiscard]] bool interior_intersects(const Box& other) const;
  /// True when the closed boxes intersect (touching faces count).
  [[nodiscard]] bool intersects(const Box& other) const;
  /// True when this box is a subset of other.
  [[nodiscard]] bool subset_of(const Box& other) const;
};

void check_finite(const Matrix& m, const std::string& what);

}  // namespace imdp
