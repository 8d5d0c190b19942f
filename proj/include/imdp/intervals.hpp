#pragma once

#include <cstddef>
#include <functional>

namespace imdp {

struct ProbabilityInterval {
  double low = 0.0;
  double high = 0.0;

  [[nodiscard]] double width() const { return high - low; }
  [[nodiscard]] bool contains(double p) const { return p >= low && p <= high; }
  friend bool operator==(const ProbabilityInterval&, const ProbabilityInterval&) = default;
};

/// Two-sided Clopper-Pearson interval for k successes in N trials at
/// significance beta_per: covers the true Bernoulli parameter with
/// probability at least 1 - beta_per.
ProbabilityInterval clopper_pearson(std::size_t k, std::size_t N, double beta_per);

/// Degenerate [k/N, k/N]; used for the non-robust point-estimate MDP.
ProbabilityInterval point_estimate(std::size_t k, std::size_t N, double beta_per);

/// Maps (k, N, beta_per) to an interval. Clopper-Pearson by default.
using IntervalEstimator = std::function<ProbabilityInterval(std::size_t, std::size_t, double)>;

}  // namespace imdp
