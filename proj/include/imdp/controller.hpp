#pragma once

#include "imdp/abstraction.hpp"
#include "imdp/dynamics.hpp"
#include "imdp/intervals.hpp"
#include "imdp/partition.hpp"
#include "imdp/robust_mdp.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace imdp {

/// Piecewise-affine feedback law refined from an iMDP policy:
///   c(x, k) = B^+ (d_{pi_k(region_of(x))} - A x - q).
/// Returns nullopt wherever the policy gives no action to apply.
class FeedbackController {
 public:
  FeedbackController(Partition partition, std::vector<Vector> targets,
                     std::vector<std::vector<std::optional<std::size_t>>> policy, Matrix A,
                     Matrix B_pinv, Vector q);

  [[nodiscard]] std::optional<std::size_t> action_at(const Vector& x, int k) const;
  [[nodiscard]] std::optional<Vector> operator()(const Vector& x, int k) const;

  [[nodiscard]] const Partition& partition() const { return *partition_; }
  [[nodiscard]] int horizon() const { return static_cast<int>(policy_.size()); }
  [[nodiscard]] const Vector& target(std::size_t action) const { return targets_.at(action); }

 private:
  std::shared_ptr<const Partition> partition_;
  std::vector<Vector> targets_;
  std::vector<std::vector<std::optional<std::size_t>>> policy_;
  Matrix A_;
  Matrix B_pinv_;
  Vector q_;
};

/// Builds the controller for a solution of an abstraction over (part,
/// actions, sys). Throws InvalidArgument on dimension mismatches or when
/// the policy picks an action that is not enabled in its region.
FeedbackController refine(const RobustSolution& solution, const Partition& part,
                          const std::vector<AbstractAction>& actions, const LinearSystem& sys);

/// goal -> goal, critical or outside the domain -> unsafe.
Zone classify(const Partition& part, const Vector& x);

/// Certified lower bound at x0 for time 0: 1 in goal regions, 0 in critical
/// regions or outside, otherwise values[0] at the region's state.
double certified_bound(const RobustSolution& solution, const Partition& part, const Vector& x0);

struct ValidationReport {
  std::size_t runs = 0;
  std::size_t successes = 0;
  double empirical = 0.0;
  ProbabilityInterval empirical_ci;  // two-sided 95% Clopper-Pearson
  double certified = 0.0;
  double confidence = 0.0;
  /// empirical_ci.high >= certified
  bool pass = false;
  std::vector<Trace> traces;  // the first `keep_traces` runs, in run order
};

struct ValidationOptions {
  std::size_t runs = 10000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::size_t keep_traces = 0;
};

/// Monte Carlo check of the certificate. Run i uses the stream seeded by
/// derive_seed(seed, i), so the report does not depend on `workers`.
ValidationReport validate(const LinearSystem& sys, const FeedbackController& ctrl,
                          const RobustSolution& solution, const Vector& x0, int horizon,
                          const ValidationOptions& options);

/// Key/value JSON record; traces are not included.
std::string to_json(const ValidationReport& report);

}  // namespace imdp
