#pragma once

#include "imdp/common.hpp"
#include "imdp/intervals.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace imdp {

struct Transition {
  std::size_t successor = 0;
  ProbabilityInterval interval;
  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Sparse interval distribution, sorted by successor with no duplicates.
using Distribution = std::vector<Transition>;

enum class StateKind { region, goal, unsafe, out };

struct StateInfo {
  StateKind kind = StateKind::region;
  std::size_t region = 0;  // meaningful for StateKind::region only
  friend bool operator==(const StateInfo&, const StateInfo&) = default;
};

/// Enabled action in a state, pointing at a shared distribution row.
struct Choice {
  std::size_t action = 0;
  std::size_t row = 0;
};

/// Interval MDP with a shared pool of distribution rows.
///
/// Abstractions built from target-point actions reuse one row per action
/// across every state where the action is enabled; generic models may give
/// every (state, action) pair its own row. Equality compares the expanded
/// (state, action) -> distribution map, not the pooling.
class IntervalMDP {
 public:
  std::size_t add_state(StateInfo info);
  std::size_t add_row(Distribution dist);
  /// Actions must be added in strictly increasing id order per state.
  void add_choice(std::size_t state, std::size_t action, std::size_t row);

  [[nodiscard]] std::size_t num_states() const { return states_.size(); }
  [[nodiscard]] std::size_t num_rows() const { return rows_.size(); }
  [[nodiscard]] const StateInfo& state(std::size_t s) const { return states_.at(s); }
  [[nodiscard]] std::span<const Choice> choices(std::size_t s) const { return choices_.at(s); }
  [[nodiscard]] const Distribution& row(std::size_t r) const { return rows_.at(r); }
  [[nodiscard]] const Distribution& distribution(std::size_t s, std::size_t action) const;

  /// Number of (state, action, successor) triples.
  [[nodiscard]] std::size_t num_transitions() const;
  [[nodiscard]] std::size_t num_state_action_pairs() const;

  [[nodiscard]] bool is_absorbing(std::size_t s) const {
    return states_[s].kind != StateKind::region;
  }
  /// Index of the first state of the given kind, if any.
  [[nodiscard]] std::optional<std::size_t> find_state(StateKind kind) const;

  double confidence = 1.0;

  /// Throws InfeasibleIntervals or InvalidArgument when an invariant fails:
  /// sorted distinct successors, 0 <= low <= high <= 1, sum low <= 1 <= sum
  /// high, and no actions on absorbing states.
  void validate() const;

  friend bool operator==(const IntervalMDP& a, const IntervalMDP& b);

 private:
  std::vector<StateInfo> states_;
  std::vector<std::vector<Choice>> choices_;
  std::vector<Distribution> rows_;
};

std::string state_label(const StateInfo& info);

struct InnerResult {
  double value = 0.0;
  std::vector<double> distribution;
};

/// min sum_i p_i v_i over {low <= p <= high, sum p = 1}. Greedy: every
/// successor gets its low, then the remaining mass fills successors in
/// ascending value order (ties by position) up to their high.
InnerResult inner_min(std::span<const double> values,
                      std::span<const ProbabilityInterval> intervals);

/// Finite-horizon reach-avoid solution.
///
/// Backward indexing: values[k] holds the probability of reaching GOAL
/// within K - k steps, so values[K] is the terminal vector (1 at GOAL, 0
/// elsewhere) and values[k][s] >= values[k + 1][s]. policy[k][s] is the
/// action to take at time k with K - k steps remaining.
struct RobustSolution {
  std::vector<Vector> values;
  std::vector<std::vector<std::optional<std::size_t>>> policy;
  int horizon = 0;
  double confidence = 1.0;
};

/// Robust backward recursion. Absorbing states keep their terminal values;
/// non-absorbing states without actions get 0. Ties go to the lowest
/// action id.
RobustSolution robust_value_iteration(const IntervalMDP& model, int horizon);

/// Same recursion for models whose intervals are all degenerate.
RobustSolution nominal_value_iteration(const IntervalMDP& model, int horizon);

struct StationarySolution {
  Vector values;
  std::vector<std::optional<std::size_t>> policy;
  int iterations = 0;
  bool converged = false;
};

/// Unbounded-horizon robust reachability, iterated from the terminal vector
/// until the sup-norm change drops below `tolerance`.
StationarySolution robust_value_iteration_stationary(const IntervalMDP& model,
                                                     double tolerance = 1e-6,
                                                     int max_iterations = 100000);

}  // namespace imdp
