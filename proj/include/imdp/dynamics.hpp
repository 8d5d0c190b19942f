#pragma once

#include "imdp/common.hpp"
#include "imdp/noise.hpp"
#include "imdp/rng.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace imdp {

/// x_{k+1} = A x_k + B u_k + q + eta_k, with u_k constrained to the box U.
///
/// The Moore-Penrose pseudoinverse of B is computed once at construction
/// and reused by every steering query.
class LinearSystem {
 public:
  LinearSystem(Matrix A, Matrix B, Vector q, Box input_set, NoiseModel noise);

  [[nodiscard]] Eigen::Index state_dim() const { return A_.rows(); }
  [[nodiscard]] Eigen::Index input_dim() const { return B_.cols(); }
  [[nodiscard]] const Matrix& A() const { return A_; }
  [[nodiscard]] const Matrix& B() const { return B_; }
  [[nodiscard]] const Matrix& B_pinv() const { return B_pinv_; }
  [[nodiscard]] const Vector& q() const { return q_; }
  [[nodiscard]] const Box& input_set() const { return U_; }
  [[nodiscard]] const NoiseModel& noise() const { return *noise_; }
  [[nodiscard]] int rank_B() const { return rank_B_; }
  [[nodiscard]] bool full_row_rank() const { return rank_B_ == A_.rows(); }

  /// True when u lies in U up to kSteeringTolerance per component.
  [[nodiscard]] bool admissible(const Vector& u) const;

 private:
  Matrix A_;
  Matrix B_;
  Vector q_;
  Box U_;
  std::shared_ptr<const NoiseModel> noise_;
  Matrix B_pinv_;
  int rank_B_ = 0;
};

Vector step(const LinearSystem& sys, const Vector& x, const Vector& u, Rng& rng);
Vector step_deterministic(const LinearSystem& sys, const Vector& x, const Vector& u);

/// Minimum-norm input u = B^+ (d - A x - q) that steers x exactly onto d in
/// one step. Throws RankDeficient when the residual exceeds 1e-9. The result
/// is not checked against U.
Vector input_for_target(const LinearSystem& sys, const Vector& x, const Vector& d);

/// Groups `steps` consecutive steps into one. The lifted input stacks
/// (u_0, ..., u_{s-1}) and the lifted noise is sum_i A^{s-1-i} eta_i.
LinearSystem lift(const LinearSystem& sys, int steps);

enum class Zone { free, goal, unsafe };

struct Outcome {
  enum class Kind { reached_goal, hit_critical, timeout };
  Kind kind = Kind::timeout;
  int step = 0;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct Trace {
  std::vector<Vector> states;
  std::vector<Vector> inputs;
  Outcome outcome;
};

/// Returns the input for (x, k), or nullopt when no action is defined.
using ControlLaw = std::function<std::optional<Vector>(const Vector&, int)>;
using ZoneClassifier = std::function<Zone(const Vector&)>;

/// Closed-loop rollout. Stops at the first goal or unsafe state, or after
/// `horizon` steps. A missing or inadmissible control ends the run as a
/// timeout at that step.
Trace simulate(const LinearSystem& sys, const ControlLaw& controller, const Vector& x0,
               int horizon, const ZoneClassifier& classify, Rng& rng);

}  // namespace imdp
