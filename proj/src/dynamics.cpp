#include "imdp/dynamics.hpp"

#include <string>

namespace imdp {

LinearSystem::LinearSystem(Matrix A, Matrix B, Vector q, Box input_set, NoiseModel noise)
    : A_(std::move(A)),
      B_(std::move(B)),
      q_(std::move(q)),
      U_(std::move(input_set)),
      noise_(std::make_shared<const NoiseModel>(std::move(noise))) {
  const auto n = A_.rows();
  if (n == 0 || A_.cols() != n) throw InvalidArgument("A must be a non-empty square matrix");
  if (B_.rows() != n || B_.cols() == 0) throw InvalidArgument("B must be n x p with p >= 1");
  if (q_.size() != n) throw InvalidArgument("q must have length n");
  if (U_.lo.size() != B_.cols() || U_.hi.size() != B_.cols()) {
    throw InvalidArgument("input set bounds must have length p");
  }
  if (noise_->dim() != n) throw InvalidArgument("noise dimension must equal n");
  check_finite(A_, "A");
  check_finite(B_, "B");
  check_finite(q_, "q");
  check_finite(U_.lo, "u_lo");
  check_finite(U_.hi, "u_hi");
  if ((U_.lo.array() > U_.hi.array()).any()) throw InvalidArgument("u_lo must be <= u_hi");

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(B_);
  B_pinv_ = cod.pseudoInverse();
  rank_B_ = static_cast<int>(cod.rank());
}

bool LinearSystem::admissible(const Vector& u) const {
  return U_.contains(u, kSteeringTolerance);
}

Vector step_deterministic(const LinearSystem& sys, const Vector& x, const Vector& u) {
  if (x.size() != sys.state_dim() || u.size() != sys.input_dim()) {
    throw InvalidArgument("step: dimension mismatch");
  }
  if (!sys.admissible(u)) throw InputOutOfBounds("step: input outside U");
  return sys.A() * x + sys.B() * u + sys.q();
}

Vector step(const LinearSystem& sys, const Vector& x, const Vector& u, Rng& rng) {
  Vector next = step_deterministic(sys, x, u);
  next += sys.noise().sample(rng);
  return next;
}

Vector input_for_target(const LinearSystem& sys, const Vector& x, const Vector& d) {
  const Vector rhs = d - sys.A() * x - sys.q();
  Vector u = sys.B_pinv() * rhs;
  const double residual = (sys.B() * u - rhs).cwiseAbs().maxCoeff();
  if (!(residual <= kSteeringTolerance)) {
    throw RankDeficient("target not exactly reachable (residual " + std::to_string(residual) +
                        "); B needs full row rank, consider lifting the system");
  }
  return u;
}

LinearSystem lift(const LinearSystem& sys, int steps) {
  if (steps < 1) throw InvalidArgument("lift: steps must be >= 1");
  if (steps == 1) return sys;
  const auto n = sys.state_dim();
  const auto p = sys.input_dim();

  // powers[i] = A^i
  std::vector<Matrix> powers{Matrix::Identity(n, n)};
  for (int i = 1; i <= steps; ++i) powers.push_back(powers.back() * sys.A());

  Matrix B_lift(n, steps * p);
  Vector q_lift = Vector::Zero(n);
  Box U_lift{Vector(steps * p), Vector(steps * p)};
  std::vector<Matrix> noise_weights;
  for (int i = 0; i < steps; ++i) {
    const Matrix& Ai = powers[static_cast<std::size_t>(steps - 1 - i)];
    B_lift.middleCols(i * p, p) = Ai * sys.B();
    q_lift += powers[static_cast<std::size_t>(i)] * sys.q();
    U_lift.lo.segment(i * p, p) = sys.input_set().lo;
    U_lift.hi.segment(i * p, p) = sys.input_set().hi;
    noise_weights.push_back(Ai);
  }
  return LinearSystem(powers.back(), std::move(B_lift), std::move(q_lift), std::move(U_lift),
                      NoiseModel::linear_combination(sys.noise(), std::move(noise_weights)));
}

Trace simulate(const LinearSystem& sys, const ControlLaw& controller, const Vector& x0,
               int horizon, const ZoneClassifier& classify, Rng& rng) {
  Trace trace;
  trace.states.push_back(x0);
  auto terminal = [&](const Vector& x, int k) -> bool {
    switch (classify(x)) {
      case Zone::goal:
        trace.outcome = {Outcome::Kind::reached_goal, k};
        return true;
      case Zone::unsafe:
        trace.outcome = {Outcome::Kind::hit_critical, k};
        return true;
      case Zone::free:
        return false;
    }
    return false;
  };
  if (terminal(x0, 0)) return trace;

  Vector x = x0;
  for (int k = 0; k < horizon; ++k) {
    auto u = controller(x, k);
    if (!u || !sys.admissible(*u)) {
      trace.outcome = {Outcome::Kind::timeout, k};
      return trace;
    }
    x = step(sys, x, *u, rng);
    trace.inputs.push_back(std::move(*u));
    trace.states.push_back(x);
    if (terminal(x, k + 1)) return trace;
  }
  trace.outcome = {Outcome::Kind::timeout, horizon};
  return trace;
}

}  // namespace imdp
