#include "imdp/controller.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

using namespace imdp;
using testutil::box;
using testutil::vec;

namespace {

struct Setup {
  LinearSystem sys;
  Partition part;
  std::vector<AbstractAction> actions;
  Abstraction abs;
  RobustSolution sol;
};

/// 1D walk on [0, 6] toward the goal cell [5, 6], with a critical cell [0, 1].
Setup corridor(int horizon = 6) {
  LinearSystem sys(Matrix::Identity(1, 1), Matrix::Identity(1, 1), vec({0.1}), box({-1.6}, {1.6}),
                   NoiseModel::gaussian(vec({0}), Matrix::Constant(1, 1, 0.02)));
  auto part = Partition(box({0}, {6}), {6}).label_regions({box({5}, {6})}, {box({0}, {1})});
  auto actions = enabled_actions(sys, part, default_actions(part));
  auto abs = build_imdp(sys, part, actions, {2000, 0.01, 3});
  auto sol = robust_value_iteration(abs.model, horizon);
  return {std::move(sys), std::move(part), std::move(actions), std::move(abs), std::move(sol)};
}

}  // namespace

TEST_CASE("refine: action lookup follows the region policy") {
  const auto s = corridor();
  const auto ctrl = refine(s.sol, s.part, s.actions, s.sys);
  CHECK(ctrl.horizon() == 6);
  for (int k = 0; k < 6; ++k) {
    for (double x : {1.2, 2.5, 3.99, 4.0, 4.7}) {
      const auto r = s.part.region_of(vec({x}))->value;
      CHECK(ctrl.action_at(vec({x}), k) == s.sol.policy[k][r]);
    }
  }
  CHECK_FALSE(ctrl.action_at(vec({5.5}), 0));   // goal
  CHECK_FALSE(ctrl.action_at(vec({0.5}), 0));   // critical
  CHECK_FALSE(ctrl.action_at(vec({-0.1}), 0));  // outside
  CHECK_FALSE(ctrl.action_at(vec({2.5}), 6));   // past the horizon
  CHECK_FALSE(ctrl(vec({2.5}), -1));
}

TEST_CASE("refine: affine within a region, admissible, exact steering") {
  const auto s = corridor();
  const auto ctrl = refine(s.sol, s.part, s.actions, s.sys);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  std::size_t checked = 0;
  for (int k = 0; k < 6; ++k) {
    for (std::size_t r = 0; r < s.part.size(); ++r) {
      if (!s.sol.policy[k][r]) continue;
      const Box cell = s.part.region_box(RegionId{r});
      for (int i = 0; i < 100; ++i) {
        const double a = cell.lo[0] + u(rng) * (cell.hi[0] - cell.lo[0]);
        const double b = cell.lo[0] + u(rng) * (cell.hi[0] - cell.lo[0]);
        const auto ca = ctrl(vec({a}), k), cb = ctrl(vec({b}), k), cm = ctrl(vec({(a + b) / 2}), k);
        REQUIRE(ca);
        REQUIRE(cb);
        REQUIRE(cm);
        CHECK(std::abs((*cm)[0] - 0.5 * ((*ca)[0] + (*cb)[0])) <= 1e-12);
        CHECK(s.sys.admissible(*ca));
        const Vector next = step_deterministic(s.sys, vec({a}), *ca);
        CHECK((next - ctrl.target(*s.sol.policy[k][r])).norm() <= 1e-9);
        ++checked;
      }
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("refine: rejects inconsistent inputs") {
  auto s = corridor();
  auto bad = s.sol;
  // Action 5 targets the goal cell center 5.5, too far from region 1 with |u| <= 1.6.
  bad.policy[0][1] = 5;
  CHECK_THROWS_AS(refine(bad, s.part, s.actions, s.sys), InvalidArgument);
  const Partition other(box({0}, {6}), {3});
  CHECK_THROWS_AS(refine(s.sol, other, s.actions, s.sys), InvalidArgument);
}

TEST_CASE("certified_bound and classify") {
  const auto s = corridor();
  CHECK(certified_bound(s.sol, s.part, vec({5.5})) == 1.0);
  CHECK(certified_bound(s.sol, s.part, vec({0.5})) == 0.0);
  CHECK(certified_bound(s.sol, s.part, vec({7.0})) == 0.0);
  CHECK(certified_bound(s.sol, s.part, vec({3.5})) == s.sol.values[0][3]);
  CHECK(classify(s.part, vec({5.5})) == Zone::goal);
  CHECK(classify(s.part, vec({0.5})) == Zone::unsafe);
  CHECK(classify(s.part, vec({-3})) == Zone::unsafe);
  CHECK(classify(s.part, vec({2})) == Zone::free);
}

TEST_CASE("validate: certificate holds and reports are reproducible") {
  const auto s = corridor();
  const auto ctrl = refine(s.sol, s.part, s.actions, s.sys);
  const Vector x0 = vec({1.5});
  const double certified = certified_bound(s.sol, s.part, x0);
  CHECK(certified > 0.5);
  ValidationOptions opt;
  opt.runs = 2000;
  opt.seed = 17;
  opt.keep_traces = 3;
  const auto one = validate(s.sys, ctrl, s.sol, x0, 6, opt);
  CHECK(one.runs == 2000);
  CHECK(one.certified == certified);
  CHECK(one.confidence == doctest::Approx(0.99));
  CHECK(one.empirical == doctest::Approx(double(one.successes) / 2000));
  CHECK(one.empirical_ci.contains(one.empirical));
  CHECK(one.pass);
  CHECK(one.empirical >= certified - 0.05);
  REQUIRE(one.traces.size() == 3);
  for (const auto& t : one.traces) {
    CHECK(t.states.front() == x0);
    CHECK(t.inputs.size() + 1 == t.states.size());
    CHECK(t.outcome.step <= 6);
  }

  opt.workers = 3;
  const auto three = validate(s.sys, ctrl, s.sol, x0, 6, opt);
  CHECK(three.successes == one.successes);
  for (std::size_t i = 0; i < 3; ++i) CHECK(three.traces[i].states == one.traces[i].states);

  const auto j = nlohmann::json::parse(to_json(one));
  CHECK(j.at("runs") == 2000);
  CHECK(j.at("successes") == one.successes);
  CHECK(j.at("pass") == true);
  CHECK(j.contains("empirical_ci"));
  CHECK_FALSE(j.contains("traces"));
}

TEST_CASE("validate: starts in the goal succeed, starts outside are rejected") {
  const auto s = corridor();
  const auto ctrl = refine(s.sol, s.part, s.actions, s.sys);
  ValidationOptions opt;
  opt.runs = 50;
  const auto in_goal = validate(s.sys, ctrl, s.sol, vec({5.5}), 6, opt);
  CHECK(in_goal.successes == 50);
  CHECK(in_goal.certified == 1.0);
  CHECK_THROWS_AS(validate(s.sys, ctrl, s.sol, vec({-2}), 6, opt), InvalidArgument);
}

TEST_CASE("validate: an empty policy never succeeds") {
  const auto s = corridor();
  std::vector<Vector> targets;
  for (const auto& a : s.actions) targets.push_back(a.target);
  const std::vector<std::vector<std::optional<std::size_t>>> none(
      6, std::vector<std::optional<std::size_t>>(s.part.size()));
  const FeedbackController ctrl(s.part, targets, none, s.sys.A(), s.sys.B_pinv(), s.sys.q());
  ValidationOptions opt;
  opt.runs = 100;
  opt.keep_traces = 1;
  const auto r = validate(s.sys, ctrl, s.sol, vec({2.5}), 6, opt);
  CHECK(r.successes == 0);
  CHECK(r.empirical == 0.0);
  CHECK(r.traces[0].outcome == Outcome{Outcome::Kind::timeout, 0});
}
