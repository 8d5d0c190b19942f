#include "imdp/controller.hpp"

#include "imdp/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <thread>

namespace imdp {

FeedbackController::FeedbackController(Partition partition, std::vector<Vector> targets,
                                       std::vector<std::vector<std::optional<std::size_t>>> policy,
                                       Matrix A, Matrix B_pinv, Vector q)
    : partition_(std::make_shared<const Partition>(std::move(partition))),
      targets_(std::move(targets)),
      policy_(std::move(policy)),
      A_(std::move(A)),
      B_pinv_(std::move(B_pinv)),
      q_(std::move(q)) {}

std::optional<std::size_t> FeedbackController::action_at(const Vector& x, int k) const {
  if (k < 0 || k >= horizon()) return std::nullopt;
  const auto region = partition_->region_of(x);
  if (!region || partition_->is_labeled(*region)) return std::nullopt;
  return policy_[static_cast<std::size_t>(k)][region->value];
}

std::optional<Vector> FeedbackController::operator()(const Vector& x, int k) const {
  const auto action = action_at(x, k);
  if (!action) return std::nullopt;
  return Vector(B_pinv_ * (targets_[*action] - A_ * x - q_));
}

FeedbackController refine(const RobustSolution& solution, const Partition& part,
                          const std::vector<AbstractAction>& actions, const LinearSystem& sys) {
  if (part.dim() != sys.state_dim()) throw InvalidArgument("refine: partition/system dimension");
  const StateLayout layout{part.size()};
  if (solution.values.empty() ||
      static_cast<std::size_t>(solution.values.front().size()) != layout.size()) {
    throw InvalidArgument("refine: solution does not match the partition");
  }
  std::vector<Vector> targets;
  targets.reserve(actions.size());
  for (const auto& a : actions) {
    if (a.target.size() != sys.state_dim()) throw InvalidArgument("refine: target dimension");
    targets.push_back(a.target);
  }

  std::vector<std::vector<std::optional<std::size_t>>> policy(solution.policy.size());
  for (std::size_t k = 0; k < solution.policy.size(); ++k) {
    policy[k].assign(part.size(), std::nullopt);
    for (std::size_t r = 0; r < part.size(); ++r) {
      const auto chosen = solution.policy[k].at(r);
      if (!chosen) continue;
      if (*chosen >= actions.size()) throw InvalidArgument("refine: unknown action id");
      const auto& enabled = actions[*chosen].enabled_in;
      if (!std::binary_search(enabled.begin(), enabled.end(), RegionId{r})) {
        throw InvalidArgument("refine: policy uses action " + std::to_string(*chosen) +
                              " outside its enabled regions (region " + std::to_string(r) + ")");
      }
      policy[k][r] = chosen;
    }
  }
  return FeedbackController(part, std::move(targets), std::move(policy), sys.A(), sys.B_pinv(),
                            sys.q());
}

Zone classify(const Partition& part, const Vector& x) {
  const auto r = part.region_of(x);
  if (!r || part.is_critical(*r)) return Zone::unsafe;
  return part.is_goal(*r) ? Zone::goal : Zone::free;
}

double certified_bound(const RobustSolution& solution, const Partition& part, const Vector& x0) {
  const auto r = part.region_of(x0);
  if (!r || part.is_critical(*r)) return 0.0;
  if (part.is_goal(*r)) return 1.0;
  return solution.values.front()[static_cast<Eigen::Index>(r->value)];
}

ValidationReport validate(const LinearSystem& sys, const FeedbackController& ctrl,
                          const RobustSolution& solution, const Vector& x0, int horizon,
                          const ValidationOptions& options) {
  if (options.runs == 0) throw InvalidArgument("validate: at least one run required");
  const Partition& part = ctrl.partition();
  if (!part.region_of(x0)) throw InvalidArgument("validate: x0 lies outside the domain");

  ValidationReport report;
  report.runs = options.runs;
  report.certified = certified_bound(solution, part, x0);
  report.confidence = solution.confidence;
  report.traces.resize(std::min(options.keep_traces, options.runs));

  const ControlLaw law = [&ctrl](const Vector& x, int k) { return ctrl(x, k); };
  const ZoneClassifier zones = [&part](const Vector& x) { return classify(part, x); };

  std::atomic<std::size_t> successes{0};
  auto worker = [&](std::size_t begin, std::size_t end) {
    std::size_t local = 0;
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng = make_rng(derive_seed(options.seed, i));
      Trace trace = simulate(sys, law, x0, horizon, zones, rng);
      if (trace.outcome.kind == Outcome::Kind::reached_goal) ++local;
      if (i < report.traces.size()) report.traces[i] = std::move(trace);
    }
    successes += local;
  };

  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, options.runs);
  if (workers == 1) {
    worker(0, options.runs);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (options.runs + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(options.runs, begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
  }

  report.successes = successes.load();
  report.empirical = static_cast<double>(report.successes) / static_cast<double>(report.runs);
  report.empirical_ci = clopper_pearson(report.successes, report.runs, 0.05);
  report.pass = report.empirical_ci.high >= report.certified;
  return report;
}

std::string to_json(const ValidationReport& report) {
  nlohmann::ordered_json j;
  j["runs"] = report.runs;
  j["successes"] = report.successes;
  j["empirical"] = report.empirical;
  j["empirical_ci"] = {report.empirical_ci.low, report.empirical_ci.high};
  j["certified"] = report.certified;
  j["confidence"] = report.confidence;
  j["pass"] = report.pass;
  return j.dump(2);
}

}  // namespace imdp
