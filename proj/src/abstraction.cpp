#include "imdp/abstraction.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace imdp {

std::vector<AbstractAction> default_actions(const Partition& part) {
  std::vector<AbstractAction> actions;
  actions.reserve(part.size());
  for (std::size_t r = 0; r < part.size(); ++r) {
    actions.push_back({r, part.region_box(RegionId{r}).center(), {}});
  }
  return actions;
}

namespace {

void require_steerable(const LinearSystem& sys) {
  if (!sys.full_row_rank()) {
    throw RankDeficient("B has rank " + std::to_string(sys.rank_B()) + " < n = " +
                        std::to_string(sys.state_dim()) +
                        "; lift the system over several steps before abstracting");
  }
}

}  // namespace

std::vector<AbstractAction> enabled_actions(const LinearSystem& sys, const Partition& part,
                                            std::vector<AbstractAction> actions) {
  require_steerable(sys);
  if (part.dim() != sys.state_dim()) throw InvalidArgument("partition and system dimensions differ");
  const Matrix gain = sys.B_pinv() * sys.A();
  const Matrix abs_gain = gain.cwiseAbs();
  const auto p = sys.input_dim();
  const Vector& lo = sys.input_set().lo;
  const Vector& hi = sys.input_set().hi;

  // Per unlabeled region: gain * center and |gain| * half-width.
  std::vector<std::size_t> candidates;
  Matrix center_term(p, static_cast<Eigen::Index>(part.size()));
  Matrix radius_term(p, static_cast<Eigen::Index>(part.size()));
  for (std::size_t r = 0; r < part.size(); ++r) {
    if (part.is_labeled(RegionId{r})) continue;
    const Box box = part.region_box(RegionId{r});
    const auto col = static_cast<Eigen::Index>(candidates.size());
    center_term.col(col) = gain * box.center();
    radius_term.col(col) = abs_gain * (0.5 * (box.hi - box.lo));
    candidates.push_back(r);
  }

  for (auto& action : actions) {
    if (action.target.size() != sys.state_dim()) {
      throw InvalidArgument("action target has wrong dimension");
    }
    action.enabled_in.clear();
    // Exactness of steering is a property of B alone; check it once.
    (void)input_for_target(sys, action.target, action.target);
    const Vector offset = sys.B_pinv() * (action.target - sys.q());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const auto col = static_cast<Eigen::Index>(c);
      bool ok = true;
      for (Eigen::Index i = 0; i < p && ok; ++i) {
        const double mid = offset[i] - center_term(i, col);
        const double rad = radius_term(i, col);
        ok = mid - rad >= lo[i] - kSteeringTolerance && mid + rad <= hi[i] + kSteeringTolerance;
      }
      if (ok) action.enabled_in.push_back(RegionId{candidates[c]});
    }
  }
  return actions;
}

bool enabled_by_vertices(const LinearSystem& sys, const Partition& part, const Vector& target,
                         RegionId region) {
  require_steerable(sys);
  if (part.is_labeled(region)) return false;
  for (const auto& v : part.region_vertices(region)) {
    if (!sys.admissible(input_for_target(sys, v, target))) return false;
  }
  return true;
}

std::vector<Vector> sample_noise_set(const NoiseModel& noise, std::size_t count,
                                     std::uint64_t seed) {
  if (count == 0) throw InvalidArgument("sample count must be positive");
  Rng rng = make_rng(seed);
  std::vector<Vector> samples;
  samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) samples.push_back(noise.sample(rng));
  return samples;
}

TransitionCounts count_successors(const Partition& part, const Vector& target,
                                  const std::vector<Vector>& samples) {
  TransitionCounts counts;
  const auto n = part.dim();
  counts.support = {Vector::Constant(n, std::numeric_limits<double>::infinity()),
                    Vector::Constant(n, -std::numeric_limits<double>::infinity())};
  for (const auto& eta : samples) {
    const Vector next = target + eta;
    counts.support.lo = counts.support.lo.cwiseMin(next);
    counts.support.hi = counts.support.hi.cwiseMax(next);
    if (auto r = part.region_of(next)) {
      ++counts.regions[r->value];
    } else {
      ++counts.outside;
    }
    ++counts.total;
  }
  return counts;
}

ProbabilityInterval interval_from_counts(std::size_t k, std::size_t N, double beta_per) {
  return clopper_pearson(k, N, beta_per);
}

namespace {

IntervalMDP layout_states(const Partition& part, StateLayout& layout) {
  IntervalMDP model;
  layout.regions = part.size();
  for (std::size_t r = 0; r < part.size(); ++r) model.add_state({StateKind::region, r});
  model.add_state({StateKind::goal, 0});
  model.add_state({StateKind::unsafe, 0});
  model.add_state({StateKind::out, 0});
  return model;
}

std::map<std::size_t, std::size_t> aggregate(const Partition& part, const StateLayout& layout,
                                             const TransitionCounts& counts) {
  std::map<std::size_t, std::size_t> buckets;
  for (const auto& [r, k] : counts.regions) {
    const RegionId id{r};
    const std::size_t s = part.is_goal(id) ? layout.goal()
                          : part.is_critical(id) ? layout.unsafe()
                                                 : r;
    buckets[s] += k;
  }
  if (counts.outside > 0) buckets[layout.out()] += counts.outside;
  return buckets;
}

void check_inputs(const std::vector<AbstractAction>& actions,
                  const std::vector<TransitionCounts>& counts, std::size_t samples) {
  if (samples == 0) throw InvalidArgument("sample count must be positive");
  if (counts.size() != actions.size()) {
    throw InvalidArgument("need one count vector per action");
  }
  for (std::size_t j = 0; j < actions.size(); ++j) {
    if (actions[j].id != j) throw InvalidArgument("action ids must equal their positions");
    if (!actions[j].enabled_in.empty() && counts[j].total != samples) {
      throw InvalidArgument("counts of action " + std::to_string(j) + " do not sum to N");
    }
  }
}

void attach_rows(IntervalMDP& model, const std::vector<AbstractAction>& actions,
                 const std::vector<std::size_t>& row_of_action) {
  std::vector<std::vector<std::size_t>> per_state(model.num_states());
  for (const auto& a : actions) {
    for (const auto r : a.enabled_in) per_state[r.value].push_back(a.id);
  }
  for (std::size_t s = 0; s < per_state.size(); ++s) {
    for (const auto j : per_state[s]) model.add_choice(s, j, row_of_action[j]);
  }
}

std::size_t count_active(const std::vector<AbstractAction>& actions) {
  return static_cast<std::size_t>(std::count_if(
      actions.begin(), actions.end(), [](const auto& a) { return !a.enabled_in.empty(); }));
}

}  // namespace

Abstraction assemble_imdp(const Partition& part, const std::vector<AbstractAction>& actions,
                          std::vector<TransitionCounts> counts, std::size_t samples, double beta,
                          const IntervalEstimator& estimator) {
  check_inputs(actions, counts, samples);
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0, 1)");
  const std::size_t active = count_active(actions);
  if (active == 0) throw VacuousAbstraction("no action is enabled in any region");

  Abstraction out;
  out.model = layout_states(part, out.layout);
  const auto& layout = out.layout;
  std::size_t unlabeled = 0;
  for (std::size_t r = 0; r < part.size(); ++r) unlabeled += part.is_labeled(RegionId{r}) ? 0 : 1;
  const std::size_t critical = part.critical_regions().size();
  const bool has_goal = unlabeled + critical < part.size();
  out.num_intervals = active * (unlabeled + 3);
  out.beta_per = beta / static_cast<double>(out.num_intervals);
  out.model.confidence = 1.0 - beta;

  const double zero_high = estimator(0, samples, out.beta_per).high;
  std::vector<std::size_t> row_of_action(actions.size(), 0);
  for (const auto& action : actions) {
    if (action.enabled_in.empty()) continue;
    const auto& c = counts[action.id];
    auto buckets = aggregate(part, layout, c);

    // Zero-count buckets that the inflated sample support can reach.
    const Vector pad = kSupportInflation * (c.support.hi - c.support.lo);
    const Box reach{c.support.lo - pad, c.support.hi + pad};
    bool goal_reachable = false, unsafe_reachable = false;
    std::size_t reachable_regions = 0;
    for (const auto id : part.cells_touching(reach)) {
      if (part.is_goal(id)) {
        goal_reachable = true;
      } else if (part.is_critical(id)) {
        unsafe_reachable = true;
      } else {
        buckets.try_emplace(id.value, 0);
        ++reachable_regions;
      }
    }
    if (goal_reachable) buckets.try_emplace(layout.goal(), 0);
    if (unsafe_reachable) buckets.try_emplace(layout.unsafe(), 0);
    const bool out_reachable = !reach.subset_of(part.domain());
    if (out_reachable) buckets.try_emplace(layout.out(), 0);
    const bool pruned = reachable_regions < unlabeled || (has_goal && !goal_reachable) ||
                        (critical > 0 && !unsafe_reachable) || !out_reachable;

    Distribution row;
    row.reserve(buckets.size() + 1);
    for (const auto& [s, k] : buckets) row.push_back({s, estimator(k, samples, out.beta_per)});
    if (pruned) {
      auto it = std::find_if(row.begin(), row.end(),
                             [&](const Transition& t) { return t.successor == layout.unsafe(); });
      if (it != row.end()) {
        it->interval.high = std::min(1.0, it->interval.high + zero_high);
      } else {
        row.push_back({layout.unsafe(), {0.0, zero_high}});
        std::sort(row.begin(), row.end(),
                  [](const Transition& a, const Transition& b) { return a.successor < b.successor; });
      }
    }
    row_of_action[action.id] = out.model.add_row(std::move(row));
  }
  attach_rows(out.model, actions, row_of_action);
  out.counts = std::move(counts);
  return out;
}

Abstraction assemble_point_mdp(const Partition& part, const std::vector<AbstractAction>& actions,
                               std::vector<TransitionCounts> counts, std::size_t samples) {
  check_inputs(actions, counts, samples);
  if (count_active(actions) == 0) throw VacuousAbstraction("no action is enabled in any region");
  Abstraction out;
  out.model = layout_states(part, out.layout);
  out.model.confidence = 0.0;
  std::vector<std::size_t> row_of_action(actions.size(), 0);
  const double n = static_cast<double>(samples);
  for (const auto& action : actions) {
    if (action.enabled_in.empty()) continue;
    Distribution row;
    for (const auto& [s, k] : aggregate(part, out.layout, counts[action.id])) {
      const double p = static_cast<double>(k) / n;
      row.push_back({s, {p, p}});
    }
    row_of_action[action.id] = out.model.add_row(std::move(row));
  }
  attach_rows(out.model, actions, row_of_action);
  out.counts = std::move(counts);
  return out;
}

std::vector<TransitionCounts> count_all_successors(const LinearSystem& sys, const Partition& part,
                                                   const std::vector<AbstractAction>& actions,
                                                   const AbstractionConfig& config) {
  if (count_active(actions) == 0) throw VacuousAbstraction("no action is enabled in any region");
  const auto samples = sample_noise_set(sys.noise(), config.samples, config.seed);
  std::vector<TransitionCounts> counts(actions.size());
  for (const auto& a : actions) {
    if (!a.enabled_in.empty()) counts[a.id] = count_successors(part, a.target, samples);
  }
  return counts;
}

Abstraction build_imdp(const LinearSystem& sys, const Partition& part,
                       const std::vector<AbstractAction>& actions, const AbstractionConfig& config,
                       const IntervalEstimator& estimator) {
  return assemble_imdp(part, actions, count_all_successors(sys, part, actions, config),
                       config.samples, config.beta, estimator);
}

Abstraction build_pointmdp(const LinearSystem& sys, const Partition& part,
                           const std::vector<AbstractAction>& actions,
                           const AbstractionConfig& config) {
  return assemble_point_mdp(part, actions, count_all_successors(sys, part, actions, config),
                            config.samples);
}

}  // namespace imdp
