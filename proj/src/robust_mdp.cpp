#include "imdp/robust_mdp.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <utility>

namespace imdp {

std::size_t IntervalMDP::add_state(StateInfo info) {
  states_.push_back(info);
  choices_.emplace_back();
  return states_.size() - 1;
}

std::size_t IntervalMDP::add_row(Distribution dist) {
  rows_.push_back(std::move(dist));
  return rows_.size() - 1;
}

void IntervalMDP::add_choice(std::size_t state, std::size_t action, std::size_t row) {
  if (state >= states_.size() || row >= rows_.size()) {
    throw InvalidArgument("add_choice: state or row out of range");
  }
  auto& list = choices_[state];
  if (!list.empty() && list.back().action >= action) {
    throw InvalidArgument("add_choice: actions must be added in increasing order");
  }
  list.push_back({action, row});
}

const Distribution& IntervalMDP::distribution(std::size_t s, std::size_t action) const {
  const auto& list = choices_.at(s);
  auto it = std::lower_bound(list.begin(), list.end(), action,
                             [](const Choice& c, std::size_t a) { return c.action < a; });
  if (it == list.end() || it->action != action) {
    throw InvalidArgument("action " + std::to_string(action) + " not enabled in state " +
                          std::to_string(s));
  }
  return rows_[it->row];
}

std::size_t IntervalMDP::num_transitions() const {
  std::size_t total = 0;
  for (const auto& list : choices_) {
    for (const auto& c : list) total += rows_[c.row].size();
  }
  return total;
}

std::size_t IntervalMDP::num_state_action_pairs() const {
  std::size_t total = 0;
  for (const auto& list : choices_) total += list.size();
  return total;
}

std::optional<std::size_t> IntervalMDP::find_state(StateKind kind) const {
  for (std::size_t s = 0; s < states_.size(); ++s) {
    if (states_[s].kind == kind) return s;
  }
  return std::nullopt;
}

namespace {

void check_row(const Distribution& row, std::size_t num_states, const std::string& where) {
  double sum_low = 0.0, sum_high = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    const auto& t = row[i];
    if (t.successor >= num_states) throw InvalidArgument(where + ": successor out of range");
    if (i > 0 && row[i - 1].successor >= t.successor) {
      throw InvalidArgument(where + ": successors must be sorted and distinct");
    }
    if (!(t.interval.low >= 0.0 && t.interval.low <= t.interval.high && t.interval.high <= 1.0)) {
      throw InfeasibleIntervals(where + ": interval endpoints must satisfy 0 <= low <= high <= 1");
    }
    sum_low += t.interval.low;
    sum_high += t.interval.high;
  }
  if (sum_low > 1.0 + kIntervalSumTolerance || sum_high < 1.0 - kIntervalSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << where << ": intervals admit no distribution (sum low " << sum_low << ", sum high "
        << sum_high << ")";
    throw InfeasibleIntervals(msg.str());
  }
}

}  // namespace

void IntervalMDP::validate() const {
  for (std::size_t s = 0; s < states_.size(); ++s) {
    if (is_absorbing(s) && !choices_[s].empty()) {
      throw InvalidArgument("absorbing state " + std::to_string(s) + " has actions");
    }
    for (const auto& c : choices_[s]) {
      check_row(rows_[c.row], states_.size(),
                "state " + std::to_string(s) + " action " + std::to_string(c.action));
    }
  }
}

bool operator==(const IntervalMDP& a, const IntervalMDP& b) {
  if (a.states_ != b.states_ || a.confidence != b.confidence) return false;
  for (std::size_t s = 0; s < a.states_.size(); ++s) {
    const auto& ca = a.choices_[s];
    const auto& cb = b.choices_[s];
    if (ca.size() != cb.size()) return false;
    for (std::size_t i = 0; i < ca.size(); ++i) {
      if (ca[i].action != cb[i].action) return false;
      if (a.rows_[ca[i].row] != b.rows_[cb[i].row]) return false;
    }
  }
  return true;
}

std::string state_label(const StateInfo& info) {
  switch (info.kind) {
    case StateKind::region:
      return "region:" + std::to_string(info.region);
    case StateKind::goal:
      return "goal";
    case StateKind::unsafe:
      return "unsafe";
    case StateKind::out:
      return "out";
  }
  return "?";
}

namespace {

// Scratch buffers reused across backups.
struct InnerScratch {
  std::vector<std::pair<double, std::size_t>> order;
};

double check_and_sum_low(std::span<const ProbabilityInterval> iv, double& sum_high) {
  double sum_low = 0.0;
  sum_high = 0.0;
  for (const auto& i : iv) {
    sum_low += i.low;
    sum_high += i.high;
  }
  if (sum_low > 1.0 + kIntervalSumTolerance || sum_high < 1.0 - kIntervalSumTolerance) {
    throw InfeasibleIntervals("intervals admit no distribution");
  }
  return sum_low;
}

// Core of inner_min. Fills `mass` (one entry per successor) when non-null.
template <typename ValueAt, typename IntervalAt>
double greedy_min(std::size_t m, ValueAt value_at, IntervalAt interval_at, double sum_low,
                  InnerScratch& scratch, std::vector<double>* mass) {
  auto& order = scratch.order;
  order.clear();
  double result = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double v = value_at(i);
    order.emplace_back(v, i);
    result += interval_at(i).low * v;
  }
  std::sort(order.begin(), order.end());
  if (mass) {
    mass->resize(m);
    for (std::size_t i = 0; i < m; ++i) (*mass)[i] = interval_at(i).low;
  }
  double remaining = 1.0 - sum_low;
  for (const auto& [v, i] : order) {
    if (remaining <= 0.0) break;
    const auto& iv = interval_at(i);
    const double add = std::min(iv.high - iv.low, remaining);
    result += add * v;
    remaining -= add;
    if (mass) (*mass)[i] += add;
  }
  return result;
}

}  // namespace

InnerResult inner_min(std::span<const double> values,
                      std::span<const ProbabilityInterval> intervals) {
  if (values.size() != intervals.size()) throw InvalidArgument("inner_min: size mismatch");
  double sum_high = 0.0;
  const double sum_low = check_and_sum_low(intervals, sum_high);
  InnerScratch scratch;
  InnerResult out;
  out.value = greedy_min(
      values.size(), [&](std::size_t i) { return values[i]; },
      [&](std::size_t i) -> const ProbabilityInterval& { return intervals[i]; }, sum_low, scratch,
      &out.distribution);
  return out;
}

namespace {

enum class Mode { robust, nominal };

struct Backup {
  const IntervalMDP& model;
  Mode mode;
  std::vector<char> row_used;
  std::vector<double> row_sum_low;
  std::vector<double> row_value;
  InnerScratch scratch;

  Backup(const IntervalMDP& m, Mode md) : model(m), mode(md) {
    row_used.assign(model.num_rows(), 0);
    row_sum_low.assign(model.num_rows(), 0.0);
    row_value.assign(model.num_rows(), 0.0);
    for (std::size_t s = 0; s < model.num_states(); ++s) {
      if (model.is_absorbing(s) && !model.choices(s).empty()) {
        throw InvalidArgument("absorbing state " + std::to_string(s) + " has actions");
      }
      for (const auto& c : model.choices(s)) {
        if (row_used[c.row]) continue;
        row_used[c.row] = 1;
        const auto& row = model.row(c.row);
        const std::string where =
            "state " + std::to_string(s) + " action " + std::to_string(c.action);
        check_row(row, model.num_states(), where);
        double sum_low = 0.0;
        for (const auto& t : row) {
          if (mode == Mode::nominal && t.interval.low != t.interval.high) {
            throw InvalidArgument(where + ": nominal iteration requires point intervals");
          }
          sum_low += t.interval.low;
        }
        row_sum_low[c.row] = sum_low;
      }
    }
  }

  static double terminal(const StateInfo& info) { return info.kind == StateKind::goal ? 1.0 : 0.0; }

  void operator()(const Vector& next, Vector& out, std::vector<std::optional<std::size_t>>& act) {
    for (std::size_t r = 0; r < model.num_rows(); ++r) {
      if (!row_used[r]) continue;
      const auto& row = model.row(r);
      if (mode == Mode::nominal) {
        double v = 0.0;
        for (const auto& t : row) v += t.interval.low * next[static_cast<Eigen::Index>(t.successor)];
        row_value[r] = v;
      } else {
        row_value[r] = greedy_min(
            row.size(),
            [&](std::size_t i) { return next[static_cast<Eigen::Index>(row[i].successor)]; },
            [&](std::size_t i) -> const ProbabilityInterval& { return row[i].interval; },
            row_sum_low[r], scratch, nullptr);
      }
    }
    out.resize(static_cast<Eigen::Index>(model.num_states()));
    act.assign(model.num_states(), std::nullopt);
    for (std::size_t s = 0; s < model.num_states(); ++s) {
      const auto si = static_cast<Eigen::Index>(s);
      if (model.is_absorbing(s)) {
        out[si] = terminal(model.state(s));
        continue;
      }
      double best = 0.0;
      std::optional<std::size_t> arg;
      for (const auto& c : model.choices(s)) {
        const double v = row_value[c.row];
        if (!arg || v > best) {
          best = v;
          arg = c.action;
        }
      }
      out[si] = std::clamp(best, 0.0, 1.0);
      act[s] = arg;
    }
  }
};

RobustSolution iterate(const IntervalMDP& model, int horizon, Mode mode) {
  if (horizon < 1) throw InvalidArgument("value iteration: horizon must be >= 1");
  // Rows are checked once up front; a bad row fails the first backup.
  auto make_backup = [&] {
    try {
      return Backup(model, mode);
    } catch (const InfeasibleIntervals& e) {
      throw InfeasibleIntervals(std::string(e.what()) + " at step " + std::to_string(horizon - 1));
    }
  };
  Backup backup = make_backup();
  RobustSolution sol;
  sol.horizon = horizon;
  sol.confidence = model.confidence;
  const auto K = static_cast<std::size_t>(horizon);
  sol.values.resize(K + 1);
  sol.policy.resize(K);
  Vector& terminal = sol.values[K];
  terminal.resize(static_cast<Eigen::Index>(model.num_states()));
  for (std::size_t s = 0; s < model.num_states(); ++s) {
    terminal[static_cast<Eigen::Index>(s)] = Backup::terminal(model.state(s));
  }
  for (std::size_t k = K; k-- > 0;) backup(sol.values[k + 1], sol.values[k], sol.policy[k]);
  return sol;
}

}  // namespace

RobustSolution robust_value_iteration(const IntervalMDP& model, int horizon) {
  return iterate(model, horizon, Mode::robust);
}

RobustSolution nominal_value_iteration(const IntervalMDP& model, int horizon) {
  return iterate(model, horizon, Mode::nominal);
}

StationarySolution robust_value_iteration_stationary(const IntervalMDP& model, double tolerance,
                                                     int max_iterations) {
  Backup backup(model, Mode::robust);
  StationarySolution sol;
  Vector current(static_cast<Eigen::Index>(model.num_states()));
  for (std::size_t s = 0; s < model.num_states(); ++s) {
    current[static_cast<Eigen::Index>(s)] = Backup::terminal(model.state(s));
  }
  Vector next;
  while (sol.iterations < max_iterations) {
    backup(current, next, sol.policy);
    ++sol.iterations;
    const double change = (next - current).cwiseAbs().maxCoeff();
    current.swap(next);
    if (change < tolerance) {
      sol.converged = true;
      break;
    }
  }
  sol.values = std::move(current);
  return sol;
}

}  // namespace imdp
