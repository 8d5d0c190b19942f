#pragma once

#include "imdp/robust_mdp.hpp"
#include "oracles/oracles.hpp"

#include <random>

namespace testutil {

inline imdp::Vector vec(std::initializer_list<double> xs) {
  return Eigen::Map<const imdp::Vector>(xs.begin(), static_cast<Eigen::Index>(xs.size()));
}

inline imdp::Box box(std::initializer_list<double> lo, std::initializer_list<double> hi) {
  return {vec(lo), vec(hi)};
}

/// Random iMDP: `regions` transient states, then GOAL and UNSAFE. Every
/// (state, action) pair gets its own row.
inline imdp::IntervalMDP random_imdp(std::mt19937_64& rng, std::size_t regions,
                                     std::size_t max_actions) {
  imdp::IntervalMDP model;
  for (std::size_t r = 0; r < regions; ++r) model.add_state({imdp::StateKind::region, r});
  model.add_state({imdp::StateKind::goal, 0});
  model.add_state({imdp::StateKind::unsafe, 0});
  const std::size_t S = model.num_states();
  std::uniform_int_distribution<std::size_t> n_actions(0, max_actions);
  std::uniform_int_distribution<std::size_t> n_succ(1, S);
  for (std::size_t s = 0; s < regions; ++s) {
    const std::size_t a_count = n_actions(rng);
    for (std::size_t a = 0; a < a_count; ++a) {
      std::vector<std::size_t> succ(S);
      for (std::size_t i = 0; i < S; ++i) succ[i] = i;
      std::shuffle(succ.begin(), succ.end(), rng);
      succ.resize(n_succ(rng));
      std::sort(succ.begin(), succ.end());
      const auto iv = oracle::random_intervals(rng, succ.size());
      imdp::Distribution row;
      for (std::size_t i = 0; i < succ.size(); ++i) row.push_back({succ[i], iv[i]});
      model.add_choice(s, a, model.add_row(std::move(row)));
    }
  }
  return model;
}

}  // namespace testutil
