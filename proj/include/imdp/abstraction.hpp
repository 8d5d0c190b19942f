#pragma once

#include "imdp/dynamics.hpp"
#include "imdp/intervals.hpp"
#include "imdp/partition.hpp"
#include "imdp/robust_mdp.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace imdp {

/// Target point d. Choosing the action anywhere in an enabled region
/// steers the noiseless successor exactly onto d, so the successor
/// distribution is d + eta regardless of the source state.
struct AbstractAction {
  std::size_t id = 0;
  Vector target;
  std::vector<RegionId> enabled_in;
};

struct AbstractionConfig {
  std::size_t samples = 1000;
  double beta = 0.01;
  std::uint64_t seed = 0;
};

/// Successor counts of one action over region buckets plus the outside
/// bucket, together with the bounding box of the successor samples.
struct TransitionCounts {
  std::map<std::size_t, std::size_t> regions;
  std::size_t outside = 0;
  std::size_t total = 0;
  Box support;
};

/// Fixed state layout: regions 0..R-1 followed by the absorbing goal/unsafe/out states.
struct StateLayout {
  std::size_t regions = 0;
  [[nodiscard]] std::size_t goal() const { return regions; }
  [[nodiscard]] std::size_t unsafe() const { return regions + 1; }
  [[nodiscard]] std::size_t out() const { return regions + 2; }
  [[nodiscard]] std::size_t size() const { return regions + 3; }
};

/// Fraction of the sample bounding box width added on each side before
/// deciding which zero-count buckets are geometrically possible.
inline constexpr double kSupportInflation = 0.10;

/// One action per region, targeting the region center; enabled_in empty.
std::vector<AbstractAction> default_actions(const Partition& part);

/// Fills enabled_in. Action j is enabled in an unlabeled region r iff the
/// steering input B^+(d_j - A v - q) lies in U (tolerance 1e-9) at every
/// vertex v of r. The input is affine in the state and U is convex, so the
/// vertex test certifies the whole cell; it is evaluated in closed form as
/// center +/- |B^+ A| * half-width, which attains the same extreme values.
/// Throws RankDeficient when B lacks full row rank.
std::vector<AbstractAction> enabled_actions(const LinearSystem& sys, const Partition& part,
                                            std::vector<AbstractAction> actions);

/// Literal 2^n vertex check for a single (action target, region) pair.
bool enabled_by_vertices(const LinearSystem& sys, const Partition& part, const Vector& target,
                         RegionId region);

std::vector<Vector> sample_noise_set(const NoiseModel& noise, std::size_t count,
                                     std::uint64_t seed);

TransitionCounts count_successors(const Partition& part, const Vector& target,
                                  const std::vector<Vector>& samples);

/// Clopper-Pearson interval; see clopper_pearson().
ProbabilityInterval interval_from_counts(std::size_t k, std::size_t N, double beta_per);

struct Abstraction {
  IntervalMDP model;
  StateLayout layout;
  /// Indexed by action id; empty (total 0) for actions enabled nowhere.
  std::vector<TransitionCounts> counts;
  double beta_per = 0.0;
  std::size_t num_intervals = 0;
};

/// Aggregates counts into GOAL / UNSAFE / OUT buckets and converts them to
/// PAC intervals at significance beta / I, I = (#actions with rows) *
/// (#unlabeled regions + 3). Zero-count region buckets whose cell misses
/// the inflated sample support are dropped; their combined mass is bounded
/// by one extra [0, high(0, N)] term added to UNSAFE.
Abstraction assemble_imdp(const Partition& part, const std::vector<AbstractAction>& actions,
                          std::vector<TransitionCounts> counts, std::size_t samples, double beta,
                          const IntervalEstimator& estimator = clopper_pearson);

/// Same states and actions with point probabilities [k/N, k/N].
Abstraction assemble_point_mdp(const Partition& part, const std::vector<AbstractAction>& actions,
                               std::vector<TransitionCounts> counts, std::size_t samples);

/// Shared noise samples for all actions, one count vector per enabled
/// action. Throws VacuousAbstraction when no action is enabled anywhere.
std::vector<TransitionCounts> count_all_successors(const LinearSystem& sys, const Partition& part,
                                                   const std::vector<AbstractAction>& actions,
                                                   const AbstractionConfig& config);

Abstraction build_imdp(const LinearSystem& sys, const Partition& part,
                       const std::vector<AbstractAction>& actions, const AbstractionConfig& config,
                       const IntervalEstimator& estimator = clopper_pearson);

Abstraction build_pointmdp(const LinearSystem& sys, const Partition& part,
                           const std::vector<AbstractAction>& actions,
                           const AbstractionConfig& config);

}  // namespace imdp
