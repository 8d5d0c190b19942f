#include "imdp/intervals.hpp"

#include "imdp/common.hpp"

#include <boost/math/special_functions/beta.hpp>

namespace imdp {

namespace {

void check_counts(std::size_t k, std::size_t N, double beta_per) {
  if (N == 0) throw InvalidArgument("interval: N must be positive");
  if (k > N) throw InvalidArgument("interval: k must not exceed N");
  if (!(beta_per > 0.0 && beta_per < 1.0)) {
    throw InvalidArgument("interval: significance must lie in (0, 1)");
  }
}

}  // namespace

ProbabilityInterval clopper_pearson(std::size_t k, std::size_t N, double beta_per) {
  check_counts(k, N, beta_per);
  const auto kd = static_cast<double>(k);
  const auto nd = static_cast<double>(N);
  ProbabilityInterval out{0.0, 1.0};
  if (k > 0) out.low = boost::math::ibeta_inv(kd, nd - kd + 1.0, beta_per / 2.0);
  if (k < N) out.high = boost::math::ibeta_inv(kd + 1.0, nd - kd, 1.0 - beta_per / 2.0);
  return out;
}

ProbabilityInterval point_estimate(std::size_t k, std::size_t N, double beta_per) {
  check_counts(k, N, beta_per);
  const double p = static_cast<double>(k) / static_cast<double>(N);
  return {p, p};
}

}  // namespace imdp
