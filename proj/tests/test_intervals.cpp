#include "imdp/abstraction.hpp"
#include "imdp/intervals.hpp"
#include "oracles/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace imdp;

TEST_CASE("clopper_pearson: boundary counts") {
  CHECK(clopper_pearson(10, 10, 0.05).high == 1.0);
  CHECK(clopper_pearson(0, 10, 0.05).low == 0.0);
  CHECK(clopper_pearson(0, 10, 0.05).high < 1.0);
  CHECK(clopper_pearson(10, 10, 0.05).low > 0.0);
}

TEST_CASE("clopper_pearson: closed form for k = 0") {
  const auto iv = interval_from_counts(0, 10, 0.1);
  CHECK(iv.high == doctest::Approx(1.0 - std::pow(0.05, 0.1)).epsilon(1e-12));
  CHECK(iv.high == doctest::Approx(0.2589).epsilon(1e-4));
}

TEST_CASE("clopper_pearson: k = 10, N = 100, beta = 0.01 against the bisection oracle") {
  const auto ref = oracle::clopper_pearson(10, 100, 0.01);
  // Frozen from the oracle (and equal to Beta quantiles 0.005 / 0.995).
  CHECK(ref.low == doctest::Approx(0.03819565320508155).epsilon(1e-10));
  CHECK(ref.high == doctest::Approx(0.20195352078134415).epsilon(1e-10));
  const auto iv = interval_from_counts(10, 100, 0.01);
  CHECK(iv.low == doctest::Approx(0.03819565320508155).epsilon(1e-12));
  CHECK(iv.high == doctest::Approx(0.20195352078134415).epsilon(1e-12));
}

TEST_CASE("clopper_pearson: matches the oracle across a grid") {
  for (std::size_t N : {1, 7, 50, 333}) {
    for (double beta : {0.5, 0.05, 1e-4}) {
      for (std::size_t k = 0; k <= N; k += std::max<std::size_t>(1, N / 9)) {
        const auto a = clopper_pearson(k, N, beta);
        const auto b = oracle::clopper_pearson(k, N, beta);
        CHECK(a.low == doctest::Approx(b.low).epsilon(1e-8));
        CHECK(a.high == doctest::Approx(b.high).epsilon(1e-8));
        const double p = static_cast<double>(k) / static_cast<double>(N);
        CHECK(a.low <= p);
        CHECK(a.high >= p);
        if (k > 0) CHECK(a.high > 0.0);
      }
    }
  }
}

TEST_CASE("clopper_pearson: domain errors") {
  CHECK_THROWS_AS(clopper_pearson(3, 2, 0.1), InvalidArgument);
  CHECK_THROWS_AS(clopper_pearson(0, 0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(clopper_pearson(1, 2, 0.0), InvalidArgument);
  CHECK_THROWS_AS(clopper_pearson(1, 2, 1.0), InvalidArgument);
}

TEST_CASE("point_estimate is degenerate") {
  const auto iv = point_estimate(3, 12, 0.1);
  CHECK(iv.low == 0.25);
  CHECK(iv.high == 0.25);
}
