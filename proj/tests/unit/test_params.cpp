#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "thinslab/error.hpp"
#include "thinslab/params.hpp"

using namespace thinslab;

TEST_SUITE("params") {
  TEST_CASE("from_physical maps (h, lambda) to (eps, eta)") {
    const ScalingParams a = from_physical(0.01, 1.0);
    CHECK(a.eps() == doctest::Approx(0.1));
    CHECK(a.eta() == doctest::Approx(0.01));
    CHECK(a.bbh_regime());

    const ScalingParams b = from_physical(1.0, 1.0);
    CHECK(b.eps() == doctest::Approx(1.0));
    CHECK_FALSE(b.bbh_regime());

    const ScalingParams c = from_physical(0.5, 1.0);
    CHECK(c.eps() == doctest::Approx(std::sqrt(0.5)));
    CHECK(c.bbh_regime());  // equality case
  }

  TEST_CASE("non-positive inputs are rejected") {
    CHECK_THROWS_AS(from_physical(0.0, 1.0), InvalidParameter);
    CHECK_THROWS_AS(from_physical(1.0, -1.0), InvalidParameter);
    CHECK_THROWS_AS(ScalingParams(0.0, 1.0), InvalidParameter);
  }

  TEST_CASE("inverse map recovers the physical pair and the regime flag matches 2 h lambda <= 1") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-4.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      const double h = std::pow(10.0, u(rng)), lambda = std::pow(10.0, u(rng));
      const ScalingParams p = from_physical(h, lambda);
      CHECK(p.thickness() == doctest::Approx(h).epsilon(1e-14));
      CHECK(p.anchoring_strength() == doctest::Approx(lambda).epsilon(1e-12));
      if (std::abs(2 * h * lambda - 1.0) > 1e-9) CHECK(p.bbh_regime() == (2 * h * lambda <= 1.0));
    }
  }

  TEST_CASE("linear_schedule") {
    const std::vector<double> eps{0.2, 0.1};
    const auto s = linear_schedule(0.5, eps);
    REQUIRE(s.size() == 2);
    CHECK(s[0].eta() == doctest::Approx(0.1));
    CHECK(s[1].eta() == doctest::Approx(0.05));
    CHECK(*s[1].slope() == doctest::Approx(0.5));

    const std::vector<double> one{0.1};
    const auto e = linear_schedule(1.0 / std::sqrt(2.0), one);
    CHECK(e[0].bbh_regime());
    CHECK_THROWS_AS(linear_schedule(0.8, one), InvalidParameter);
  }
}
