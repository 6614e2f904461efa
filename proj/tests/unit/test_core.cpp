#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "thinslab/core.hpp"

using namespace thinslab;

namespace {

SolveOptions quick() {
  SolveOptions o;
  o.tol_residual = 1e-4;
  return o;
}

}  // namespace

TEST_SUITE("core") {
  TEST_CASE("too few cells per eps is refused") {
    const ScalingParams p(0.05, 0.05 * std::sqrt(0.5));
    CoreResolution r;
    r.cells_per_eps = 3.0;
    CHECK_THROWS_AS(core_energy(0.2, p, r), ResolutionError);
    r.cells_per_eps = 4.0;
    r.nx = 8;
    CHECK_THROWS_AS(core_energy(0.2, p, r), ResolutionError);
  }

  TEST_CASE("cell problem is invariant under a rotation of the data") {
    const ScalingParams p(0.05, 0.05 * std::sqrt(0.5));
    const CoreSample a = core_energy(0.2, p, {}, quick(), 0.0);
    const CoreSample b = core_energy(0.2, p, {}, quick(), 0.7);
    CHECK(a.nx == 32);
    CHECK(a.report.converged);
    CHECK(b.gamma_value == doctest::Approx(a.gamma_value).epsilon(1e-4));
    CHECK(a.tilde_gamma == doctest::Approx(a.gamma_value - M_PI * std::log(0.2 / 0.05)).epsilon(1e-12));
  }

  TEST_CASE("single-entry ladder reports an infinite spread") {
    const CoreConstant c = core_constant(std::sqrt(0.5), {{0.2, 0.05}}, {}, quick());
    CHECK(std::isinf(c.spread));
    CHECK_FALSE(c.warnings.empty());
    REQUIRE(c.samples.size() == 1);
    CHECK(c.gamma == c.samples[0].tilde_gamma);
  }

  TEST_CASE("ladders with different ratios agree within their spreads") {
    const double k = std::sqrt(0.5);
    const CoreConstant lo = core_constant(k, {{0.4, 0.05}, {0.2, 0.05}}, {}, quick(), 2);
    const CoreConstant hi = core_constant(k, {{0.4, 0.05}, {0.8, 0.05}}, {}, quick(), 2);
    REQUIRE(lo.samples.size() == 2);
    CHECK(lo.samples[0].sigma < lo.samples[1].sigma);
    CHECK(lo.spread < 0.1);
    CHECK(hi.spread < 0.1);
    CHECK(std::abs(lo.gamma - hi.gamma) <= (lo.spread + hi.spread) * std::abs(hi.gamma) + 1e-12);

    std::istringstream rows(core_csv_rows(hi));
    std::string line;
    int n = 0;
    while (std::getline(rows, line)) {
      ++n;
      CHECK(std::count(line.begin(), line.end(), ',') == 6);
    }
    CHECK(n == 2);
  }
}
