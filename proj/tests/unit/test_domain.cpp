#include <doctest.h>

#include <cmath>
#include <numbers>

#include "thinslab/error.hpp"
#include "thinslab/vortex.hpp"

using namespace thinslab;

TEST_SUITE("domain") {
  TEST_CASE("areas") {
    const auto disk = make_domain(DomainShape::disk(1.0), 256, 256);
    CHECK(std::abs(disk->area() - std::numbers::pi) / std::numbers::pi < 0.02);
    const auto rect = make_domain(DomainShape::rectangle(2.0, 1.0), 256, 128);
    CHECK(rect->area() == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("degenerate geometry") {
    CHECK_THROWS_AS(make_domain(DomainShape::annulus(0.5, 0.25), 64, 64), InvalidGeometry);
    CHECK_THROWS_AS(make_domain(DomainShape::disk(0.0), 64, 64), InvalidGeometry);
  }

  TEST_CASE("boundary chain is counterclockwise and traversed once") {
    const auto d = make_domain(DomainShape::disk(1.0), 64, 64);
    REQUIRE(d->loops().size() == 1);
    CHECK(d->outer_loop().signed_area > 0.0);
    const auto r = make_domain(DomainShape::rectangle(2.0, 1.0), 64, 32);
    CHECK(r->outer_loop().signed_area > 0.0);
    CHECK(r->outer_loop().nodes.size() == r->boundary_nodes().size());
  }

  TEST_CASE("power-law data have the requested degree and unit length") {
    const auto d = make_domain(DomainShape::disk(1.0), 64, 64);
    for (int deg : {0, 1, 2, -1}) {
      const BoundaryDatum g = power_law_datum(d, deg);
      CHECK(datum_degree(g) == deg);
      PlanarField u(d);
      u.values = g.values;
      CHECK(degree_on_loop(u, d->outer_loop().nodes) == deg);
      for (int n : d->boundary_nodes()) CHECK(norm(g.at(n)) == doctest::Approx(1.0).epsilon(1e-15));
    }
  }

  TEST_CASE("conjugate and rotated data") {
    const auto d = make_domain(DomainShape::disk(1.0), 32, 32);
    const BoundaryDatum g = power_law_datum(d, 2);
    CHECK(datum_degree(conjugate(g)) == -2);
    const BoundaryDatum r = rotated(g, 0.7);
    CHECK(datum_degree(r) == 2);
    const int n = d->boundary_nodes()[0];
    CHECK(angle_between(g.at(n), r.at(n)) == doctest::Approx(0.7));
  }

  TEST_CASE("extrude") {
    const auto d = make_domain(DomainShape::disk(1.0), 64, 64);
    const Grid3D g = extrude(d, 8);
    CHECK(g.hz() == doctest::Approx(1.0 / 7.0));
    CHECK(g.node_count() == d->node_count() * 8);
    CHECK_THROWS_AS(extrude(d, 1), InvalidParameter);
    const auto r = make_domain(DomainShape::rectangle(2.0, 1.0), 64, 32);
    const Grid3D gr = extrude(r, 16);
    CHECK(gr.lateral_nodes().size() == r->outer_loop().nodes.size() * 16);
  }

  TEST_CASE("projection and signed distance") {
    const DomainShape s = DomainShape::disk(2.0);
    Vec2 nu;
    const Vec2 p = s.project({1.0, 0.0}, &nu);
    CHECK(p.x == doctest::Approx(2.0));
    CHECK(nu.x == doctest::Approx(1.0));
    CHECK(s.signed_distance({0.5, 0.0}) == doctest::Approx(-1.5));
    const DomainShape r = DomainShape::rectangle(2.0, 1.0);
    CHECK(r.signed_distance({0.0, 0.0}) == doctest::Approx(-0.5));
    CHECK(r.signed_distance({2.0, 0.0}) == doctest::Approx(1.0));
  }
}
