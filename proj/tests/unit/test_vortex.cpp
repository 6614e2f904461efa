#include <doctest.h>

#include <cmath>

#include "thinslab/error.hpp"
#include "thinslab/harmonic.hpp"

using namespace thinslab;

namespace {

PlanarField vortex_field(const DomainPtr& d, Vec2 a, int charge) {
  PlanarField u(d);
  for (int n : d->domain_nodes()) {
    const Vec2 r = d->position(n) - a;
    const double th = charge * std::atan2(r.y, r.x);
    const double s = std::min(1.0, norm(r) / (2 * d->h_max()));
    u.values[n] = {s * std::cos(th), s * std::sin(th)};
  }
  return u;
}

}  // namespace

TEST_SUITE("vortex") {
  TEST_CASE("current of simple fields") {
    const auto d = make_domain(DomainShape::annulus(0.25, 1.0), 128, 128);
    PlanarField c(d), real(d);
    for (int n : d->domain_nodes()) {
      c.values[n] = {0.6, 0.8};
      real.values[n] = {std::sin(d->position(n).x), 0.0};
    }
    for (const Vec2& j : current(c)) CHECK(norm(j) == 0.0);
    for (const Vec2& j : current(real)) CHECK(norm(j) == 0.0);

    const PlanarField h = vortex_field(d, {0, 0}, 1);
    const auto j = current(h);
    double worst = 0.0;
    for (int n : d->interior_nodes()) {
      const Vec2 x = d->position(n);
      const double r = norm(x);
      if (r < 10 * d->h_max()) continue;
      const Vec2 expect = perp(x) * (1.0 / (r * r));
      worst = std::max(worst, norm(j[n] - expect) / norm(expect));
    }
    CHECK(worst < 0.02);
  }

  TEST_CASE("Jacobian of identity and constants") {
    const auto d = make_domain(DomainShape::rectangle(2.0, 2.0), 32, 32);
    PlanarField id(d), c(d);
    for (int n : d->domain_nodes()) {
      id.values[n] = d->position(n);
      c.values[n] = {1.0, 0.0};
    }
    const auto J = jacobian(id);
    for (int cj = 0; cj < 32; ++cj) {
      for (int ci = 0; ci < 32; ++ci) CHECK(J[ci + 32 * cj] == doctest::Approx(2.0).epsilon(1e-12));
    }
    for (double v : jacobian(c)) CHECK(v == 0.0);
  }

  TEST_CASE("degree on loops") {
    const auto d = make_domain(DomainShape::disk(1.0), 64, 64);
    const PlanarField h = vortex_field(d, {0, 0}, 1);
    CHECK(degree_on_loop(h, square_loop(*d, {0, 0}, 10)) == 1);
    CHECK(degree_on_loop(h, square_loop(*d, {0, 0}, 11)) == 1);
    CHECK(degree_by_current(h, square_loop(*d, {0, 0}, 10)) == doctest::Approx(1.0).epsilon(0.02));
    CHECK_THROWS_AS(degree_on_loop(h, square_loop(*d, {0, 0}, 1), 0.9), IllDefinedDegree);
    PlanarField c(d);
    for (int n : d->domain_nodes()) c.values[n] = {1.0, 0.0};
    CHECK(degree_on_loop(c, square_loop(*d, {0.1, 0.2}, 5)) == 0);
    CHECK_THROWS_AS(square_loop(*d, {0.9, 0.0}, 10), ShapeError);
  }

  TEST_CASE("locate_defects fixtures") {
    const auto d = make_domain(DomainShape::disk(1.0), 64, 64);
    PlanarField c(d);
    for (int n : d->domain_nodes()) c.values[n] = {1.0, 0.0};
    CHECK(locate_defects(c).size() == 0);

    const Vec2 off{0.013, 0.007};
    const DefectSet one = locate_defects(vortex_field(d, off, 1));
    REQUIRE(one.size() == 1);
    CHECK(one.items[0].charge == 1);
    CHECK(norm(one.items[0].position - off) < d->h_max());

    const HarmonicSolver hs(d, power_law_datum(d, 2));
    DefectSet pres;
    pres.items = {{{0.3, 0.0}, 1}, {{-0.3, 0.0}, 1}};
    const DefectSet found = locate_defects(hs.canonical_map(pres).u);
    REQUIRE(found.size() == 2);
    for (const Defect& a : pres.items) {
      bool hit = false;
      for (const Defect& b : found.items) hit = hit || (b.charge == 1 && norm(b.position - a.position) <= d->h_max());
      CHECK(hit);
    }
  }

  TEST_CASE("Poincare-Hopf consistency, conjugation and boundary warning") {
    const auto d = make_domain(DomainShape::disk(1.0), 64, 64);
    PlanarField u(d);
    const Vec2 a{0.25, 0.1}, b{-0.3, -0.2};
    for (int n : d->domain_nodes()) {
      const Vec2 x = d->position(n);
      const double th = std::atan2(x.y - a.y, x.x - a.x) - std::atan2(x.y - b.y, x.x - b.x);
      const double s = std::min({1.0, norm(x - a) / (2 * d->h_max()), norm(x - b) / (2 * d->h_max())});
      u.values[n] = {s * std::cos(th), s * std::sin(th)};
    }
    const DefectSet ds = locate_defects(u);
    REQUIRE(ds.size() == 2);
    CHECK(ds.total_charge() == degree_on_loop(u, square_loop(*d, {0, 0}, 20)));

    const DefectSet m = locate_defects(mirrored(u));
    REQUIRE(m.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(m.items[i].charge == -ds.items[i].charge);
      CHECK(norm(m.items[i].position - ds.items[i].position) < 1e-12);
    }

    const DefectSet edge = locate_defects(vortex_field(d, {0.985, 0.0}, 1));
    CHECK_FALSE(edge.warnings.empty());
  }
}
