#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "thinslab/energy.hpp"
#include "thinslab/error.hpp"

using namespace thinslab;

namespace {

constexpr double kPi = std::numbers::pi;

DirectorField constant_field(const Grid3D& g, Vec3 v) {
  DirectorField U(g);
  for (auto& x : U.values) x = v;
  return U;
}

DirectorField wavy_field(const Grid3D& grid, double amp) {
  DirectorField U(grid);
  const Domain2D& d = grid.base();
  for (int k = 0; k < grid.n_layers(); ++k) {
    const double z = k * grid.hz();
    for (int n : d.domain_nodes()) {
      const Vec2 x = d.position(n);
      Vec3 v{std::cos(2 * x.x + z), std::sin(3 * x.y - z), amp * std::sin(x.x * x.y + 2 * z)};
      U.at(n, k) = v * (1.0 / norm(v));
    }
  }
  return U;
}

}  // namespace

TEST_SUITE("energy") {
  TEST_CASE("constant in-plane field has zero energy") {
    const Grid3D g(make_domain(DomainShape::disk(1.0), 32, 32), 5);
    const EnergyBreakdown e = energy_full(constant_field(g, {1, 0, 0}), ScalingParams(0.1, 0.05));
    CHECK(e.total == 0.0);
  }

  TEST_CASE("vertical field pays full anchoring") {
    const auto d = make_domain(DomainShape::disk(1.0), 128, 128);
    const Grid3D g(d, 5);
    const EnergyBreakdown e = energy_full(constant_field(g, {0, 0, 1}), ScalingParams(0.1, 0.05));
    CHECK(e.bulk_horizontal + e.bulk_vertical == doctest::Approx(0.0));
    CHECK(e.anchoring == doctest::Approx(d->area() / 0.01).epsilon(1e-12));
    CHECK(std::abs(e.anchoring - kPi / 0.01) / (kPi / 0.01) < 0.02);
  }

  TEST_CASE("hedgehog on an annulus") {
    const auto d = make_domain(DomainShape::annulus(0.25, 0.5), 128, 128);
    const Grid3D g(d, 4);
    DirectorField U(g);
    for (int k = 0; k < 4; ++k) {
      for (int n : d->domain_nodes()) {
        const Vec2 x = d->position(n) * (1.0 / norm(d->position(n)));
        U.at(n, k) = {x.x, x.y, 0.0};
      }
    }
    CHECK(std::abs(energy_full(U, ScalingParams(0.3, 0.1)).total - kPi * std::log(2.0)) < 0.02 * kPi * std::log(2.0));
  }

  TEST_CASE("restricted energy: full set, empty set, additivity, outside nodes") {
    const auto d = make_domain(DomainShape::disk(1.0), 32, 32);
    const Grid3D g(d, 4);
    const DirectorField U = wavy_field(g, 0.5);
    const ScalingParams p(0.2, 0.1);
    const EnergyBreakdown full = energy_full(U, p);
    const std::vector<int> all(d->domain_nodes().begin(), d->domain_nodes().end());
    CHECK(energy_restricted(U, p, all).total == doctest::Approx(full.total).epsilon(1e-13));
    CHECK(energy_restricted(U, p, std::vector<int>{}).total == 0.0);

    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<int> a, b;
      for (int n : all) (rng() % 2 ? a : b).push_back(n);
      const double sum = energy_restricted(U, p, a).total + energy_restricted(U, p, b).total;
      CHECK(sum == doctest::Approx(full.total).epsilon(1e-12));
    }
    int outside = -1;
    for (int n = 0; n < d->node_count(); ++n) {
      if (!d->in_domain(n)) {
        outside = n;
        break;
      }
    }
    CHECK_THROWS_AS(energy_restricted(U, p, std::vector<int>{outside}), ShapeError);
  }

  TEST_CASE("vertical average") {
    const auto d = make_domain(DomainShape::disk(1.0), 16, 16);
    const Grid3D flat(d, 6);
    DirectorField U(flat);
    for (int k = 0; k < 6; ++k) {
      for (int n : d->domain_nodes()) U.at(n, k) = {0.6, 0.8, 0.0};
    }
    const PlanarField u = vertical_average(U);
    CHECK(u.values[d->interior_nodes()[0]].x == doctest::Approx(0.6));

    const Grid3D fine(d, 64);
    DirectorField R(fine);
    for (int k = 0; k < 64; ++k) {
      const double z = k * fine.hz();
      for (int n : d->domain_nodes()) R.at(n, k) = {std::cos(2 * kPi * z), std::sin(2 * kPi * z), 0.0};
    }
    const int n0 = d->interior_nodes()[0];
    CHECK(norm(vertical_average(R).values[n0]) < 1e-2);
    CHECK(norm(vertical_average(constant_field(fine, {0, 0, 1})).values[n0]) == 0.0);
  }

  TEST_CASE("GL energy fixtures") {
    const auto d = make_domain(DomainShape::disk(1.0), 256, 256);
    PlanarField one(d), id(d);
    for (int n : d->domain_nodes()) {
      one.values[n] = {1.0, 0.0};
      id.values[n] = d->position(n);
    }
    CHECK(gl_energy(one, 0.1) == 0.0);
    const double exact = kPi + kPi / 12.0;
    CHECK(std::abs(gl_energy(id, 1.0) - exact) / exact < 0.01);
  }

  TEST_CASE("GL coupling bound fixtures") {
    const auto d = make_domain(DomainShape::disk(1.0), 32, 32);
    const Grid3D g(d, 5);
    const ScalingParams p(0.2, 0.1);
    DirectorField U(g);
    for (int k = 0; k < 5; ++k) {
      for (int n : d->domain_nodes()) {
        const Vec2 x = d->position(n);
        U.at(n, k) = {std::cos(x.x + x.y), std::sin(x.x + x.y), 0.0};
      }
    }
    const GlBoundReport r = check_gl_bound(U, p);
    CHECK(r.holds);
    CHECK(r.lhs == doctest::Approx(energy_full(U, p).bulk_horizontal).epsilon(1e-12));

    const GlBoundReport v = check_gl_bound(constant_field(g, {0, 0, 1}), p);
    CHECK(v.lhs == doctest::Approx(d->area() / (4 * 0.04)));
    CHECK(v.rhs == doctest::Approx(d->area() / 0.04));
    CHECK(v.holds);
  }

  TEST_CASE("averaging bound fixtures") {
    const auto d = make_domain(DomainShape::disk(1.0), 32, 32);
    const Grid3D g(d, 17);
    const AverageBoundReport flat = check_average_bound(constant_field(g, {1, 0, 0}));
    CHECK(flat.rhs == 0.0);
    CHECK(flat.holds);
    DirectorField U(g);
    const double alpha = kPi / 4;
    for (int k = 0; k < 17; ++k) {
      const double z = k * g.hz();
      for (int n : d->domain_nodes()) U.at(n, k) = {std::cos(alpha * z), std::sin(alpha * z), 0.0};
    }
    const AverageBoundReport r = check_average_bound(U);
    CHECK(r.holds);
    CHECK(r.max_ratio < 1.0 / std::sqrt(2.0));
  }

  TEST_CASE("sign flip, Jensen and non-negativity") {
    const auto d = make_domain(DomainShape::disk(1.0), 32, 32);
    const Grid3D g(d, 6);
    const DirectorField U = wavy_field(g, 0.7);
    const ScalingParams p(0.15, 0.1);
    const EnergyBreakdown a = energy_full(U, p);
    CHECK(a.total == energy_full(mirrored(U), p).total);
    CHECK(planar_dirichlet(U) >= planar_dirichlet(vertical_average(U)) - 1e-12);
    CHECK(a.bulk_horizontal >= 0.0);
    CHECK(a.bulk_vertical >= 0.0);
    CHECK(a.anchoring >= 0.0);
  }

  TEST_CASE("quarter turn of a rectangle") {
    const auto wide = make_domain(DomainShape::rectangle(2.0, 1.0), 64, 32);
    const auto tall = make_domain(DomainShape::rectangle(1.0, 2.0), 32, 64);
    const Grid3D gw(wide, 4), gt(tall, 4);
    const DirectorField U = wavy_field(gw, 0.4);
    DirectorField V(gt);
    for (int k = 0; k < 4; ++k) {
      for (int jp = 0; jp <= 64; ++jp) {
        for (int ip = 0; ip <= 32; ++ip) {
          const Vec3 u = U.at(wide->node(jp, 32 - ip), k);
          V.at(tall->node(ip, jp), k) = {-u.y, u.x, u.z};
        }
      }
    }
    const ScalingParams p(0.2, 0.1);
    CHECK(energy_full(V, p).total == doctest::Approx(energy_full(U, p).total).epsilon(1e-13));
  }

  TEST_CASE("gradient matches energy") {
    const auto d = make_domain(DomainShape::disk(1.0), 16, 16);
    const Grid3D g(d, 4);
    const DirectorField U = wavy_field(g, 0.5);
    const ScalingParams p(0.3, 0.2);
    std::vector<Vec3> grad;
    const EnergyBreakdown e = energy_and_gradient(U, p, grad);
    CHECK(e.total == doctest::Approx(energy_full(U, p).total).epsilon(1e-14));
    const int id = g.node(d->interior_nodes()[5], 2);
    DirectorField P = U, M = U;
    const double t = 1e-6;
    P.values[id].x += t;
    M.values[id].x -= t;
    const double fd = (energy_full(P, p).total - energy_full(M, p).total) / (2 * t);
    CHECK(fd == doctest::Approx(grad[id].x).epsilon(1e-6));
  }
}
