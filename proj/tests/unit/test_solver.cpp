#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "thinslab/solver.hpp"
#include "thinslab/vortex.hpp"

using namespace thinslab;

namespace {

struct Fixture {
  DomainPtr dom = make_domain(DomainShape::disk(1.0), 48, 48);
  Grid3D grid{dom, 5};
  BoundaryDatum g = power_law_datum(dom, 1);
  ScalingParams p{0.15, 0.1};
};

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("options are validated") {
    SolveOptions o;
    o.max_iters = 0;
    CHECK_THROWS_AS(o.validate(), InvalidParameter);
    o = {};
    o.step_shrink = 1.0;
    CHECK_THROWS_AS(o.validate(), InvalidParameter);
  }

  TEST_CASE("GL minimizer with constant data is constant") {
    const auto dom = make_domain(DomainShape::disk(1.0), 32, 32);
    const BoundaryDatum g = constant_datum(dom);
    auto [u, rep] = minimize_gl(initial_planar(dom, g, 3), g, 0.1, SolveOptions{});
    CHECK(rep.converged);
    CHECK(rep.final_energy.total < 1e-8);
    for (int n : dom->domain_nodes()) CHECK(norm(u.values[n] - Vec2{1.0, 0.0}) < 1e-4);
  }

  TEST_CASE("GL minimizer for degree one has one zero near the center") {
    const auto dom = make_domain(DomainShape::disk(1.0), 64, 64);
    const BoundaryDatum g = power_law_datum(dom, 1);
    auto [u, rep] = minimize_gl(initial_planar(dom, g, 3), g, 0.1, SolveOptions{});
    CHECK(rep.converged);
    const DefectSet ds = locate_defects(u);
    REQUIRE(ds.size() == 1);
    CHECK(norm(ds.items[0].position) < 2 * dom->h_max());
  }

  TEST_CASE("full minimizer: residual, monotone trace, constant sign, GL comparison") {
    Fixture f;
    SolveOptions o;
    auto [U, rep] = minimize_full(initial_director(f.grid, f.g, 1), f.g, f.p, o);
    CHECK(rep.converged);
    CHECK(rep.residual <= o.tol_residual);
    CHECK(el_residual(U, f.p) == doctest::Approx(rep.residual).epsilon(1e-12));
    for (std::size_t i = 1; i < rep.energy_trace.size(); ++i) {
      CHECK(rep.energy_trace[i] <= rep.energy_trace[i - 1] + 1e-12 * std::abs(rep.energy_trace[i - 1]));
    }
    double lo = 1.0, hi = -1.0;
    DirectorField S = U;
    for (auto& v : S.values) {
      lo = std::min(lo, v.z);
      hi = std::max(hi, v.z);
      v.z = std::abs(v.z);
    }
    CHECK((lo >= -1e-8 || hi <= 1e-8));
    CHECK(energy_full(S, f.p).total == doctest::Approx(rep.final_energy.total).epsilon(1e-10));

    const double eps = f.p.eps();
    auto [u, grep] = minimize_gl(initial_planar(f.dom, f.g, 1), f.g, eps, o);
    CHECK(gl_energy(u, eps) <= gl_energy(vertical_average(U), eps) + 1e-6);
  }

  TEST_CASE("conjugate datum with mirrored start gives the same trace") {
    Fixture f;
    const DirectorField init = initial_director(f.grid, f.g, 2);
    SolveOptions o;
    o.max_iters = 30;
    auto [U, a] = minimize_full(init, f.g, f.p, o);
    auto [V, b] = minimize_full(mirrored(init), conjugate(f.g), f.p, o);
    REQUIRE(a.energy_trace.size() == b.energy_trace.size());
    for (std::size_t i = 0; i < a.energy_trace.size(); ++i) {
      CHECK(a.energy_trace[i] == doctest::Approx(b.energy_trace[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("iteration limit reports non-convergence") {
    Fixture f;
    SolveOptions o;
    o.max_iters = 1;
    auto [U, rep] = minimize_full(initial_director(f.grid, f.g, 1), f.g, f.p, o);
    CHECK_FALSE(rep.converged);
    CHECK(rep.iterations == 1);
  }

  TEST_CASE("residual of trivial critical points") {
    Fixture f;
    DirectorField one(f.grid), up(f.grid);
    for (auto& v : up.values) v = {0, 0, 1};
    CHECK(el_residual(one, f.p) == 0.0);
    CHECK(el_residual(up, f.p) == doctest::Approx(0.0));
  }

  TEST_CASE("gradient check") {
    Fixture f;
    std::mt19937_64 rng(8);
    std::normal_distribution<double> nd;
    DirectorField U = initial_director(f.grid, f.g, 5, 0.3);
    for (int k = 0; k < f.grid.n_layers(); ++k) {
      for (int n : f.dom->interior_nodes()) {
        Vec3& v = U.at(n, k);
        v.z += 0.3 * std::sin(3 * f.dom->position(n).x + k);
        v = v * (1.0 / norm(v));
      }
    }
    const std::vector<double> steps{1e-2, 1e-3, 1e-4};
    std::vector<Vec3> zero(U.values.size());
    const GradientCheckReport z = gradient_check(U, f.p, zero, steps);
    CHECK(z.derivative == 0.0);
    for (double fd : z.finite_difference) CHECK(fd == 0.0);

    std::vector<Vec3> phi(U.values.size());
    for (int k = 0; k < f.grid.n_layers(); ++k) {
      for (int n : f.dom->interior_nodes()) {
        const int id = f.grid.node(n, k);
        phi[id] = tangent_part(Vec3{nd(rng), nd(rng), nd(rng)}, U.values[id]);
      }
    }
    const GradientCheckReport r = gradient_check(U, f.p, phi, steps);
    CHECK(r.observed_order > 1.95);

    std::vector<Vec3> bad = phi;
    const int id = f.grid.node(f.dom->interior_nodes()[0], 1);
    bad[id] = U.values[id];
    CHECK_THROWS_AS(gradient_check(U, f.p, bad, steps), InvalidPerturbation);
  }

  TEST_CASE("first variation vanishes at a critical point up to the residual") {
    Fixture f;
    SolveOptions o;
    o.tol_residual = 1e-6;
    auto [U, rep] = minimize_full(initial_director(f.grid, f.g, 1), f.g, f.p, o);
    REQUIRE(rep.converged);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    std::vector<Vec3> phi(U.values.size());
    double mass_norm = 0.0;
    for (int k = 0; k < f.grid.n_layers(); ++k) {
      for (int n : f.dom->interior_nodes()) {
        const int id = f.grid.node(n, k);
        phi[id] = tangent_part(Vec3{nd(rng), nd(rng), nd(rng)}, U.values[id]);
        mass_norm += f.dom->dual_area(n) * f.grid.layer_weight(k) * norm2(phi[id]);
      }
    }
    const std::vector<double> steps{1e-3};
    const GradientCheckReport r = gradient_check(U, f.p, phi, steps);
    CHECK(std::abs(r.derivative) <= rep.residual * std::sqrt(mass_norm) + 1e-12);
  }
}
