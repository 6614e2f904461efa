#include "thinslab/energy.hpp"

#include <algorithm>
#include <cmath>

#include "thinslab/error.hpp"

namespace thinslab {

namespace {

void check_shape(const DirectorField& U) {
  if (static_cast<int>(U.values.size()) != U.grid.node_count()) {
    throw ShapeError("director field has " + std::to_string(U.values.size()) +
                     " values, grid expects " + std::to_string(U.grid.node_count()));
  }
}

void check_shape(const PlanarField& u) {
  if (!u.domain || static_cast<int>(u.values.size()) != u.domain->node_count()) {
    throw ShapeError("planar field does not match its domain");
  }
}

void finish(EnergyBreakdown& e) { e.total = e.bulk_horizontal + e.bulk_vertical + e.anchoring; }

}  // namespace

EnergyBreakdown energy_full(const DirectorField& U, const ScalingParams& p) {
  check_shape(U);
  const Grid3D& g = U.grid;
  const Domain2D& d = g.base();
  const int ls = g.layer_size();
  const int nz = g.n_layers();
  EnergyBreakdown e;

  for (int k = 0; k < nz; ++k) {
    const double w = g.layer_weight(k);
    const Vec3* layer = U.values.data() + static_cast<std::size_t>(ls) * k;
    double s = 0.0;
    for (const Edge& edge : d.edges()) s += edge.weight * norm2(layer[edge.q] - layer[edge.p]);
    e.bulk_horizontal += w * s;
  }

  const double cv = 1.0 / (2.0 * p.eta() * p.eta() * g.hz());
  const double ca = 1.0 / (2.0 * p.eps() * p.eps());
  for (int n : d.domain_nodes()) {
    const double a = d.dual_area(n);
    double s = 0.0;
    for (int k = 0; k + 1 < nz; ++k) s += norm2(U.at(n, k + 1) - U.at(n, k));
    e.bulk_vertical += cv * a * s;
    const double bot = U.at(n, 0).z;
    const double top = U.at(n, nz - 1).z;
    e.anchoring += ca * a * (bot * bot + top * top);
  }
  finish(e);
  return e;
}

EnergyBreakdown energy_restricted(const DirectorField& U, const ScalingParams& p,
                                  std::span<const int> nodes) {
  check_shape(U);
  const Grid3D& g = U.grid;
  const Domain2D& d = g.base();
  const int nz = g.n_layers();
  std::vector<std::uint8_t> member(d.node_count(), 0);
  for (int n : nodes) {
    if (n < 0 || n >= d.node_count() || !d.in_domain(n)) {
      throw ShapeError("energy_restricted: node " + std::to_string(n) + " is not in the domain");
    }
    member[n] = 1;
  }
  EnergyBreakdown e;
  if (nodes.empty()) return e;

  for (int k = 0; k < nz; ++k) {
    const double w = g.layer_weight(k);
    double s = 0.0;
    for (const Edge& edge : d.edges()) {
      const int share = member[edge.p] + member[edge.q];
      if (share == 0) continue;
      s += 0.5 * share * edge.weight * norm2(U.at(edge.q, k) - U.at(edge.p, k));
    }
    e.bulk_horizontal += w * s;
  }

  const double cv = 1.0 / (2.0 * p.eta() * p.eta() * g.hz());
  const double ca = 1.0 / (2.0 * p.eps() * p.eps());
  for (int n : d.domain_nodes()) {
    if (!member[n]) continue;
    const double a = d.dual_area(n);
    double s = 0.0;
    for (int k = 0; k + 1 < nz; ++k) s += norm2(U.at(n, k + 1) - U.at(n, k));
    e.bulk_vertical += cv * a * s;
    const double bot = U.at(n, 0).z;
    const double top = U.at(n, nz - 1).z;
    e.anchoring += ca * a * (bot * bot + top * top);
  }
  finish(e);
  return e;
}

EnergyBreakdown energy_and_gradient(const DirectorField& U, const ScalingParams& p,
                                    std::vector<Vec3>& grad) {
  check_shape(U);
  const Grid3D& g = U.grid;
  const Domain2D& d = g.base();
  const int ls = g.layer_size();
  const int nz = g.n_layers();
  grad.assign(U.values.size(), Vec3{});
  EnergyBreakdown e;

  for (int k = 0; k < nz; ++k) {
    const double w = g.layer_weight(k);
    const std::size_t off = static_cast<std::size_t>(ls) * k;
    const Vec3* layer = U.values.data() + off;
    Vec3* gl = grad.data() + off;
    double s = 0.0;
    for (const Edge& edge : d.edges()) {
      const Vec3 diff = layer[edge.q] - layer[edge.p];
      s += edge.weight * norm2(diff);
      const Vec3 f = (2.0 * w * edge.weight) * diff;
      gl[edge.q] += f;
      gl[edge.p] -= f;
    }
    e.bulk_horizontal += w * s;
  }

  const double cv = 1.0 / (2.0 * p.eta() * p.eta() * g.hz());
  const double ca = 1.0 / (2.0 * p.eps() * p.eps());
  for (int n : d.domain_nodes()) {
    const double a = d.dual_area(n);
    double s = 0.0;
    for (int k = 0; k + 1 < nz; ++k) {
      const Vec3 diff = U.at(n, k + 1) - U.at(n, k);
      s += norm2(diff);
      const Vec3 f = (2.0 * cv * a) * diff;
      grad[g.node(n, k + 1)] += f;
      grad[g.node(n, k)] -= f;
    }
    e.bulk_vertical += cv * a * s;
    const double bot = U.at(n, 0).z;
    const double top = U.at(n, nz - 1).z;
    e.anchoring += ca * a * (bot * bot + top * top);
    grad[g.node(n, 0)].z += 2.0 * ca * a * bot;
    grad[g.node(n, nz - 1)].z += 2.0 * ca * a * top;
  }
  finish(e);
  return e;
}

PlanarField vertical_average(const DirectorField& U) {
  check_shape(U);
  const Grid3D& g = U.grid;
  PlanarField out(g.base_ptr());
  for (int n : g.base().domain_nodes()) {
    Vec2 s;
    for (int k = 0; k < g.n_layers(); ++k) s += g.layer_weight(k) * planar(U.at(n, k));
    out.values[n] = s;
  }
  return out;
}

double planar_dirichlet(const PlanarField& u) {
  check_shape(u);
  double s = 0.0;
  for (const Edge& e : u.domain->edges()) s += e.weight * norm2(u.values[e.q] - u.values[e.p]);
  return s;
}

double planar_dirichlet(const DirectorField& U) {
  check_shape(U);
  const Grid3D& g = U.grid;
  double total = 0.0;
  for (int k = 0; k < g.n_layers(); ++k) {
    double s = 0.0;
    for (const Edge& e : g.base().edges()) {
      s += e.weight * norm2(planar(U.at(e.q, k)) - planar(U.at(e.p, k)));
    }
    total += g.layer_weight(k) * s;
  }
  return total;
}

double vertical_gradient_norm2(const DirectorField& U) {
  check_shape(U);
  const Grid3D& g = U.grid;
  double total = 0.0;
  for (int n : g.base().domain_nodes()) {
    double s = 0.0;
    for (int k = 0; k + 1 < g.n_layers(); ++k) s += norm2(U.at(n, k + 1) - U.at(n, k));
    total += g.base().dual_area(n) * s;
  }
  return total / g.hz();
}

double gl_energy(const PlanarField& u, double eps) {
  check_shape(u);
  if (!(eps > 0.0)) throw InvalidParameter("gl_energy: eps must be positive");
  double pot = 0.0;
  for (int n : u.domain->domain_nodes()) {
    const double m = 1.0 - norm2(u.values[n]);
    pot += u.domain->dual_area(n) * m * m;
  }
  return planar_dirichlet(u) + pot / (4.0 * eps * eps);
}

double gl_energy_and_gradient(const PlanarField& u, double eps, std::vector<Vec2>& grad) {
  check_shape(u);
  if (!(eps > 0.0)) throw InvalidParameter("gl_energy: eps must be positive");
  const Domain2D& d = *u.domain;
  grad.assign(u.values.size(), Vec2{});
  double dir = 0.0;
  for (const Edge& e : d.edges()) {
    const Vec2 diff = u.values[e.q] - u.values[e.p];
    dir += e.weight * norm2(diff);
    const Vec2 f = (2.0 * e.weight) * diff;
    grad[e.q] += f;
    grad[e.p] -= f;
  }
  const double c = 1.0 / (4.0 * eps * eps);
  double pot = 0.0;
  for (int n : d.domain_nodes()) {
    const double a = d.dual_area(n);
    const double m = 1.0 - norm2(u.values[n]);
    pot += a * m * m;
    grad[n] += (-4.0 * c * a * m) * u.values[n];
  }
  return dir + c * pot;
}

double Slack::of(double rhs) const { return rel * std::abs(rhs) + abs; }

Slack default_slack(const Domain2D& domain) {
  const double h = domain.h_max();
  return Slack{1e-6, 1e-3 * h * h};
}

GlBoundReport check_gl_bound(const DirectorField& U, const ScalingParams& p,
                             std::optional<double> c_star) {
  GlBoundReport r;
  r.lhs = gl_energy(vertical_average(U), p.eps());
  const double f = energy_full(U, p).total;
  r.factor = p.bbh_regime() ? 1.0 : std::max(1.0, 2.0 * p.eta() * p.eta() / (p.eps() * p.eps()));
  r.rhs = r.factor * f;
  r.slack = default_slack(U.domain());
  r.holds = r.lhs <= r.rhs + r.slack.of(r.rhs);
  if (c_star) {
    const double c = *c_star;
    if (!(c >= 0.0 && c < 1.0)) throw InvalidParameter("check_gl_bound: c* must lie in [0, 1)");
    if (2.0 * p.eta() * p.eta() <= (1.0 - c) * p.eps() * p.eps()) {
      r.strict_lhs = r.lhs + c / (2.0 * p.eta() * p.eta()) * vertical_gradient_norm2(U);
      r.strict_holds = *r.strict_lhs <= f + r.slack.of(f);
    }
  }
  return r;
}

AverageBoundReport check_average_bound(const DirectorField& U) {
  check_shape(U);
  const Grid3D& g = U.grid;
  const Domain2D& d = g.base();
  const PlanarField ubar = vertical_average(U);
  AverageBoundReport r;
  r.layer_distance.assign(g.n_layers(), 0.0);
  for (int k = 0; k < g.n_layers(); ++k) {
    double s = 0.0;
    for (int n : d.domain_nodes()) s += d.dual_area(n) * norm2(ubar.values[n] - planar(U.at(n, k)));
    r.layer_distance[k] = std::sqrt(s);
  }
  const double d3 = std::sqrt(vertical_gradient_norm2(U));
  r.rhs = d3 / std::sqrt(2.0);
  r.slack = default_slack(d);
  const double worst = *std::max_element(r.layer_distance.begin(), r.layer_distance.end());
  r.max_ratio = d3 > 0.0 ? worst / d3 : 0.0;
  r.holds = worst <= r.rhs + r.slack.of(r.rhs);
  return r;
}

}  // namespace thinslab
