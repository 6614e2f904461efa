#include "thinslab/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>

namespace thinslab {

void SolveOptions::validate() const {
  if (max_iters < 1) throw InvalidParameter("solve.max_iters must be >= 1");
  if (!(tol_residual > 0.0)) throw InvalidParameter("solve.tol_residual must be positive");
  if (!(step_init > 0.0)) throw InvalidParameter("solve.step_init must be positive");
  if (!(step_shrink > 0.0 && step_shrink < 1.0)) {
    throw InvalidParameter("solve.step_shrink must lie in (0, 1)");
  }
  if (!(init_noise >= 0.0)) throw InvalidParameter("solve.init_noise must be non-negative");
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Factor = Eigen::SimplicialLDLT<SpMat>;

constexpr double kArmijo = 1e-4;
constexpr double kDecreaseSlack = 1e-14;
constexpr double kNormFloor = 1e-15;
constexpr int kMaxBacktracks = 60;
constexpr int kMaxExpansions = 8;
constexpr double kMaxGrowth = 8.0;

std::vector<int> free_nodes_2d(const Domain2D& d) {
  return {d.interior_nodes().begin(), d.interior_nodes().end()};
}

// Stiffness 2 L_c of the edge form restricted to free nodes; edges to
// fixed nodes only contribute to the diagonal.
SpMat planar_stiffness(const Domain2D& d, const std::vector<int>& index, int n_free) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(d.edges().size() * 4);
  for (const Edge& e : d.edges()) {
    const int a = index[e.p];
    const int b = index[e.q];
    const double w = 2.0 * e.weight;
    if (a >= 0) trip.emplace_back(a, a, w);
    if (b >= 0) trip.emplace_back(b, b, w);
    if (a >= 0 && b >= 0) {
      trip.emplace_back(a, b, -w);
      trip.emplace_back(b, a, -w);
    }
  }
  SpMat K(n_free, n_free);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

std::vector<int> index_of(const Domain2D& d, const std::vector<int>& free2d) {
  std::vector<int> index(d.node_count(), -1);
  for (std::size_t i = 0; i < free2d.size(); ++i) index[free2d[i]] = static_cast<int>(i);
  return index;
}

template <class V>
double dot_all(const std::vector<V>& a, const std::vector<V>& b, const std::vector<int>& nodes) {
  double s = 0.0;
  for (int n : nodes) s += dot(a[n], b[n]);
  return s;
}

// Generic projected nonlinear CG. `values` live on all nodes; only
// `free_nodes` move.
template <class V>
struct Problem {
  std::function<double(const std::vector<V>&, std::vector<V>&)> energy_grad;
  std::function<double(const std::vector<V>&)> energy;
  std::function<void(const std::vector<V>&, std::vector<V>&)> project;  // in place, tangent
  std::function<bool(const std::vector<V>&, const std::vector<V>&, double, std::vector<V>&)> retract;
  std::function<void(const std::vector<V>&, std::vector<V>&)> precondition;
  std::vector<int> free_nodes;
  std::vector<double> mass;  // per node, used by the residual
  double step_unit = 1.0;
};

template <class V>
double residual_of(const std::vector<V>& g, const Problem<V>& pb) {
  double s = 0.0;
  for (int n : pb.free_nodes) s += norm2(g[n]) / pb.mass[n];
  return std::sqrt(s);
}

template <class V>
SolveReport run_ncg(std::vector<V>& x, const Problem<V>& pb, const SolveOptions& opts,
                    const char* label) {
  SolveReport rep;
  std::vector<V> g(x.size()), s(x.size()), dir(x.size()), trial(x.size()), g_new(x.size()),
      s_new(x.size()), spare(x.size());
  double E = pb.energy_grad(x, g);
  if (!std::isfinite(E)) throw Diverged(std::string(label) + ": non-finite initial energy");
  pb.project(x, g);
  pb.precondition(g, s);
  pb.project(x, s);
  for (int n : pb.free_nodes) dir[n] = -s[n];
  double gs = dot_all(g, s, pb.free_nodes);
  rep.energy_trace.push_back(E);
  double res = residual_of(g, pb);
  double t_prev = opts.step_init * pb.step_unit;
  double slope_prev = 0.0;
  bool steepest = true;

  auto fail = [&](const std::string& why) {
    rep.residual = res;
    throw NoProgress(std::string(label) + ": " + why, rep, {});
  };

  int it = 0;
  for (; it < opts.max_iters; ++it) {
    if (res <= opts.tol_residual) break;
    double slope = dot_all(g, dir, pb.free_nodes);
    if (!(slope < 0.0)) {
      for (int n : pb.free_nodes) dir[n] = -s[n];
      slope = -gs;
      steepest = true;
      ++rep.restarts;
    }
    double t = it == 0 ? t_prev : std::max(t_prev * slope_prev / slope, 1e-3 * pb.step_unit);
    const double slack = kDecreaseSlack * std::max(1.0, std::abs(E));
    bool accepted = false;
    double E_t = 0.0;
    for (int b = 0; b < kMaxBacktracks; ++b) {
      if (!pb.retract(x, dir, t, trial)) fail("projection hit the norm floor");
      E_t = pb.energy(trial);
      if (std::isfinite(E_t) && E_t <= E + kArmijo * t * slope + slack && E_t <= E + slack) {
        accepted = true;
        break;
      }
      double t_next = opts.step_shrink * t;
      if (std::isfinite(E_t)) {
        const double curv = E_t - E - slope * t;
        if (curv > 0.0) t_next = std::clamp(-slope * t * t / (2.0 * curv), 0.1 * t, opts.step_shrink * t);
      }
      t = t_next;
    }
    // Extrapolate while the quadratic model puts the line minimum well
    // beyond the accepted step and the energy keeps dropping.
    for (int grow = 0; accepted && grow < kMaxExpansions; ++grow) {
      const double curv = E_t - E - slope * t;
      const double t_model = curv > 0.0 ? -slope * t * t / (2.0 * curv) : kMaxGrowth * t;
      if (!(t_model > 1.5 * t)) break;
      const double t_try = std::min(t_model, kMaxGrowth * t);
      if (!pb.retract(x, dir, t_try, spare)) break;
      const double E_try = pb.energy(spare);
      if (!(std::isfinite(E_try) && E_try < E_t)) break;
      t = t_try;
      E_t = E_try;
      trial.swap(spare);
    }
    if (!accepted) {
      if (!steepest) {
        for (int n : pb.free_nodes) dir[n] = -s[n];
        steepest = true;
        ++rep.restarts;
        --it;
        t_prev = opts.step_init * pb.step_unit;
        slope_prev = -gs;
        continue;
      }
      fail("line search failed at residual " + std::to_string(res));
    }
    x.swap(trial);
    const double E_new = pb.energy_grad(x, g_new);
    pb.project(x, g_new);
    pb.precondition(g_new, s_new);
    pb.project(x, s_new);
    const double gs_new = dot_all(g_new, s_new, pb.free_nodes);
    const double beta = std::max(0.0, (gs_new - dot_all(g_new, s, pb.free_nodes)) / gs);
    pb.project(x, dir);
    for (int n : pb.free_nodes) dir[n] = beta * dir[n] - s_new[n];
    steepest = beta == 0.0;
    g.swap(g_new);
    s.swap(s_new);
    gs = gs_new;
    E = E_new;
    t_prev = t;
    slope_prev = slope;
    res = residual_of(g, pb);
    rep.energy_trace.push_back(E);
    if (opts.progress_every > 0 && (it + 1) % opts.progress_every == 0) {
      std::fprintf(stderr, "%s iter %d  energy %.12g  residual %.3e  step %.3e\n", label, it + 1, E,
                   res, t);
    }
  }
  rep.iterations = it;
  rep.residual = res;
  rep.converged = res <= opts.tol_residual;
  return rep;
}

void fill_mass_3d(const Grid3D& grid, std::vector<double>& mass) {
  mass.assign(grid.node_count(), 1.0);
  for (int k = 0; k < grid.n_layers(); ++k) {
    for (int n : grid.base().domain_nodes()) {
      mass[grid.node(n, k)] = grid.base().dual_area(n) * grid.layer_weight(k);
    }
  }
}

std::vector<int> free_nodes_3d(const Grid3D& grid) {
  std::vector<int> out;
  out.reserve(grid.base().interior_nodes().size() * grid.n_layers());
  for (int k = 0; k < grid.n_layers(); ++k) {
    for (int n : grid.base().interior_nodes()) out.push_back(grid.node(n, k));
  }
  return out;
}

void project_tangent(const std::vector<Vec3>& U, std::vector<Vec3>& v,
                     const std::vector<std::uint8_t>& is_free) {
  for (std::size_t n = 0; n < v.size(); ++n) {
    v[n] = is_free[n] ? tangent_part(v[n], U[n]) : Vec3{};
  }
}

double explicit_step_bound(const Grid3D& grid, const ScalingParams& p) {
  const double h = grid.base().h_max();
  const double hz = grid.hz();
  return 0.5 * std::min({h * h, hz * hz * p.eta() * p.eta(), p.eps() * p.eps() * hz});
}

std::complex<double> phase_offset(const BoundaryDatum& g, int d) {
  const Domain2D& dom = *g.domain;
  std::complex<double> acc = 0.0;
  for (int n : dom.outer_loop().nodes) {
    const Vec2 x = dom.position(n) - dom.centroid();
    const double th = d * std::atan2(x.y, x.x);
    acc += std::complex<double>(g.at(n).x, g.at(n).y) * std::polar(1.0, -th);
  }
  return acc;
}

Vec3 vortex_value(Vec2 x, int d, double alpha, double blend_radius) {
  if (d == 0) return {std::cos(alpha), std::sin(alpha), 0.0};
  const double r = norm(x);
  const double th = d * std::atan2(x.y, x.x) + alpha;
  if (r >= blend_radius) return {std::cos(th), std::sin(th), 0.0};
  const double m = r / blend_radius;
  Vec3 v{m * std::cos(th), m * std::sin(th), 1.0 - m};
  return v * (1.0 / norm(v));
}

}  // namespace

// ---------------------------------------------------------------------------
// preconditioner

struct SlabPreconditioner::Impl {
  const Grid3D* grid = nullptr;
  std::vector<int> free2d;
  int nz = 0;
  // vertical eigenvectors (columns, W-orthonormal) for planar and normal components
  Eigen::MatrixXd v_planar;
  Eigen::MatrixXd v_normal;
  std::vector<std::unique_ptr<Factor>> f_planar;
  std::vector<std::unique_ptr<Factor>> f_normal;

  void solve(int comp, std::span<const Vec3> r, std::vector<Vec3>& out) const {
    const Eigen::MatrixXd& V = comp == 2 ? v_normal : v_planar;
    const auto& fac = comp == 2 ? f_normal : f_planar;
    const int nf = static_cast<int>(free2d.size());
    Eigen::MatrixXd R(nf, nz);
    for (int k = 0; k < nz; ++k) {
      for (int i = 0; i < nf; ++i) {
        const Vec3& v = r[grid->node(free2d[i], k)];
        R(i, k) = comp == 0 ? v.x : (comp == 1 ? v.y : v.z);
      }
    }
    Eigen::MatrixXd Rh = R * V;
    for (int m = 0; m < nz; ++m) Rh.col(m) = fac[m]->solve(Rh.col(m));
    Eigen::MatrixXd S = Rh * V.transpose();
    for (int k = 0; k < nz; ++k) {
      for (int i = 0; i < nf; ++i) {
        Vec3& o = out[grid->node(free2d[i], k)];
        (comp == 0 ? o.x : (comp == 1 ? o.y : o.z)) = S(i, k);
      }
    }
  }
};

SlabPreconditioner::SlabPreconditioner(const Grid3D& grid, const ScalingParams& p)
    : impl_(std::make_unique<Impl>()) {
  Impl& im = *impl_;
  im.grid = &grid;
  const Domain2D& d = grid.base();
  im.free2d = free_nodes_2d(d);
  im.nz = grid.n_layers();
  const int nf = static_cast<int>(im.free2d.size());
  const std::vector<int> index = index_of(d, im.free2d);
  const SpMat K = planar_stiffness(d, index, nf);
  SpMat M(nf, nf);
  {
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < nf; ++i) trip.emplace_back(i, i, d.dual_area(im.free2d[i]));
    M.setFromTriplets(trip.begin(), trip.end());
  }
  const int nz = im.nz;
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(nz, nz);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nz, nz);
  const double cv = 1.0 / (p.eta() * p.eta() * grid.hz());
  for (int k = 0; k < nz; ++k) W(k, k) = grid.layer_weight(k);
  for (int k = 0; k + 1 < nz; ++k) {
    B(k, k) += cv;
    B(k + 1, k + 1) += cv;
    B(k, k + 1) -= cv;
    B(k + 1, k) -= cv;
  }
  Eigen::MatrixXd Bz = B;
  Bz(0, 0) += 1.0 / (p.eps() * p.eps());
  Bz(nz - 1, nz - 1) += 1.0 / (p.eps() * p.eps());

  auto build = [&](const Eigen::MatrixXd& Bm, Eigen::MatrixXd& V,
                   std::vector<std::unique_ptr<Factor>>& fac) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Bm, W);
    V = es.eigenvectors();
    fac.clear();
    for (int m = 0; m < nz; ++m) {
      const double mu = std::max(0.0, es.eigenvalues()(m));
      SpMat A = K + mu * M;
      auto f = std::make_unique<Factor>(A);
      if (f->info() != Eigen::Success) throw Diverged("preconditioner factorization failed");
      fac.push_back(std::move(f));
    }
  };
  build(B, im.v_planar, im.f_planar);
  build(Bz, im.v_normal, im.f_normal);
}

SlabPreconditioner::~SlabPreconditioner() = default;

void SlabPreconditioner::apply(std::span<const Vec3> r, std::vector<Vec3>& out) const {
  out.assign(r.size(), Vec3{});
  for (int c = 0; c < 3; ++c) impl_->solve(c, r, out);
}

// ---------------------------------------------------------------------------
// initial fields

DirectorField initial_director(const Grid3D& grid, const BoundaryDatum& g, std::uint64_t seed,
                               double noise) {
  const Domain2D& dom = grid.base();
  if (g.domain->node_count() != dom.node_count()) throw ShapeError("datum does not match grid");
  const int d = datum_degree(g);
  const double alpha = std::arg(phase_offset(g, d));
  const double blend = 2.0 * dom.h_max();
  DirectorField U(grid);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int n : dom.domain_nodes()) {
    const Vec3 base = vortex_value(dom.position(n) - dom.centroid(), d, alpha, blend);
    for (int k = 0; k < grid.n_layers(); ++k) U.at(n, k) = base;
  }
  if (noise > 0.0) {
    for (int k = 0; k < grid.n_layers(); ++k) {
      for (int n : dom.interior_nodes()) {
        Vec3& v = U.at(n, k);
        v.x += noise * normal(rng);
        v.y += noise * normal(rng);
        v = v * (1.0 / norm(v));
      }
    }
  }
  apply_lateral_datum(U, g);
  return U;
}

PlanarField initial_planar(const DomainPtr& domain, const BoundaryDatum& g, std::uint64_t seed,
                           double noise) {
  if (g.domain->node_count() != domain->node_count()) throw ShapeError("datum does not match grid");
  const int d = datum_degree(g);
  const double alpha = std::arg(phase_offset(g, d));
  const double blend = 2.0 * domain->h_max();
  PlanarField u(domain);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int n : domain->domain_nodes()) {
    u.values[n] = planar(vortex_value(domain->position(n) - domain->centroid(), d, alpha, blend));
  }
  if (noise > 0.0) {
    for (int n : domain->interior_nodes()) {
      u.values[n].x += noise * normal(rng);
      u.values[n].y += noise * normal(rng);
    }
  }
  for (int n : domain->boundary_nodes()) u.values[n] = g.at(n);
  return u;
}

// ---------------------------------------------------------------------------
// minimization

std::pair<DirectorField, SolveReport> minimize_full(const DirectorField& init,
                                                    const BoundaryDatum& g,
                                                    const ScalingParams& p,
                                                    const SolveOptions& opts) {
  opts.validate();
  const Grid3D& grid = init.grid;
  DirectorField U = init;
  apply_lateral_datum(U, g);

  Problem<Vec3> pb;
  pb.free_nodes = free_nodes_3d(grid);
  std::vector<std::uint8_t> is_free(grid.node_count(), 0);
  for (int n : pb.free_nodes) is_free[n] = 1;
  fill_mass_3d(grid, pb.mass);

  // Free values must be unit length before the first projection.
  for (int n : pb.free_nodes) {
    const double r = norm(U.values[n]);
    if (!(r > kNormFloor) || !std::isfinite(r)) throw Diverged("minimize_full: degenerate initial field");
    U.values[n] = U.values[n] * (1.0 / r);
  }

  DirectorField work(grid);
  pb.energy_grad = [&](const std::vector<Vec3>& x, std::vector<Vec3>& gr) {
    work.values = x;
    return energy_and_gradient(work, p, gr).total;
  };
  pb.energy = [&](const std::vector<Vec3>& x) {
    work.values = x;
    return energy_full(work, p).total;
  };
  pb.project = [&](const std::vector<Vec3>& x, std::vector<Vec3>& v) { project_tangent(x, v, is_free); };
  pb.retract = [&](const std::vector<Vec3>& x, const std::vector<Vec3>& d, double t,
                   std::vector<Vec3>& out) {
    out = x;
    for (int n : pb.free_nodes) {
      const Vec3 v = x[n] + t * d[n];
      const double r = norm(v);
      if (!(r > kNormFloor)) return false;
      out[n] = v * (1.0 / r);
    }
    return true;
  };
  std::unique_ptr<SlabPreconditioner> pre;
  if (opts.precondition) {
    pre = std::make_unique<SlabPreconditioner>(grid, p);
    pb.precondition = [&](const std::vector<Vec3>& r, std::vector<Vec3>& out) { pre->apply(r, out); };
    pb.step_unit = 1.0;
  } else {
    pb.precondition = [&](const std::vector<Vec3>& r, std::vector<Vec3>& out) {
      out.assign(r.size(), Vec3{});
      for (int n : pb.free_nodes) out[n] = r[n] * (1.0 / pb.mass[n]);
    };
    pb.step_unit = explicit_step_bound(grid, p);
  }

  SolveReport rep;
  try {
    rep = run_ncg(U.values, pb, opts, "minimize_full");
  } catch (const NoProgress& e) {
    SolveReport partial = e.report();
    work.values = U.values;
    partial.final_energy = energy_full(work, p);
    throw NoProgress(e.what(), partial, U.values);
  }
  rep.final_energy = energy_full(U, p);
  return {std::move(U), std::move(rep)};
}

std::pair<PlanarField, SolveReport> minimize_gl(const PlanarField& init, const BoundaryDatum& g,
                                                double eps, const SolveOptions& opts) {
  opts.validate();
  if (!(eps > 0.0)) throw InvalidParameter("minimize_gl: eps must be positive");
  const Domain2D& d = *init.domain;
  PlanarField u = init;
  for (int n : d.boundary_nodes()) u.values[n] = g.at(n);

  Problem<Vec2> pb;
  pb.free_nodes = free_nodes_2d(d);
  std::vector<std::uint8_t> is_free(d.node_count(), 0);
  for (int n : pb.free_nodes) is_free[n] = 1;
  pb.mass.assign(d.node_count(), 1.0);
  for (int n : d.domain_nodes()) pb.mass[n] = d.dual_area(n);

  PlanarField work(init.domain);
  pb.energy_grad = [&](const std::vector<Vec2>& x, std::vector<Vec2>& gr) {
    work.values = x;
    return gl_energy_and_gradient(work, eps, gr);
  };
  pb.energy = [&](const std::vector<Vec2>& x) {
    work.values = x;
    return gl_energy(work, eps);
  };
  pb.project = [&](const std::vector<Vec2>&, std::vector<Vec2>& v) {
    for (std::size_t n = 0; n < v.size(); ++n) {
      if (!is_free[n]) v[n] = Vec2{};
    }
  };
  pb.retract = [&](const std::vector<Vec2>& x, const std::vector<Vec2>& dir, double t,
                   std::vector<Vec2>& out) {
    out = x;
    for (int n : pb.free_nodes) out[n] = x[n] + t * dir[n];
    return true;
  };
  const std::vector<int> index = index_of(d, pb.free_nodes);
  std::unique_ptr<Factor> fac;
  if (opts.precondition) {
    fac = std::make_unique<Factor>(planar_stiffness(d, index, static_cast<int>(pb.free_nodes.size())));
    pb.precondition = [&](const std::vector<Vec2>& r, std::vector<Vec2>& out) {
      const int nf = static_cast<int>(pb.free_nodes.size());
      Eigen::MatrixXd R(nf, 2);
      for (int i = 0; i < nf; ++i) {
        R(i, 0) = r[pb.free_nodes[i]].x;
        R(i, 1) = r[pb.free_nodes[i]].y;
      }
      Eigen::MatrixXd S = fac->solve(R);
      out.assign(r.size(), Vec2{});
      for (int i = 0; i < nf; ++i) out[pb.free_nodes[i]] = {S(i, 0), S(i, 1)};
    };
    pb.step_unit = 1.0;
  } else {
    pb.precondition = [&](const std::vector<Vec2>& r, std::vector<Vec2>& out) {
      out.assign(r.size(), Vec2{});
      for (int n : pb.free_nodes) out[n] = r[n] * (1.0 / pb.mass[n]);
    };
    const double h = d.h_max();
    pb.step_unit = 0.5 * std::min(h * h, eps * eps);
  }
  SolveReport rep = run_ncg(u.values, pb, opts, "minimize_gl");
  const double e = gl_energy(u, eps);
  rep.final_energy = EnergyBreakdown{e, 0.0, 0.0, e};
  return {std::move(u), std::move(rep)};
}

double el_residual(const DirectorField& U, const ScalingParams& p) {
  std::vector<Vec3> g;
  energy_and_gradient(U, p, g);
  const Grid3D& grid = U.grid;
  double s = 0.0;
  for (int k = 0; k < grid.n_layers(); ++k) {
    for (int n : grid.base().interior_nodes()) {
      const int id = grid.node(n, k);
      const double m = grid.base().dual_area(n) * grid.layer_weight(k);
      s += norm2(tangent_part(g[id], U.values[id])) / m;
    }
  }
  return std::sqrt(s);
}

double gl_residual(const PlanarField& u, double eps) {
  std::vector<Vec2> g;
  gl_energy_and_gradient(u, eps, g);
  double s = 0.0;
  for (int n : u.domain->interior_nodes()) s += norm2(g[n]) / u.domain->dual_area(n);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// gradient check

namespace {

struct LVec {
  long double x = 0, y = 0, z = 0;
};

LVec moved(const Vec3& u, const Vec3& phi, long double t) {
  LVec v{u.x + t * phi.x, u.y + t * phi.y, u.z + t * phi.z};
  const long double r = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
  return {v.x / r, v.y / r, v.z / r};
}

// (|a+|^2 - |a-|^2) evaluated as (a+ - a-) . (a+ + a-)
long double sq_diff(const LVec& ap, const LVec& am) {
  return (ap.x - am.x) * (ap.x + am.x) + (ap.y - am.y) * (ap.y + am.y) + (ap.z - am.z) * (ap.z + am.z);
}

LVec sub(const LVec& a, const LVec& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

// F(V(t)) - F(V(-t)), accumulated term by term in extended precision.
long double energy_split(const DirectorField& U, const ScalingParams& p, std::span<const Vec3> phi,
                         long double t) {
  const Grid3D& g = U.grid;
  const Domain2D& d = g.base();
  const int nz = g.n_layers();
  std::vector<LVec> vp(U.values.size()), vm(U.values.size());
  for (int k = 0; k < nz; ++k) {
    for (int n : d.domain_nodes()) {
      const int id = g.node(n, k);
      vp[id] = moved(U.values[id], phi[id], t);
      vm[id] = moved(U.values[id], phi[id], -t);
    }
  }
  long double total = 0;
  for (int k = 0; k < nz; ++k) {
    long double s = 0;
    for (const Edge& e : d.edges()) {
      const int a = g.node(e.p, k);
      const int b = g.node(e.q, k);
      s += e.weight * sq_diff(sub(vp[b], vp[a]), sub(vm[b], vm[a]));
    }
    total += g.layer_weight(k) * s;
  }
  const long double cv = 1.0L / (2.0L * p.eta() * p.eta() * g.hz());
  const long double ca = 1.0L / (2.0L * p.eps() * p.eps());
  for (int n : d.domain_nodes()) {
    long double s = 0;
    for (int k = 0; k + 1 < nz; ++k) {
      const int a = g.node(n, k);
      const int b = g.node(n, k + 1);
      s += sq_diff(sub(vp[b], vp[a]), sub(vm[b], vm[a]));
    }
    const int bot = g.node(n, 0);
    const int top = g.node(n, nz - 1);
    const long double an = (vp[bot].z - vm[bot].z) * (vp[bot].z + vm[bot].z) +
                           (vp[top].z - vm[top].z) * (vp[top].z + vm[top].z);
    total += d.dual_area(n) * (cv * s + ca * an);
  }
  return total;
}

}  // namespace

GradientCheckReport gradient_check(const DirectorField& U, const ScalingParams& p,
                                   std::span<const Vec3> phi, std::span<const double> steps) {
  const Grid3D& g = U.grid;
  const Domain2D& d = g.base();
  if (phi.size() != U.values.size()) throw ShapeError("gradient_check: direction size mismatch");
  for (int k = 0; k < g.n_layers(); ++k) {
    for (int n : d.domain_nodes()) {
      const int id = g.node(n, k);
      const double scale = norm(phi[id]) + 1e-300;
      if (std::abs(dot(phi[id], U.values[id])) > 1e-10 * scale) {
        throw InvalidPerturbation("gradient_check: direction is not tangential at node " + std::to_string(id));
      }
      if (d.is_boundary(n) && norm2(phi[id]) != 0.0) {
        throw InvalidPerturbation("gradient_check: direction moves lateral node " + std::to_string(id));
      }
    }
  }

  GradientCheckReport r;
  std::vector<Vec3> grad;
  energy_and_gradient(U, p, grad);
  // split the assembled derivative into the bulk and anchoring parts
  const int nz = g.n_layers();
  const double ca = 1.0 / (2.0 * p.eps() * p.eps());
  double anchor = 0.0;
  double total = 0.0;
  for (int k = 0; k < nz; ++k) {
    for (int n : d.domain_nodes()) {
      const int id = g.node(n, k);
      total += dot(grad[id], phi[id]);
    }
  }
  for (int n : d.domain_nodes()) {
    anchor += 2.0 * ca * d.dual_area(n) *
              (U.at(n, 0).z * phi[g.node(n, 0)].z + U.at(n, nz - 1).z * phi[g.node(n, nz - 1)].z);
  }
  r.anchoring_derivative = anchor;
  r.bulk_derivative = total - anchor;
  r.derivative = total;

  const double scale = std::abs(total) > 0.0 ? std::abs(total) : 1.0;
  for (double t : steps) {
    if (!(t > 0.0)) throw InvalidParameter("gradient_check: steps must be positive");
    const double fd = static_cast<double>(energy_split(U, p, phi, t) / (2.0L * t));
    r.steps.push_back(t);
    r.finite_difference.push_back(fd);
    r.mismatch.push_back(std::abs(fd - total) / scale);
  }
  for (std::size_t i = 0; i + 1 < r.steps.size(); ++i) {
    r.orders.push_back(std::log(r.mismatch[i] / r.mismatch[i + 1]) /
                       std::log(r.steps[i] / r.steps[i + 1]));
  }
  if (r.steps.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(r.steps.size());
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
      const double x = std::log(r.steps[i]);
      const double y = std::log(std::max(r.mismatch[i], 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    r.observed_order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return r;
}

}  // namespace thinslab
