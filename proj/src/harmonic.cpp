#include "thinslab/harmonic.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <complex>
#include <future>
#include <limits>
#include <numbers>
#include <random>

#include "thinslab/error.hpp"

namespace thinslab {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using LU = Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>;
constexpr double kPi = std::numbers::pi;

struct Gauss {
  std::vector<double> x;  // on [-1, 1]
  std::vector<double> w;
};

Gauss gauss_legendre(int n) {
  Gauss g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    g.x[i] = z;
    g.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return g;
}

std::complex<double> to_c(Vec2 v) { return {v.x, v.y}; }

// prod_j ((x - a_j)/|x - a_j|)^{d_j}
std::complex<double> singular_phase(Vec2 x, const DefectSet& defects) {
  std::complex<double> s = 1.0;
  for (const Defect& d : defects.items) {
    const Vec2 r = x - d.position;
    const double len = norm(r);
    if (len == 0.0) return 0.0;
    std::complex<double> z(r.x / len, r.y / len);
    if (d.charge < 0) z = std::conj(z);
    for (int k = 0; k < std::abs(d.charge); ++k) s *= z;
  }
  return s;
}

double singular_log(Vec2 x, const DefectSet& defects) {
  double s = 0.0;
  for (const Defect& d : defects.items) s += d.charge * std::log(norm(x - d.position));
  return s;
}

Vec2 singular_gradient(Vec2 x, const DefectSet& defects) {
  Vec2 s;
  for (const Defect& d : defects.items) {
    const Vec2 r = x - d.position;
    s += (d.charge / norm2(r)) * perp(r);
  }
  return s;
}

// quintic cutoff: 1 for r <= rho/2, 0 for r >= rho
double cutoff(double r, double rho) {
  const double a = 0.5 * rho;
  if (r <= a) return 1.0;
  if (r >= rho) return 0.0;
  const double s = (r - a) / a;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

struct Stencil {
  int node[4];
  double w[4];
};

}  // namespace

struct HarmonicSolver::Impl {
  std::vector<int> index;  // node -> unknown, -1 outside
  std::vector<int> unknown_node;
  int n_unknowns = 0;
  double row_scale_dirichlet = 1.0;
  double row_scale_neumann = 1.0;
  // per boundary node: projection data
  struct Ghost {
    int node;
    Vec2 point;
    Vec2 normal;
    double twist;
  };
  std::vector<Ghost> ghosts;
  LU neumann;
  LU dirichlet;
};

namespace {

std::vector<BoundaryNodeSample> make_quadrature(const Domain2D& d, const BoundaryDatum& g) {
  std::vector<BoundaryNodeSample> q;
  const DomainShape& s = d.shape();
  if (g.power_law_degree) {
    auto circle = [&](double r, bool outward, int m) {
      for (int i = 0; i < m; ++i) {
        const double th = 2.0 * kPi * i / m;
        const Vec2 e{std::cos(th), std::sin(th)};
        BoundaryNodeSample b;
        b.point = r * e;
        b.normal = outward ? e : -e;
        b.weight = 2.0 * kPi * r / m;
        b.twist = g.twist(b.point, perp(b.normal));
        q.push_back(b);
      }
    };
    const int m = std::max(1024, 8 * d.nx());
    switch (s.kind) {
      case DomainKind::disk:
        circle(s.a, true, m);
        break;
      case DomainKind::annulus:
        circle(s.b, true, m);
        circle(s.a, false, m);
        break;
      case DomainKind::rectangle: {
        const Gauss gl = gauss_legendre(8);
        const double hw = 0.5 * s.a, hh = 0.5 * s.b;
        const Vec2 corner[4] = {{-hw, -hh}, {hw, -hh}, {hw, hh}, {-hw, hh}};
        const int panels = std::max(64, d.nx());
        for (int e = 0; e < 4; ++e) {
          const Vec2 p0 = corner[e];
          const Vec2 p1 = corner[(e + 1) % 4];
          const Vec2 dir = p1 - p0;
          const double len = norm(dir);
          const Vec2 tau = dir * (1.0 / len);
          const Vec2 nu{tau.y, -tau.x};
          for (int k = 0; k < panels; ++k) {
            for (std::size_t j = 0; j < gl.x.size(); ++j) {
              const double t = (k + 0.5 * (gl.x[j] + 1.0)) / panels;
              BoundaryNodeSample b;
              b.point = p0 + t * dir;
              b.normal = nu;
              b.weight = 0.5 * gl.w[j] * len / panels;
              b.twist = g.twist(b.point, tau);
              q.push_back(b);
            }
          }
        }
        break;
      }
    }
    return q;
  }
  // sampled datum: chain of projected boundary nodes
  for (const BoundaryLoop& loop : d.loops()) {
    const std::size_t m = loop.nodes.size();
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t km = (k + m - 1) % m, kp = (k + 1) % m;
      const double ds = norm(loop.projection[kp] - loop.projection[k]) +
                        norm(loop.projection[k] - loop.projection[km]);
      BoundaryNodeSample b;
      b.point = loop.projection[k];
      b.normal = loop.normal[k];
      b.weight = loop.weight[k];
      b.twist = ds > 0.0 ? angle_between(g.at(loop.nodes[km]), g.at(loop.nodes[kp])) / ds : 0.0;
      q.push_back(b);
    }
  }
  return q;
}

Stencil bilinear_stencil(const Domain2D& d, Vec2 q) {
  const Vec2 o = d.origin();
  const double fx = (q.x - o.x) / d.hx();
  const double fy = (q.y - o.y) / d.hy();
  const int ci = static_cast<int>(std::floor(fx));
  const int cj = static_cast<int>(std::floor(fy));
  if (ci < 0 || cj < 0 || ci >= d.nx() || cj >= d.ny()) {
    throw InvalidGeometry("boundary stencil leaves the grid");
  }
  const double s = fx - ci, t = fy - cj;
  Stencil st{{d.node(ci, cj), d.node(ci + 1, cj), d.node(ci, cj + 1), d.node(ci + 1, cj + 1)},
             {(1 - s) * (1 - t), s * (1 - t), (1 - s) * t, s * t}};
  for (int n : st.node) {
    if (!d.in_domain(n)) throw InvalidGeometry("domain too thin for the boundary stencil at this resolution");
  }
  return st;
}

}  // namespace

HarmonicSolver::HarmonicSolver(DomainPtr domain, BoundaryDatum g)
    : domain_(std::move(domain)), g_(std::move(g)), impl_(std::make_unique<Impl>()) {
  const Domain2D& d = *domain_;
  if (g_.domain->node_count() != d.node_count()) throw ShapeError("datum does not match the domain");
  if (d.loops().size() != 1) {
    throw InvalidGeometry("harmonic problems need a simply connected domain");
  }
  degree_ = datum_degree(g_);
  quad_ = make_quadrature(d, g_);
  Impl& im = *impl_;
  im.index.assign(d.node_count(), -1);
  for (int n : d.domain_nodes()) {
    im.index[n] = im.n_unknowns++;
    im.unknown_node.push_back(n);
  }
  const int N = im.n_unknowns;
  const double h = d.h_max();
  im.row_scale_dirichlet = 1.0 / (h * h);
  im.row_scale_neumann = 1.0 / h;

  // boundary loop position of each node, for the sampled-datum twist
  std::vector<int> loop_pos(d.node_count(), -1);
  const BoundaryLoop& loop = d.outer_loop();
  for (std::size_t k = 0; k < loop.nodes.size(); ++k) {
    if (loop_pos[loop.nodes[k]] < 0) loop_pos[loop.nodes[k]] = static_cast<int>(k);
  }

  std::vector<Eigen::Triplet<double>> lap;
  const double ix2 = 1.0 / (d.hx() * d.hx());
  const double iy2 = 1.0 / (d.hy() * d.hy());
  for (int n : d.interior_nodes()) {
    const int r = im.index[n];
    const int i = d.node_i(n), j = d.node_j(n);
    lap.emplace_back(r, r, 2.0 * ix2 + 2.0 * iy2);
    lap.emplace_back(r, im.index[d.node(i + 1, j)], -ix2);
    lap.emplace_back(r, im.index[d.node(i - 1, j)], -ix2);
    lap.emplace_back(r, im.index[d.node(i, j + 1)], -iy2);
    lap.emplace_back(r, im.index[d.node(i, j - 1)], -iy2);
  }
  std::vector<Eigen::Triplet<double>> dir = lap, neu = lap;
  const double delta = 2.0 * h;
  for (int b : d.boundary_nodes()) {
    const Vec2 x = d.position(b);
    Vec2 nu;
    const Vec2 p = d.shape().project(x, &nu);
    const double t0 = -d.shape().signed_distance(x);
    const double t1 = delta, t2 = 2.0 * delta;
    const Stencil s1 = bilinear_stencil(d, p - t1 * nu);
    const Stencil s2 = bilinear_stencil(d, p - t2 * nu);
    const double den0 = (t0 - t1) * (t0 - t2);
    const double den1 = (t1 - t0) * (t1 - t2);
    const double den2 = (t2 - t0) * (t2 - t1);
    const double L[3] = {t1 * t2 / den0, t0 * t2 / den1, t0 * t1 / den2};
    const double dL[3] = {-(t1 + t2) / den0, -(t0 + t2) / den1, -(t0 + t1) / den2};
    const int r = im.index[b];
    dir.emplace_back(r, r, L[0] * im.row_scale_dirichlet);
    neu.emplace_back(r, r, dL[0] * im.row_scale_neumann);
    for (int k = 0; k < 4; ++k) {
      dir.emplace_back(r, im.index[s1.node[k]], L[1] * s1.w[k] * im.row_scale_dirichlet);
      dir.emplace_back(r, im.index[s2.node[k]], L[2] * s2.w[k] * im.row_scale_dirichlet);
      neu.emplace_back(r, im.index[s1.node[k]], dL[1] * s1.w[k] * im.row_scale_neumann);
      neu.emplace_back(r, im.index[s2.node[k]], dL[2] * s2.w[k] * im.row_scale_neumann);
    }
    neu.emplace_back(r, N, im.row_scale_neumann);  // flux correction unknown
    neu.emplace_back(N, r, 1.0);                   // boundary values sum to zero

    double twist = 0.0;
    if (g_.power_law_degree) {
      twist = g_.twist(p, perp(nu));
    } else if (loop_pos[b] >= 0) {
      const std::size_t m = loop.nodes.size();
      const std::size_t k = loop_pos[b], km = (k + m - 1) % m, kp = (k + 1) % m;
      const double ds = norm(loop.projection[kp] - loop.projection[k]) +
                        norm(loop.projection[k] - loop.projection[km]);
      twist = ds > 0.0 ? angle_between(g_.at(loop.nodes[km]), g_.at(loop.nodes[kp])) / ds : 0.0;
    }
    im.ghosts.push_back({b, p, nu, twist});
  }

  SpMat A(N, N);
  A.setFromTriplets(dir.begin(), dir.end());
  im.dirichlet.compute(A);
  if (im.dirichlet.info() != Eigen::Success) throw InvalidGeometry("Dirichlet factorization failed");
  SpMat B(N + 1, N + 1);
  B.setFromTriplets(neu.begin(), neu.end());
  im.neumann.compute(B);
  if (im.neumann.info() != Eigen::Success) throw InvalidGeometry("Neumann factorization failed");
}

HarmonicSolver::~HarmonicSolver() = default;

void HarmonicSolver::check(const DefectSet& defects) const {
  const Domain2D& d = *domain_;
  int total = 0;
  for (std::size_t i = 0; i < defects.items.size(); ++i) {
    const Defect& a = defects.items[i];
    if (a.charge == 0) throw InvalidConfiguration("defect with zero charge");
    if (!(d.shape().signed_distance(a.position) < 0.0)) {
      throw InvalidConfiguration("defect outside the domain");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (norm(a.position - defects.items[j].position) == 0.0) {
        throw InvalidConfiguration("coincident defects: the renormalized energy is infinite");
      }
    }
    total += a.charge;
  }
  if (total != degree_) {
    throw IncompatibleData("defect charges sum to " + std::to_string(total) +
                           " but the boundary datum has degree " + std::to_string(degree_));
  }
}

double PsiSolution::regular_at(Vec2 x) const { return regular.domain->interpolate(regular.values, x); }

double PsiSolution::psi_at(Vec2 x, const DefectSet& defects) const {
  return regular_at(x) + singular_log(x, defects);
}

PsiSolution HarmonicSolver::solve_psi(const DefectSet& defects) const {
  check(defects);
  const Impl& im = *impl_;
  const int N = im.n_unknowns;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N + 1);
  auto neumann_data = [&](Vec2 p, Vec2 nu, double twist) {
    double f = twist;
    for (const Defect& a : defects.items) {
      const Vec2 r = p - a.position;
      f -= a.charge * dot(r, nu) / norm2(r);
    }
    return f;
  };
  for (const auto& gh : im.ghosts) {
    rhs[im.index[gh.node]] = -neumann_data(gh.point, gh.normal, gh.twist) * im.row_scale_neumann;
  }
  const Eigen::VectorXd sol = im.neumann.solve(rhs);

  PsiSolution out{ScalarField2D(domain_), ScalarField2D(domain_)};
  for (int k = 0; k < N; ++k) out.regular.values[im.unknown_node[k]] = sol[k];
  out.flux_correction = sol[N];
  double compat = 0.0, mean = 0.0, length = 0.0;
  for (const auto& b : quad_) {
    compat += b.weight * neumann_data(b.point, b.normal, b.twist);
    mean += b.weight * out.psi_at(b.point, defects);
    length += b.weight;
  }
  out.compatibility_residual = compat;
  mean /= length;
  for (int n : domain_->domain_nodes()) out.regular.values[n] -= mean;
  double check_mean = 0.0;
  for (const auto& b : quad_) check_mean += b.weight * out.psi_at(b.point, defects);
  out.boundary_mean = check_mean / length;
  for (int n : domain_->domain_nodes()) {
    const Vec2 x = domain_->position(n);
    double s = 0.0;
    bool hit = false;
    for (const Defect& a : defects.items) {
      const double r = norm(x - a.position);
      if (r == 0.0) hit = true;
      else s += a.charge * std::log(r);
    }
    out.psi.values[n] = hit ? -std::numeric_limits<double>::infinity() : out.regular.values[n] + s;
  }
  return out;
}

CanonicalMap HarmonicSolver::canonical_map(const DefectSet& defects) const {
  check(defects);
  const Impl& im = *impl_;
  const Domain2D& d = *domain_;
  const int N = im.n_unknowns;

  // boundary phase, unwrapped along the boundary chain
  std::vector<double> raw(d.node_count(), 0.0);
  std::vector<std::uint8_t> have(d.node_count(), 0);
  const BoundaryLoop& loop = d.outer_loop();
  double prev_raw = 0.0, acc = 0.0;
  double first = 0.0;
  for (std::size_t k = 0; k <= loop.nodes.size(); ++k) {
    const int n = loop.nodes[k % loop.nodes.size()];
    const Vec2 x = d.position(n);
    Vec2 nu;
    const Vec2 p = d.shape().project(x, &nu);
    const double r = std::arg(to_c(g_.at(n)) * std::conj(singular_phase(p, defects)));
    if (k == 0) {
      acc = r;
      first = r;
    } else {
      double step = r - prev_raw;
      step -= 2.0 * kPi * std::round(step / (2.0 * kPi));
      acc += step;
    }
    prev_raw = r;
    if (k < loop.nodes.size() && !have[n]) {
      raw[n] = acc;
      have[n] = 1;
    }
  }
  if (std::abs(acc - first) > kPi) {
    throw IncompatibleData("boundary phase of g relative to the defects winds; charges do not match the datum");
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
  for (const auto& gh : im.ghosts) {
    if (!have[gh.node]) throw InvalidGeometry("boundary node missing from the boundary chain");
    rhs[im.index[gh.node]] = raw[gh.node] * im.row_scale_dirichlet;
  }
  const Eigen::VectorXd phi = im.dirichlet.solve(rhs);
  CanonicalMap out{PlanarField(domain_), ScalarField2D(domain_)};
  for (int k = 0; k < N; ++k) {
    const int n = im.unknown_node[k];
    out.phi.values[n] = phi[k];
    const std::complex<double> u = std::polar(1.0, phi[k]) * singular_phase(d.position(n), defects);
    out.u.values[n] = {u.real(), u.imag()};
  }
  return out;
}

RenormalizedReport HarmonicSolver::closed_form(const DefectSet& defects) const {
  const PsiSolution psi = solve_psi(defects);
  RenormalizedReport r;
  const auto& items = defects.items;
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = 0; j < items.size(); ++j) {
      if (i == j) continue;
      r.pair_term -= kPi * items[i].charge * items[j].charge *
                     std::log(norm(items[i].position - items[j].position));
    }
  }
  for (const auto& b : quad_) r.boundary_term += 0.5 * b.weight * psi.psi_at(b.point, defects) * b.twist;
  for (const Defect& a : items) r.regular_term -= kPi * a.charge * psi.regular_at(a.position);
  r.w_closed = r.pair_term + r.boundary_term + r.regular_term;
  r.compatibility_residual = psi.compatibility_residual;
  return r;
}

namespace {

std::vector<Vec2> nodal_gradient(const Domain2D& d, const std::vector<double>& f) {
  std::vector<Vec2> g(d.node_count());
  const int nc = d.node_cols(), nr = d.node_rows();
  auto in = [&](int i, int j) { return i >= 0 && j >= 0 && i < nc && j < nr && d.in_domain(d.node(i, j)); };
  auto deriv = [&](int i, int j, int di, int dj, double h) {
    const double f0 = f[d.node(i, j)];
    if (in(i + di, j + dj) && in(i - di, j - dj)) {
      return (f[d.node(i + di, j + dj)] - f[d.node(i - di, j - dj)]) / (2.0 * h);
    }
    if (in(i + di, j + dj) && in(i + 2 * di, j + 2 * dj)) {
      return (-3.0 * f0 + 4.0 * f[d.node(i + di, j + dj)] - f[d.node(i + 2 * di, j + 2 * dj)]) / (2.0 * h);
    }
    if (in(i - di, j - dj) && in(i - 2 * di, j - 2 * dj)) {
      return (3.0 * f0 - 4.0 * f[d.node(i - di, j - dj)] + f[d.node(i - 2 * di, j - 2 * dj)]) / (2.0 * h);
    }
    if (in(i + di, j + dj)) return (f[d.node(i + di, j + dj)] - f0) / h;
    if (in(i - di, j - dj)) return (f0 - f[d.node(i - di, j - dj)]) / h;
    return 0.0;
  };
  for (int n : d.domain_nodes()) {
    const int i = d.node_i(n), j = d.node_j(n);
    g[n] = {deriv(i, j, 1, 0, d.hx()), deriv(i, j, 0, 1, d.hy())};
  }
  return g;
}

std::vector<double> patch_radii(const Domain2D& d, const DefectSet& defects) {
  std::vector<double> rho;
  for (std::size_t k = 0; k < defects.items.size(); ++k) {
    const Vec2 a = defects.items[k].position;
    double r = std::min(0.5, -0.9 * d.shape().signed_distance(a));
    for (std::size_t j = 0; j < defects.items.size(); ++j) {
      if (j != k) r = std::min(r, 0.5 * norm(a - defects.items[j].position));
    }
    rho.push_back(r);
  }
  return rho;
}

}  // namespace

double HarmonicSolver::truncated_energy(const DefectSet& defects, const CanonicalMap& cmap,
                                        double sigma) const {
  const Domain2D& d = *domain_;
  const std::vector<Vec2> gphi = nodal_gradient(d, cmap.phi.values);
  const std::vector<double> rho = patch_radii(d, defects);
  for (double r : rho) {
    if (!(sigma <= 0.5 * r)) throw InvalidParameter("truncation radius too large for the configuration");
  }
  auto grad = [&](Vec2 x) { return singular_gradient(x, defects) + d.interpolate(gphi, x); };
  auto weight_out = [&](Vec2 x) {
    double c = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) c += cutoff(norm(x - defects.items[k].position), rho[k]);
    return 1.0 - c;
  };

  // polar patches, r = e^s
  const Gauss gl = gauss_legendre(8);
  const int n_theta = 256;
  double patches = 0.0;
  for (std::size_t k = 0; k < rho.size(); ++k) {
    const Vec2 a = defects.items[k].position;
    const double s_lo = std::log(sigma), s_mid = std::log(0.5 * rho[k]), s_hi = std::log(rho[k]);
    auto integrate = [&](double s0, double s1) {
      const int panels = std::max(1, static_cast<int>(std::ceil((s1 - s0) / 0.5)));
      double total = 0.0;
      for (int p = 0; p < panels; ++p) {
        const double lo = s0 + (s1 - s0) * p / panels;
        const double hi = s0 + (s1 - s0) * (p + 1) / panels;
        for (std::size_t q = 0; q < gl.x.size(); ++q) {
          const double s = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.x[q];
          const double r = std::exp(s);
          double ring = 0.0;
          for (int t = 0; t < n_theta; ++t) {
            const double th = 2.0 * kPi * t / n_theta;
            const Vec2 x = a + r * Vec2{std::cos(th), std::sin(th)};
            ring += norm2(grad(x));
          }
          total += 0.5 * (hi - lo) * gl.w[q] * r * r * cutoff(r, rho[k]) * ring * (2.0 * kPi / n_theta);
        }
      }
      return total;
    };
    patches += integrate(s_lo, s_mid) + integrate(s_mid, s_hi);
  }

  // remaining region by cells
  const Gauss g3 = gauss_legendre(3);
  const int m = 8;
  const double hx = d.hx(), hy = d.hy();
  const double diag = 0.5 * std::hypot(hx, hy);
  double cells = 0.0;
  for (int cj = 0; cj < d.ny(); ++cj) {
    for (int ci = 0; ci < d.nx(); ++ci) {
      const Vec2 c = d.cell_center(ci, cj);
      const double sd = d.shape().signed_distance(c);
      if (sd > diag) continue;
      bool inside_core = false;
      for (std::size_t k = 0; k < rho.size() && !inside_core; ++k) {
        inside_core = norm(c - defects.items[k].position) + diag < 0.5 * rho[k];
      }
      if (inside_core) continue;
      double acc = 0.0;
      if (sd < -diag) {
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) {
            const Vec2 x = c + Vec2{0.5 * hx * g3.x[a], 0.5 * hy * g3.x[b]};
            const double w = weight_out(x);
            if (w > 0.0) acc += 0.25 * g3.w[a] * g3.w[b] * w * norm2(grad(x));
          }
        }
      } else {
        for (int a = 0; a < m; ++a) {
          for (int b = 0; b < m; ++b) {
            const Vec2 x = c + Vec2{hx * ((a + 0.5) / m - 0.5), hy * ((b + 0.5) / m - 0.5)};
            if (!(d.shape().signed_distance(x) < 0.0)) continue;
            const double w = weight_out(x);
            if (w > 0.0) acc += w * norm2(grad(x)) / (m * m);
          }
        }
      }
      cells += acc * hx * hy;
    }
  }
  double log_part = 0.0;
  for (const Defect& a : defects.items) log_part += kPi * a.charge * a.charge * std::log(sigma);
  return 0.5 * (patches + cells) + log_part;
}

RenormalizedReport HarmonicSolver::renormalized_energy(const DefectSet& defects) const {
  RenormalizedReport r = closed_form(defects);
  const CanonicalMap cmap = canonical_map(defects);
  const std::vector<double> rho = patch_radii(*domain_, defects);
  double s0 = 0.2;
  for (double x : rho) s0 = std::min(s0, 0.5 * x);
  for (double sigma : {s0, 0.5 * s0, 0.25 * s0}) {
    r.sigma_samples.emplace_back(sigma, truncated_energy(defects, cmap, sigma));
  }
  // truncation error is O(sigma^2): Richardson on the two smallest radii
  const double t1 = r.sigma_samples[1].second, t2 = r.sigma_samples[2].second;
  r.w_limit = (4.0 * t2 - t1) / 3.0;
  return r;
}

PsiSolution solve_psi(const DomainPtr& domain, const DefectSet& defects, const BoundaryDatum& g) {
  return HarmonicSolver(domain, g).solve_psi(defects);
}

PlanarField canonical_map(const DomainPtr& domain, const DefectSet& defects, const BoundaryDatum& g) {
  return HarmonicSolver(domain, g).canonical_map(defects).u;
}

RenormalizedReport renormalized_energy(const DomainPtr& domain, const DefectSet& defects,
                                       const BoundaryDatum& g) {
  return HarmonicSolver(domain, g).renormalized_energy(defects);
}

// ---------------------------------------------------------------------------
// optimization over defect positions

double configuration_clearance(const Domain2D& domain, const std::vector<Vec2>& points) {
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    c = std::min(c, -domain.shape().signed_distance(points[i]));
    for (std::size_t j = 0; j < i; ++j) c = std::min(c, norm(points[i] - points[j]));
  }
  return c;
}

namespace {

DefectSet unit_defects(const std::vector<Vec2>& pts) {
  DefectSet s;
  for (Vec2 p : pts) s.items.push_back({p, 1});
  return s;
}

double objective(const HarmonicSolver& solver, const std::vector<Vec2>& pts) {
  const double clearance = configuration_clearance(solver.domain(), pts);
  if (!(clearance >= 3.0 * solver.domain().h_max())) return std::numeric_limits<double>::infinity();
  return solver.closed_form(unit_defects(pts)).w_closed;
}

double inradius(const DomainShape& s) {
  switch (s.kind) {
    case DomainKind::disk: return s.a;
    case DomainKind::rectangle: return 0.5 * std::min(s.a, s.b);
    case DomainKind::annulus: return 0.5 * (s.b - s.a);
  }
  return 1.0;
}

double diameter(const DomainShape& s) {
  switch (s.kind) {
    case DomainKind::disk: return 2.0 * s.a;
    case DomainKind::rectangle: return std::hypot(s.a, s.b);
    case DomainKind::annulus: return 2.0 * s.b;
  }
  return 1.0;
}

struct SearchResult {
  std::vector<Vec2> pts;
  double value;
  int evals;
};

SearchResult compass(const HarmonicSolver& solver, std::vector<Vec2> pts, const PatternSearchOptions& opts) {
  const Domain2D& d = solver.domain();
  double step = opts.initial_step * diameter(d.shape());
  const double min_step = opts.min_step > 0.0 ? opts.min_step : 0.25 * d.h_max();
  double best = objective(solver, pts);
  int evals = 1;
  const int budget = std::max(1, opts.max_evaluations / std::max(1, opts.n_seeds));
  while (step >= min_step && evals < budget) {
    bool improved = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (int axis = 0; axis < 2; ++axis) {
        for (double sign : {1.0, -1.0}) {
          std::vector<Vec2> trial = pts;
          (axis == 0 ? trial[i].x : trial[i].y) += sign * step;
          const double v = objective(solver, trial);
          ++evals;
          if (v < best - 1e-13 * std::max(1.0, std::abs(best))) {
            best = v;
            pts = std::move(trial);
            improved = true;
            break;
          }
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {pts, best, evals};
}

std::vector<Vec2> start_configuration(const Domain2D& d, int n, int k, std::uint64_t seed) {
  const double rin = inradius(d.shape());
  const double h = d.h_max();
  if (k == 0) {
    if (n == 1) return {d.centroid()};
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) {
      const double th = 2.0 * kPi * i / n + 0.1;
      pts.push_back(d.centroid() + 0.5 * rin * Vec2{std::cos(th), std::sin(th)});
    }
    return pts;
  }
  std::mt19937_64 rng(seed + static_cast<std::uint64_t>(k));
  const DomainShape& s = d.shape();
  const double ext = 0.5 * diameter(s);
  std::uniform_real_distribution<double> u(-ext, ext);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) pts.push_back(d.centroid() + Vec2{u(rng), u(rng)});
    if (configuration_clearance(d, pts) >= std::max(6.0 * h, 0.1 * rin)) return pts;
  }
  throw InvalidConfiguration("could not sample an admissible start configuration");
}

}  // namespace

RenormalizedOptimum minimize_renormalized(const HarmonicSolver& solver, int n_defects,
                                          const PatternSearchOptions& opts) {
  if (n_defects < 1 || n_defects != solver.degree()) {
    throw IncompatibleData("minimize_renormalized: " + std::to_string(n_defects) +
                           " unit defects cannot match a datum of degree " +
                           std::to_string(solver.degree()));
  }
  const int seeds = std::max(1, opts.n_seeds);
  std::vector<SearchResult> results(seeds);
  auto run = [&](int k) {
    results[k] = compass(solver, start_configuration(solver.domain(), n_defects, k, opts.seed), opts);
  };
  if (opts.threads > 1) {
    for (int base = 0; base < seeds; base += opts.threads) {
      std::vector<std::future<void>> jobs;
      for (int k = base; k < std::min(seeds, base + opts.threads); ++k) {
        jobs.push_back(std::async(std::launch::async, run, k));
      }
      for (auto& j : jobs) j.get();
    }
  } else {
    for (int k = 0; k < seeds; ++k) run(k);
  }
  RenormalizedOptimum best;
  best.value = std::numeric_limits<double>::infinity();
  for (const SearchResult& r : results) {
    best.evaluations += r.evals;
    best.seed_values.push_back(r.value);
    if (r.value < best.value) {
      best.value = r.value;
      best.positions = r.pts;
    }
  }
  return best;
}

RenormalizedOptimum minimize_renormalized(const DomainPtr& domain, const BoundaryDatum& g,
                                          int n_defects, const PatternSearchOptions& opts) {
  const HarmonicSolver solver(domain, g);
  return minimize_renormalized(solver, n_defects, opts);
}

std::vector<double> renormalized_landscape(const HarmonicSolver& solver,
                                           const std::vector<std::vector<Vec2>>& configurations) {
  std::vector<double> out;
  out.reserve(configurations.size());
  for (const auto& c : configurations) out.push_back(objective(solver, c));
  return out;
}

}  // namespace thinslab
