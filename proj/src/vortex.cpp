#include "thinslab/vortex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "thinslab/error.hpp"

namespace thinslab {

int DefectSet::total_charge() const {
  int s = 0;
  for (const Defect& d : items) s += d.charge;
  return s;
}

std::string DefectSet::to_csv_rows() const {
  std::string out;
  char buf[96];
  for (const Defect& d : items) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", d.position.x, d.position.y, d.charge);
    out += buf;
  }
  return out;
}

namespace {

void check(const PlanarField& u) {
  if (!u.domain || static_cast<int>(u.values.size()) != u.domain->node_count()) {
    throw ShapeError("planar field does not match its domain");
  }
}

int round_winding(double total_angle) {
  return static_cast<int>(std::lround(total_angle / (2.0 * std::numbers::pi)));
}

// Zero of the bilinear interpolant on a cell, by Newton from the center.
bool bilinear_zero(const Vec2 c[4], double& s, double& t) {
  // c: u00, u10, u11, u01
  s = 0.5;
  t = 0.5;
  for (int it = 0; it < 30; ++it) {
    const Vec2 f = (1 - s) * (1 - t) * c[0] + s * (1 - t) * c[1] + s * t * c[2] + (1 - s) * t * c[3];
    const Vec2 fs = (1 - t) * (c[1] - c[0]) + t * (c[2] - c[3]);
    const Vec2 ft = (1 - s) * (c[3] - c[0]) + s * (c[2] - c[1]);
    const double det = cross(fs, ft);
    if (std::abs(det) < 1e-300) return false;
    const double ds = cross(f, ft) / det;
    const double dt = cross(fs, f) / det;
    s -= ds;
    t -= dt;
    if (std::abs(ds) + std::abs(dt) < 1e-13) break;
  }
  if (!(s > -0.25 && s < 1.25 && t > -0.25 && t < 1.25)) return false;
  s = std::clamp(s, 0.0, 1.0);
  t = std::clamp(t, 0.0, 1.0);
  return true;
}

}  // namespace

std::vector<Vec2> current(const PlanarField& u) {
  check(u);
  const Domain2D& d = *u.domain;
  std::vector<Vec2> j(d.node_count());
  const int nc = d.node_cols();
  const int nr = d.node_rows();
  auto in = [&](int i, int jj) { return i >= 0 && i < nc && jj >= 0 && jj < nr && d.in_domain(d.node(i, jj)); };
  auto diff = [&](int i, int jj, int di, int dj, double h) -> Vec2 {
    const bool fwd = in(i + di, jj + dj);
    const bool bwd = in(i - di, jj - dj);
    const int n = d.node(i, jj);
    if (fwd && bwd) return (u.values[d.node(i + di, jj + dj)] - u.values[d.node(i - di, jj - dj)]) * (0.5 / h);
    if (fwd) return (u.values[d.node(i + di, jj + dj)] - u.values[n]) * (1.0 / h);
    if (bwd) return (u.values[n] - u.values[d.node(i - di, jj - dj)]) * (1.0 / h);
    return {};
  };
  for (int n : d.domain_nodes()) {
    const int i = d.node_i(n);
    const int jj = d.node_j(n);
    const Vec2 ux = diff(i, jj, 1, 0, d.hx());
    const Vec2 uy = diff(i, jj, 0, 1, d.hy());
    const Vec2 v = u.values[n];
    j[n] = {v.x * ux.y - v.y * ux.x, v.x * uy.y - v.y * uy.x};
  }
  return j;
}

std::vector<double> jacobian(const PlanarField& u) {
  check(u);
  const Domain2D& d = *u.domain;
  std::vector<double> J(static_cast<std::size_t>(d.nx()) * d.ny(), 0.0);
  const double area = d.hx() * d.hy();
  for (int cj = 0; cj < d.ny(); ++cj) {
    for (int ci = 0; ci < d.nx(); ++ci) {
      if (!d.cell_active(ci, cj)) continue;
      const Vec2 a = u.values[d.node(ci, cj)];
      const Vec2 b = u.values[d.node(ci + 1, cj)];
      const Vec2 c = u.values[d.node(ci + 1, cj + 1)];
      const Vec2 e = u.values[d.node(ci, cj + 1)];
      J[ci + d.nx() * cj] = (cross(a, b) + cross(b, c) + cross(c, e) + cross(e, a)) / area;
    }
  }
  return J;
}

int degree_on_loop(const PlanarField& u, const std::vector<int>& loop, double min_modulus) {
  check(u);
  if (loop.size() < 3) throw ShapeError("degree_on_loop: loop needs at least 3 nodes");
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec2 a = u.values[loop[i]];
    const Vec2 b = u.values[loop[(i + 1) % loop.size()]];
    if (norm(a) < min_modulus) {
      throw IllDefinedDegree("degree_on_loop: |u| = " + std::to_string(norm(a)) + " at node " +
                             std::to_string(loop[i]));
    }
    total += angle_between(a, b);
  }
  return round_winding(total);
}

double degree_by_current(const PlanarField& u, const std::vector<int>& loop) {
  check(u);
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    Vec2 a = u.values[loop[i]];
    Vec2 b = u.values[loop[(i + 1) % loop.size()]];
    a = a * (1.0 / norm(a));
    b = b * (1.0 / norm(b));
    total += cross(a, b);
  }
  return total / (2.0 * std::numbers::pi);
}

std::vector<int> square_loop(const Domain2D& domain, Vec2 center, int radius) {
  if (radius < 1) throw InvalidParameter("square_loop: radius must be >= 1");
  const Vec2 o = domain.origin();
  const int i0 = static_cast<int>(std::lround((center.x - o.x) / domain.hx()));
  const int j0 = static_cast<int>(std::lround((center.y - o.y) / domain.hy()));
  std::vector<int> loop;
  auto push = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= domain.node_cols() || j >= domain.node_rows() ||
        !domain.in_domain(domain.node(i, j))) {
      throw ShapeError("square_loop: loop leaves the domain");
    }
    loop.push_back(domain.node(i, j));
  };
  for (int i = i0 - radius; i < i0 + radius; ++i) push(i, j0 - radius);
  for (int j = j0 - radius; j < j0 + radius; ++j) push(i0 + radius, j);
  for (int i = i0 + radius; i > i0 - radius; --i) push(i, j0 + radius);
  for (int j = j0 + radius; j > j0 - radius; --j) push(i0 - radius, j);
  return loop;
}

DefectSet locate_defects(const PlanarField& u, const DefectOptions& opts) {
  check(u);
  const Domain2D& d = *u.domain;
  const int nx = d.nx();
  const int ny = d.ny();
  const std::size_t ncell = static_cast<std::size_t>(nx) * ny;
  std::vector<int> winding(ncell, 0);
  std::vector<std::uint8_t> valid(ncell, 0), marked(ncell, 0), near_edge(ncell, 0);

  for (int cj = 0; cj < ny; ++cj) {
    for (int ci = 0; ci < nx; ++ci) {
      const int corner[4] = {d.node(ci, cj), d.node(ci + 1, cj), d.node(ci + 1, cj + 1),
                             d.node(ci, cj + 1)};
      bool ok = true;
      bool low = false;
      bool edge = false;
      for (int n : corner) {
        ok = ok && d.in_domain(n);
        if (!d.in_domain(n)) break;
        low = low || norm(u.values[n]) < opts.core_threshold;
        edge = edge || d.is_boundary(n);
      }
      if (!ok) continue;
      const std::size_t c = ci + static_cast<std::size_t>(nx) * cj;
      valid[c] = 1;
      double total = 0.0;
      for (int k = 0; k < 4; ++k) total += angle_between(u.values[corner[k]], u.values[corner[(k + 1) % 4]]);
      winding[c] = round_winding(total);
      marked[c] = winding[c] != 0 || low;
      near_edge[c] = edge;
    }
  }

  DefectSet out;
  out.provenance = DefectProvenance::detected;
  std::vector<std::uint8_t> seen(ncell, 0);
  std::vector<int> stack;
  std::vector<int> cluster;
  char buf[160];
  for (std::size_t start = 0; start < ncell; ++start) {
    if (!marked[start] || seen[start]) continue;
    cluster.clear();
    stack.assign(1, static_cast<int>(start));
    seen[start] = 1;
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      cluster.push_back(c);
      const int ci = c % nx;
      const int cj = c / nx;
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const int a = ci + di;
          const int b = cj + dj;
          if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
          const std::size_t m = a + static_cast<std::size_t>(nx) * b;
          if (marked[m] && !seen[m]) {
            seen[m] = 1;
            stack.push_back(static_cast<int>(m));
          }
        }
      }
    }

    int charge = 0;
    int imin = nx, imax = -1, jmin = ny, jmax = -1;
    bool touches = false;
    Vec2 zsum;
    double zw = 0.0;
    Vec2 csum;
    double cw = 0.0;
    for (int c : cluster) {
      const int ci = c % nx;
      const int cj = c / nx;
      imin = std::min(imin, ci);
      imax = std::max(imax, ci);
      jmin = std::min(jmin, cj);
      jmax = std::max(jmax, cj);
      touches = touches || near_edge[c];
      charge += winding[c];
      const Vec2 corner[4] = {u.values[d.node(ci, cj)], u.values[d.node(ci + 1, cj)],
                              u.values[d.node(ci + 1, cj + 1)], u.values[d.node(ci, cj + 1)]};
      double weight = 0.0;
      for (const Vec2& v : corner) weight += std::max(0.0, 1.0 - norm(v));
      csum += weight * d.cell_center(ci, cj);
      cw += weight;
      if (winding[c] != 0) {
        double s = 0.5, t = 0.5;
        if (!bilinear_zero(corner, s, t)) {
          s = 0.5;
          t = 0.5;
        }
        const Vec2 p = d.position(d.node(ci, cj)) + Vec2{s * d.hx(), t * d.hy()};
        const double w = std::abs(winding[c]);
        zsum += w * p;
        zw += w;
      }
    }
    const int diameter = std::max(imax - imin, jmax - jmin) + 1;
    if (charge == 0) {
      if (diameter >= opts.min_cluster_diameter) {
        const Vec2 p = cw > 0.0 ? csum * (1.0 / cw) : d.cell_center(imin, jmin);
        std::snprintf(buf, sizeof buf, "zero-charge core cluster near (%.4f, %.4f), diameter %d cells",
                      p.x, p.y, diameter);
        out.warnings.emplace_back(buf);
      }
      continue;
    }
    const Vec2 pos = zw > 0.0 ? zsum * (1.0 / zw) : csum * (1.0 / cw);
    out.items.push_back({pos, charge});
    if (touches) {
      std::snprintf(buf, sizeof buf, "defect of charge %d at (%.4f, %.4f) touches the boundary", charge,
                    pos.x, pos.y);
      out.warnings.emplace_back(buf);
    }
  }
  return out;
}

}  // namespace thinslab
