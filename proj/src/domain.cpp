#include "thinslab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>

#include "thinslab/error.hpp"

namespace thinslab {

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::disk: return "disk";
    case DomainKind::rectangle: return "rectangle";
    case DomainKind::annulus: return "annulus";
  }
  return "unknown";
}

DomainKind domain_kind_from_string(const std::string& name) {
  if (name == "disk") return DomainKind::disk;
  if (name == "rectangle") return DomainKind::rectangle;
  if (name == "annulus") return DomainKind::annulus;
  throw InvalidParameter("unknown domain kind '" + name + "'");
}

// ---------------------------------------------------------------------------
// exact shape

double DomainShape::signed_distance(Vec2 p) const {
  switch (kind) {
    case DomainKind::disk:
      return norm(p) - a;
    case DomainKind::rectangle: {
      const double qx = std::abs(p.x) - 0.5 * a;
      const double qy = std::abs(p.y) - 0.5 * b;
      const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
      return outside + std::min(std::max(qx, qy), 0.0);
    }
    case DomainKind::annulus: {
      const double r = norm(p);
      return std::max(r - b, a - r);
    }
  }
  return 0.0;
}

Vec2 DomainShape::project(Vec2 p, Vec2* normal) const {
  Vec2 q;
  Vec2 nu;
  switch (kind) {
    case DomainKind::disk: {
      const double r = norm(p);
      nu = r > 0.0 ? p * (1.0 / r) : Vec2{1.0, 0.0};
      q = nu * a;
      break;
    }
    case DomainKind::annulus: {
      const double r = norm(p);
      const Vec2 dir = r > 0.0 ? p * (1.0 / r) : Vec2{1.0, 0.0};
      if (r >= 0.5 * (a + b)) {
        q = dir * b;
        nu = dir;
      } else {
        q = dir * a;
        nu = -dir;
      }
      break;
    }
    case DomainKind::rectangle: {
      const double hw = 0.5 * a;
      const double hh = 0.5 * b;
      const double qx = std::abs(p.x) - hw;
      const double qy = std::abs(p.y) - hh;
      const double sx = p.x < 0.0 ? -1.0 : 1.0;
      const double sy = p.y < 0.0 ? -1.0 : 1.0;
      if (qx >= 0.0 || qy >= 0.0) {
        // on or outside the boundary: clamp
        q = {std::clamp(p.x, -hw, hw), std::clamp(p.y, -hh, hh)};
        if (qx >= 0.0 && qy >= 0.0) {
          const Vec2 d = p - q;
          const double len = norm(d);
          nu = len > 0.0 ? d * (1.0 / len) : Vec2{sx * std::numbers::sqrt2 / 2, sy * std::numbers::sqrt2 / 2};
        } else if (qx >= 0.0) {
          nu = {sx, 0.0};
        } else {
          nu = {0.0, sy};
        }
      } else if (qx > qy) {
        q = {sx * hw, p.y};
        nu = {sx, 0.0};
      } else {
        q = {p.x, sy * hh};
        nu = {0.0, sy};
      }
      break;
    }
  }
  if (normal) *normal = nu;
  return q;
}

double DomainShape::exact_area() const {
  switch (kind) {
    case DomainKind::disk: return std::numbers::pi * a * a;
    case DomainKind::rectangle: return a * b;
    case DomainKind::annulus: return std::numbers::pi * (b * b - a * a);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// grid

namespace {

void validate_shape(const DomainShape& s) {
  auto bad = [](double v) { return !std::isfinite(v) || v <= 0.0; };
  switch (s.kind) {
    case DomainKind::disk:
      if (bad(s.a)) throw InvalidGeometry("disk radius must be positive");
      break;
    case DomainKind::rectangle:
      if (bad(s.a) || bad(s.b)) throw InvalidGeometry("rectangle sides must be positive");
      break;
    case DomainKind::annulus:
      if (bad(s.a) || bad(s.b)) throw InvalidGeometry("annulus radii must be positive");
      if (s.a >= s.b) throw InvalidGeometry("annulus requires r_in < r_out");
      break;
  }
}

}  // namespace

Domain2D::Domain2D(const DomainShape& shape, int nx, int ny) : shape_(shape), nx_(nx), ny_(ny) {
  validate_shape(shape_);
  if (nx < 16 || ny < 16) {
    throw InvalidParameter("domain resolution must be at least 16 cells per side");
  }
  double width = 0.0;
  double height = 0.0;
  switch (shape_.kind) {
    case DomainKind::disk: width = height = 2.0 * shape_.a; break;
    case DomainKind::rectangle: width = shape_.a; height = shape_.b; break;
    case DomainKind::annulus: width = height = 2.0 * shape_.b; break;
  }
  hx_ = width / nx_;
  hy_ = height / ny_;
  origin_ = {-0.5 * width, -0.5 * height};

  active_.assign(static_cast<std::size_t>(nx_) * ny_, 0);
  for (int cj = 0; cj < ny_; ++cj) {
    for (int ci = 0; ci < nx_; ++ci) {
      const bool inside = shape_.kind == DomainKind::rectangle || shape_.contains(cell_center(ci, cj));
      active_[ci + nx_ * cj] = inside ? 1 : 0;
      if (inside) area_ += hx_ * hy_;
    }
  }
  build_tags();
  build_edges();
  build_loops();
}

bool Domain2D::cell_active(int ci, int cj) const {
  if (ci < 0 || cj < 0 || ci >= nx_ || cj >= ny_) return false;
  return active_[ci + nx_ * cj] != 0;
}

void Domain2D::build_tags() {
  const int n = node_count();
  tags_.assign(n, NodeTag::exterior);
  dual_area_.assign(n, 0.0);
  for (int j = 0; j < node_rows(); ++j) {
    for (int i = 0; i < node_cols(); ++i) {
      const int count = cell_active(i - 1, j - 1) + cell_active(i, j - 1) +
                        cell_active(i - 1, j) + cell_active(i, j);
      const int id = node(i, j);
      if (count == 0) continue;
      tags_[id] = count == 4 ? NodeTag::interior : NodeTag::boundary;
      dual_area_[id] = 0.25 * count * hx_ * hy_;
      domain_nodes_.push_back(id);
      (count == 4 ? interior_nodes_ : boundary_nodes_).push_back(id);
    }
  }
  if (interior_nodes_.empty()) throw InvalidGeometry("domain has no interior nodes");

  // interior nodes must form a single 4-connected component
  std::vector<std::uint8_t> seen(n, 0);
  std::queue<int> todo;
  todo.push(interior_nodes_.front());
  seen[interior_nodes_.front()] = 1;
  std::size_t reached = 0;
  while (!todo.empty()) {
    const int cur = todo.front();
    todo.pop();
    ++reached;
    const int i = node_i(cur);
    const int j = node_j(cur);
    const int nb[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
    for (const auto& q : nb) {
      if (q[0] < 0 || q[1] < 0 || q[0] >= node_cols() || q[1] >= node_rows()) continue;
      const int id = node(q[0], q[1]);
      if (seen[id] || tags_[id] != NodeTag::interior) continue;
      seen[id] = 1;
      todo.push(id);
    }
  }
  if (reached != interior_nodes_.size()) {
    throw InvalidGeometry("interior nodes are not connected; refine the grid");
  }
}

void Domain2D::build_edges() {
  const double wx = hy_ / (4.0 * hx_);
  const double wy = hx_ / (4.0 * hy_);
  for (int j = 0; j < node_rows(); ++j) {
    for (int i = 0; i < node_cols(); ++i) {
      if (i + 1 < node_cols()) {
        const int cells = cell_active(i, j - 1) + cell_active(i, j);
        if (cells > 0) edges_.push_back({node(i, j), node(i + 1, j), cells * wx});
      }
      if (j + 1 < node_rows()) {
        const int cells = cell_active(i - 1, j) + cell_active(i, j);
        if (cells > 0) edges_.push_back({node(i, j), node(i, j + 1), cells * wy});
      }
    }
  }
}

void Domain2D::build_loops() {
  // Directed boundary edges of active cells, oriented with the cell on the
  // left. Directions: 0 = +x, 1 = +y, 2 = -x, 3 = -y.
  struct DirEdge {
    int to;
    int dir;
    bool used;
  };
  std::map<int, std::vector<DirEdge>> out;
  std::size_t total = 0;
  for (int cj = 0; cj < ny_; ++cj) {
    for (int ci = 0; ci < nx_; ++ci) {
      if (!cell_active(ci, cj)) continue;
      const int n00 = node(ci, cj), n10 = node(ci + 1, cj);
      const int n11 = node(ci + 1, cj + 1), n01 = node(ci, cj + 1);
      if (!cell_active(ci, cj - 1)) out[n00].push_back({n10, 0, false}), ++total;
      if (!cell_active(ci + 1, cj)) out[n10].push_back({n11, 1, false}), ++total;
      if (!cell_active(ci, cj + 1)) out[n11].push_back({n01, 2, false}), ++total;
      if (!cell_active(ci - 1, cj)) out[n01].push_back({n00, 3, false}), ++total;
    }
  }

  std::size_t used = 0;
  while (used < total) {
    int start = -1;
    for (auto& [from, list] : out) {
      for (auto& e : list) {
        if (!e.used) {
          start = from;
          break;
        }
      }
      if (start >= 0) break;
    }
    BoundaryLoop loop;
    int cur = start;
    int dir = -1;
    while (true) {
      auto& list = out[cur];
      DirEdge* pick = nullptr;
      if (dir < 0) {
        for (auto& e : list) {
          if (!e.used) {
            pick = &e;
            break;
          }
        }
      } else {
        // prefer the left turn so diagonally touching cells stay on separate loops
        for (int turn : {1, 0, 3}) {
          for (auto& e : list) {
            if (!e.used && e.dir == (dir + turn) % 4) {
              pick = &e;
              break;
            }
          }
          if (pick) break;
        }
      }
      if (!pick) break;
      pick->used = true;
      ++used;
      loop.nodes.push_back(cur);
      dir = pick->dir;
      cur = pick->to;
      if (cur == start) break;
    }

    const std::size_t m = loop.nodes.size();
    loop.projection.resize(m);
    loop.normal.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      loop.projection[k] = shape_.project(position(loop.nodes[k]), &loop.normal[k]);
    }
    loop.arc.assign(m, 0.0);
    loop.weight.assign(m, 0.0);
    std::vector<double> chord(m);
    for (std::size_t k = 0; k < m; ++k) {
      chord[k] = norm(loop.projection[(k + 1) % m] - loop.projection[k]);
      if (k + 1 < m) loop.arc[k + 1] = loop.arc[k] + chord[k];
      const Vec2 a = position(loop.nodes[k]);
      const Vec2 b = position(loop.nodes[(k + 1) % m]);
      loop.signed_area += 0.5 * cross(a, b);
    }
    for (std::size_t k = 0; k < m; ++k) {
      loop.weight[k] = 0.5 * (chord[k] + chord[(k + m - 1) % m]);
      loop.length += chord[k];
    }
    loops_.push_back(std::move(loop));
  }

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < loops_.size(); ++l) {
    if (loops_[l].signed_area > best) {
      best = loops_[l].signed_area;
      outer_loop_ = l;
    }
  }
}

std::optional<Domain2D::CellCoord> Domain2D::locate(Vec2 p) const {
  const double fx = (p.x - origin_.x) / hx_;
  const double fy = (p.y - origin_.y) / hy_;
  int ci = std::clamp(static_cast<int>(std::floor(fx)), 0, nx_ - 1);
  int cj = std::clamp(static_cast<int>(std::floor(fy)), 0, ny_ - 1);
  if (!cell_active(ci, cj)) {
    double best = std::numeric_limits<double>::infinity();
    int bi = -1, bj = -1;
    for (int dj = -2; dj <= 2; ++dj) {
      for (int di = -2; di <= 2; ++di) {
        if (!cell_active(ci + di, cj + dj)) continue;
        const double d = norm2(cell_center(ci + di, cj + dj) - p);
        if (d < best) {
          best = d;
          bi = ci + di;
          bj = cj + dj;
        }
      }
    }
    if (bi < 0) return std::nullopt;
    ci = bi;
    cj = bj;
  }
  return CellCoord{ci, cj, fx - ci, fy - cj};
}

double Domain2D::interpolate(std::span<const double> values, Vec2 p) const {
  const auto c = locate(p);
  if (!c) return std::numeric_limits<double>::quiet_NaN();
  const double v00 = values[node(c->ci, c->cj)];
  const double v10 = values[node(c->ci + 1, c->cj)];
  const double v01 = values[node(c->ci, c->cj + 1)];
  const double v11 = values[node(c->ci + 1, c->cj + 1)];
  return (1 - c->s) * (1 - c->t) * v00 + c->s * (1 - c->t) * v10 + (1 - c->s) * c->t * v01 +
         c->s * c->t * v11;
}

Vec2 Domain2D::interpolate(std::span<const Vec2> values, Vec2 p) const {
  const auto c = locate(p);
  if (!c) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  const Vec2 v00 = values[node(c->ci, c->cj)];
  const Vec2 v10 = values[node(c->ci + 1, c->cj)];
  const Vec2 v01 = values[node(c->ci, c->cj + 1)];
  const Vec2 v11 = values[node(c->ci + 1, c->cj + 1)];
  return (1 - c->s) * (1 - c->t) * v00 + c->s * (1 - c->t) * v10 + (1 - c->s) * c->t * v01 +
         c->s * c->t * v11;
}

DomainPtr make_domain(const DomainShape& shape, int nx, int ny) {
  return std::make_shared<const Domain2D>(shape, nx, ny);
}

// ---------------------------------------------------------------------------
// extrusion

Grid3D::Grid3D(DomainPtr base, int n_layers) : base_(std::move(base)), n_layers_(n_layers) {
  if (!base_) throw InvalidParameter("Grid3D: null base domain");
  if (n_layers < 2) throw InvalidParameter("Grid3D: n_layers must be at least 2");
  hz_ = 1.0 / (n_layers - 1);
}

Grid3D::Face Grid3D::face(int n3d) const {
  const int n = node2d(n3d);
  const int k = layer(n3d);
  switch (base_->tag(n)) {
    case NodeTag::exterior: return Face::exterior;
    case NodeTag::boundary: return Face::lateral;
    case NodeTag::interior: break;
  }
  if (k == 0) return Face::bottom;
  if (k == n_layers_ - 1) return Face::top;
  return Face::interior;
}

std::vector<int> Grid3D::lateral_nodes() const {
  std::vector<int> out;
  for (const auto& loop : base_->loops()) {
    for (int k = 0; k < n_layers_; ++k) {
      for (int n : loop.nodes) out.push_back(node(n, k));
    }
  }
  return out;
}

Grid3D extrude(DomainPtr domain, int n_layers) { return Grid3D(std::move(domain), n_layers); }

// ---------------------------------------------------------------------------
// boundary data

BoundaryDatum power_law_datum(const DomainPtr& domain, int d) {
  BoundaryDatum g{domain, std::vector<Vec2>(domain->node_count(), Vec2{1.0, 0.0}), d};
  const Vec2 c = domain->centroid();
  for (int n : domain->boundary_nodes()) {
    const Vec2 q = domain->shape().project(domain->position(n)) - c;
    const double theta = std::atan2(q.y, q.x);
    g.values[n] = {std::cos(d * theta), std::sin(d * theta)};
  }
  return g;
}

BoundaryDatum constant_datum(const DomainPtr& domain, double alpha) {
  return {domain, std::vector<Vec2>(domain->node_count(), Vec2{std::cos(alpha), std::sin(alpha)}),
          0, alpha};
}

BoundaryDatum conjugate(const BoundaryDatum& g) {
  BoundaryDatum out = g;
  for (auto& v : out.values) v.y = -v.y;
  if (out.power_law_degree) out.power_law_degree = -*out.power_law_degree;
  out.phase = -out.phase;
  return out;
}

BoundaryDatum rotated(const BoundaryDatum& g, double alpha) {
  BoundaryDatum out = g;
  const double c = std::cos(alpha), s = std::sin(alpha);
  for (auto& v : out.values) v = {c * v.x - s * v.y, s * v.x + c * v.y};
  out.phase += alpha;
  return out;
}

Vec2 BoundaryDatum::eval(Vec2 x) const {
  if (!power_law_degree) throw InvalidParameter("BoundaryDatum::eval needs a power-law datum");
  const Vec2 q = x - domain->centroid();
  const double th = *power_law_degree * std::atan2(q.y, q.x) + phase;
  return {std::cos(th), std::sin(th)};
}

double BoundaryDatum::twist(Vec2 x, Vec2 tau) const {
  if (!power_law_degree) throw InvalidParameter("BoundaryDatum::twist needs a power-law datum");
  const Vec2 q = x - domain->centroid();
  return *power_law_degree * cross(q, tau) / norm2(q);
}

int datum_degree(const BoundaryDatum& g) {
  const auto& loop = g.domain->outer_loop();
  double total = 0.0;
  const std::size_t m = loop.nodes.size();
  for (std::size_t k = 0; k < m; ++k) {
    total += angle_between(g.at(loop.nodes[k]), g.at(loop.nodes[(k + 1) % m]));
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

}  // namespace thinslab
