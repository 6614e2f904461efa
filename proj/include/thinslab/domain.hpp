#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thinslab/vec.hpp"

namespace thinslab {

enum class DomainKind { disk, rectangle, annulus };

std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& name);

/// Exact (continuous) shape of the cross-section, centered at the origin.
struct DomainShape {
  DomainKind kind = DomainKind::disk;
  double a = 1.0;  // disk: radius; rectangle: width; annulus: inner radius
  double b = 0.0;  // rectangle: height; annulus: outer radius

  static DomainShape disk(double radius) { return {DomainKind::disk, radius, 0.0}; }
  static DomainShape rectangle(double width, double height) {
    return {DomainKind::rectangle, width, height};
  }
  static DomainShape annulus(double r_in, double r_out) {
    return {DomainKind::annulus, r_in, r_out};
  }

  /// Negative inside, positive outside, zero on the boundary.
  double signed_distance(Vec2 p) const;
  bool contains(Vec2 p) const { return signed_distance(p) < 0.0; }
  /// Nearest point on the boundary; the outward unit normal there is
  /// written to `normal` when non-null.
  Vec2 project(Vec2 p, Vec2* normal = nullptr) const;
  double exact_area() const;
};

enum class NodeTag : std::uint8_t { exterior, boundary, interior };

/// Weighted grid edge: the in-plane Dirichlet form (1/2) int |Dv|^2 is
/// approximated by sum over edges of weight * |v[q] - v[p]|^2.
struct Edge {
  int p;
  int q;
  double weight;
};

/// Closed chain of boundary nodes with the active region on its left:
/// counterclockwise for the outer boundary, clockwise around holes.
struct BoundaryLoop {
  std::vector<int> nodes;
  std::vector<Vec2> projection;  // nearest point of the exact boundary
  std::vector<Vec2> normal;      // outward normal of the domain at `projection`
  std::vector<double> arc;       // cumulative chord length along `projection`
  std::vector<double> weight;    // boundary quadrature weight per chain entry
  double length = 0.0;
  double signed_area = 0.0;      // shoelace area of the node polygon
};

/// Masked Cartesian grid over the bounding box of a DomainShape.
///
/// A cell is active when its center lies inside the exact shape. Nodes
/// that touch at least one active cell belong to the discrete domain;
/// they are interior when all four incident cells are active and boundary
/// otherwise. Boundary nodes carry the lateral Dirichlet data.
class Domain2D {
 public:
  Domain2D(const DomainShape& shape, int nx, int ny);

  const DomainShape& shape() const { return shape_; }
  DomainKind kind() const { return shape_.kind; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int node_cols() const { return nx_ + 1; }
  int node_rows() const { return ny_ + 1; }
  int node_count() const { return node_cols() * node_rows(); }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double h_max() const { return hx_ > hy_ ? hx_ : hy_; }
  Vec2 origin() const { return origin_; }
  Vec2 centroid() const { return {0.0, 0.0}; }

  int node(int i, int j) const { return i + node_cols() * j; }
  int node_i(int n) const { return n % node_cols(); }
  int node_j(int n) const { return n / node_cols(); }
  Vec2 position(int n) const {
    return {origin_.x + hx_ * node_i(n), origin_.y + hy_ * node_j(n)};
  }

  NodeTag tag(int n) const { return tags_[n]; }
  bool in_domain(int n) const { return tags_[n] != NodeTag::exterior; }
  bool is_boundary(int n) const { return tags_[n] == NodeTag::boundary; }
  bool cell_active(int ci, int cj) const;
  Vec2 cell_center(int ci, int cj) const {
    return {origin_.x + hx_ * (ci + 0.5), origin_.y + hy_ * (cj + 0.5)};
  }
  /// Quarter of the area of every active cell touching the node.
  double dual_area(int n) const { return dual_area_[n]; }
  std::span<const double> dual_areas() const { return dual_area_; }

  std::span<const int> domain_nodes() const { return domain_nodes_; }
  std::span<const int> interior_nodes() const { return interior_nodes_; }
  std::span<const int> boundary_nodes() const { return boundary_nodes_; }
  std::span<const Edge> edges() const { return edges_; }
  const std::vector<BoundaryLoop>& loops() const { return loops_; }
  const BoundaryLoop& outer_loop() const { return loops_[outer_loop_]; }

  double area() const { return area_; }

  /// Active cell used to evaluate fields at p, with local coordinates
  /// (s, t). Points outside every active cell fall back to the nearest
  /// active cell and get local coordinates outside [0, 1] (linear
  /// extrapolation).
  struct CellCoord {
    int ci;
    int cj;
    double s;
    double t;
  };
  std::optional<CellCoord> locate(Vec2 p) const;

  /// Bilinear interpolation of a nodal scalar field (see locate()).
  double interpolate(std::span<const double> values, Vec2 p) const;
  Vec2 interpolate(std::span<const Vec2> values, Vec2 p) const;

 private:
  void build_tags();
  void build_edges();
  void build_loops();

  DomainShape shape_;
  int nx_;
  int ny_;
  double hx_;
  double hy_;
  Vec2 origin_;
  std::vector<std::uint8_t> active_;  // per cell
  std::vector<NodeTag> tags_;
  std::vector<double> dual_area_;
  std::vector<int> domain_nodes_;
  std::vector<int> interior_nodes_;
  std::vector<int> boundary_nodes_;
  std::vector<Edge> edges_;
  std::vector<BoundaryLoop> loops_;
  std::size_t outer_loop_ = 0;
  double area_ = 0.0;
};

using DomainPtr = std::shared_ptr<const Domain2D>;

/// Builds the masked grid with nx x ny cells over the bounding box.
/// Requires at least 16 cells per side.
DomainPtr make_domain(const DomainShape& shape, int nx, int ny);

/// Q = Omega x (0, 1) discretized by n_layers node layers in x3.
class Grid3D {
 public:
  enum class Face : std::uint8_t { exterior, interior, lateral, bottom, top };

  Grid3D(DomainPtr base, int n_layers);

  const Domain2D& base() const { return *base_; }
  const DomainPtr& base_ptr() const { return base_; }
  int n_layers() const { return n_layers_; }
  double hz() const { return hz_; }
  int layer_size() const { return base_->node_count(); }
  int node_count() const { return layer_size() * n_layers_; }
  int node(int n2d, int k) const { return n2d + layer_size() * k; }
  int node2d(int n3d) const { return n3d % layer_size(); }
  int layer(int n3d) const { return n3d / layer_size(); }
  /// Trapezoid weight of layer k in x3.
  double layer_weight(int k) const {
    return (k == 0 || k == n_layers_ - 1) ? 0.5 * hz_ : hz_;
  }
  Face face(int n3d) const;
  /// Lateral boundary nodes (boundary chain node x every layer).
  std::vector<int> lateral_nodes() const;

 private:
  DomainPtr base_;
  int n_layers_;
  double hz_;
};

Grid3D extrude(DomainPtr domain, int n_layers);

/// S^1-valued lateral datum g, stored per node of the 2D grid and
/// meaningful on boundary nodes only.
struct BoundaryDatum {
  DomainPtr domain;
  std::vector<Vec2> values;
  std::optional<int> power_law_degree;  // g = e^{i (d theta + phase)} when set
  double phase = 0.0;

  Vec2 at(int n) const { return values[n]; }
  /// Analytic value at a point of the exact boundary; power-law data only.
  Vec2 eval(Vec2 x) const;
  /// g x dg/dtau at a point of the exact boundary with unit tangent tau;
  /// power-law data only.
  double twist(Vec2 x, Vec2 tau) const;
};

/// g = (cos d theta, sin d theta), theta measured about the centroid and
/// evaluated at the nearest boundary point of each boundary node.
BoundaryDatum power_law_datum(const DomainPtr& domain, int d);
/// g = (cos alpha, sin alpha) everywhere on the boundary.
BoundaryDatum constant_datum(const DomainPtr& domain, double alpha = 0.0);
/// (g1, -g2), whose degree is the negative of the degree of g.
BoundaryDatum conjugate(const BoundaryDatum& g);
/// e^{i alpha} g.
BoundaryDatum rotated(const BoundaryDatum& g, double alpha);

/// Degree of the datum along the outer boundary loop.
int datum_degree(const BoundaryDatum& g);

}  // namespace thinslab
