#pragma once

#include <span>
#include <vector>

#include "thinslab/domain.hpp"
#include "thinslab/vec.hpp"

namespace thinslab {

/// Unit-vector field U on the nodes of Q. Lateral nodes carry (g, 0);
/// exterior nodes are unused and hold (1, 0, 0).
struct DirectorField {
  Grid3D grid;
  std::vector<Vec3> values;

  explicit DirectorField(Grid3D g) : grid(std::move(g)), values(grid.node_count(), Vec3{1.0, 0.0, 0.0}) {}

  Vec3& at(int n2d, int k) { return values[grid.node(n2d, k)]; }
  const Vec3& at(int n2d, int k) const { return values[grid.node(n2d, k)]; }
  const Domain2D& domain() const { return grid.base(); }
};

/// R^2-valued field on the nodes of Omega (not necessarily unit length).
struct PlanarField {
  DomainPtr domain;
  std::vector<Vec2> values;

  explicit PlanarField(DomainPtr d) : domain(std::move(d)), values(domain->node_count()) {}
};

/// Real field on the nodes of Omega.
struct ScalarField2D {
  DomainPtr domain;
  std::vector<double> values;

  explicit ScalarField2D(DomainPtr d) : domain(std::move(d)), values(domain->node_count(), 0.0) {}
};

/// Copies g onto the lateral nodes of every layer as (g, 0).
void apply_lateral_datum(DirectorField& U, const BoundaryDatum& g);

/// x3-independent field (u, 0) built from a planar field.
DirectorField lift(const Grid3D& grid, const PlanarField& u);

/// (U1, -U2, U3), whose lateral trace has the opposite degree.
DirectorField mirrored(const DirectorField& U);
PlanarField mirrored(const PlanarField& u);

/// Largest | |U| - 1 | over domain nodes, and the node where it occurs.
struct UnitDefect {
  double deviation = 0.0;
  int node = -1;
};
UnitDefect max_unit_deviation(const DirectorField& U);

}  // namespace thinslab
