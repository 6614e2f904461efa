#include "thinslab/field.hpp"

#include <cmath>

#include "thinslab/error.hpp"

namespace thinslab {

void apply_lateral_datum(DirectorField& U, const BoundaryDatum& g) {
  if (g.domain->node_count() != U.domain().node_count()) {
    throw ShapeError("boundary datum does not match the field grid");
  }
  for (int k = 0; k < U.grid.n_layers(); ++k) {
    for (int n : U.domain().boundary_nodes()) U.at(n, k) = {g.at(n).x, g.at(n).y, 0.0};
  }
}

DirectorField lift(const Grid3D& grid, const PlanarField& u) {
  if (u.domain->node_count() != grid.layer_size()) throw ShapeError("lift: grid mismatch");
  DirectorField U(grid);
  for (int k = 0; k < grid.n_layers(); ++k) {
    for (int n : grid.base().domain_nodes()) U.at(n, k) = {u.values[n].x, u.values[n].y, 0.0};
  }
  return U;
}

DirectorField mirrored(const DirectorField& U) {
  DirectorField out = U;
  for (auto& v : out.values) v.y = -v.y;
  return out;
}

PlanarField mirrored(const PlanarField& u) {
  PlanarField out = u;
  for (auto& v : out.values) v.y = -v.y;
  return out;
}

UnitDefect max_unit_deviation(const DirectorField& U) {
  UnitDefect worst;
  for (int k = 0; k < U.grid.n_layers(); ++k) {
    for (int n : U.domain().domain_nodes()) {
      const int id = U.grid.node(n, k);
      const double dev = std::abs(norm(U.values[id]) - 1.0);
      if (!(dev <= worst.deviation)) {
        worst.deviation = dev;
        worst.node = id;
      }
    }
  }
  return worst;
}

}  // namespace thinslab
