#pragma once

#include <string>
#include <vector>

#include "thinslab/field.hpp"

namespace thinslab {

struct Defect {
  Vec2 position;
  int charge = 0;
};

enum class DefectProvenance { detected, prescribed };

struct DefectSet {
  std::vector<Defect> items;
  DefectProvenance provenance = DefectProvenance::prescribed;
  std::vector<std::string> warnings;

  int total_charge() const;
  std::size_t size() const { return items.size(); }
  /// Rows "x,y,charge" without header.
  std::string to_csv_rows() const;
};

/// j(u) = u1 Du2 - u2 Du1 by centered differences at interior nodes
/// (one-sided next to the boundary); zero on exterior nodes.
std::vector<Vec2> current(const PlanarField& u);

/// Ju = curl j(u) on cells: the circulation of the edge current
/// (u_p x u_q per edge) around each active cell divided by its area.
/// Equals 2 det Du exactly for linear u. Indexed ci + nx * cj; inactive
/// cells hold 0.
std::vector<double> jacobian(const PlanarField& u);

/// Winding of u/|u| along a closed node chain, from wrapped angle
/// increments. Throws IllDefinedDegree if |u| < min_modulus on the chain.
int degree_on_loop(const PlanarField& u, const std::vector<int>& loop, double min_modulus = 0.5);
/// (1/2 pi) sum of j(u) . tau over the chain with j evaluated at edge
/// midpoints of the normalized field. Cross-check only; not rounded.
double degree_by_current(const PlanarField& u, const std::vector<int>& loop);

/// Closed chain of domain nodes on the square of half-width `radius`
/// cells around the node nearest to `center`, counterclockwise.
std::vector<int> square_loop(const Domain2D& domain, Vec2 center, int radius);

struct DefectOptions {
  double core_threshold = 0.5;
  int min_cluster_diameter = 3;  // zero-charge clusters smaller than this are dropped
};

/// Plaquettes with nonzero winding or a corner with |u| < core_threshold
/// are grouped by 8-connectivity; each cluster with nonzero net winding is
/// one defect placed at the mean zero of its winding plaquettes.
DefectSet locate_defects(const PlanarField& u, const DefectOptions& opts = {});

}  // namespace thinslab
