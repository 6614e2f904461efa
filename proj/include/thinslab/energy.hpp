#pragma once

#include <optional>
#include <span>
#include <vector>

#include "thinslab/field.hpp"
#include "thinslab/params.hpp"

namespace thinslab {

/// Contributions to the slab energy
///   F = 1/2 int_Q |grad_eps U|^2 + 1/(2 eps^2) int_{Omega x {0,1}} (U . nu)^2.
/// bulk_vertical already carries the 1/eta^2 factor, anchoring the
/// 1/(2 eps^2) factor.
struct EnergyBreakdown {
  double bulk_horizontal = 0.0;
  double bulk_vertical = 0.0;
  double anchoring = 0.0;
  double total = 0.0;
};

// Quadrature: in-plane gradients are edge differences averaged over the
// active cells sharing the edge, nodal terms use dual-cell areas, x3 uses
// the trapezoid rule. Reductions run sequentially in node order, so
// results are bitwise reproducible.

EnergyBreakdown energy_full(const DirectorField& U, const ScalingParams& p);

/// Energy of U on A x (0, 1) and A x {0, 1}, with A a set of 2D domain
/// nodes. Edge terms are split evenly between their end nodes, so the
/// restriction is additive over disjoint node sets.
EnergyBreakdown energy_restricted(const DirectorField& U, const ScalingParams& p,
                                  std::span<const int> nodes);

/// energy_full plus its gradient with respect to every nodal value
/// (zero on exterior nodes). `grad` is resized as needed.
EnergyBreakdown energy_and_gradient(const DirectorField& U, const ScalingParams& p,
                                    std::vector<Vec3>& grad);

/// int_0^1 Pi(U) dx3 by the trapezoid rule, column by column.
PlanarField vertical_average(const DirectorField& U);

/// (1/2) int_Omega |Du|^2 of a planar field.
double planar_dirichlet(const PlanarField& u);
/// (1/2) int_Q |Du|^2, u = Pi(U), horizontal derivatives only.
double planar_dirichlet(const DirectorField& U);
/// int_Q |dU/dx3|^2 (no 1/eta^2 factor).
double vertical_gradient_norm2(const DirectorField& U);

/// GL_eps(u) = int (1/2)|Du|^2 + (1/(4 eps^2)) (1 - |u|^2)^2.
double gl_energy(const PlanarField& u, double eps);
double gl_energy_and_gradient(const PlanarField& u, double eps, std::vector<Vec2>& grad);

/// Tolerance used by the inequality checks: rel * |rhs| + abs. Both parts
/// are reported next to the verdict.
struct Slack {
  double rel = 1e-6;
  double abs = 0.0;
  double of(double rhs) const;
};
/// Default slack for a grid: relative 1e-6, absolute 1e-3 * h^2.
Slack default_slack(const Domain2D& domain);

struct GlBoundReport {
  double lhs = 0.0;          // GL_eps(u_bar)
  double rhs = 0.0;          // F_eps(U), scaled by max(1, 2 eta^2/eps^2) outside the regime
  double factor = 1.0;
  Slack slack;
  bool holds = false;
  // sharper bound GL_eps(u_bar) + c*/(2 eta^2) int |d3 U|^2 <= F_eps(U),
  // evaluated when c* is given and 2 eta^2 <= (1 - c*) eps^2
  std::optional<double> strict_lhs;
  std::optional<bool> strict_holds;
};

GlBoundReport check_gl_bound(const DirectorField& U, const ScalingParams& p,
                             std::optional<double> c_star = std::nullopt);

struct AverageBoundReport {
  std::vector<double> layer_distance;  // ||u_bar - u(., x3_k)||_{L2(Omega)}
  double rhs = 0.0;                    // (1/sqrt 2) ||dU/dx3||_{L2(Q)}
  double max_ratio = 0.0;              // max_k layer_distance / ||dU/dx3|| (0 if both vanish)
  Slack slack;
  bool holds = false;
};

AverageBoundReport check_average_bound(const DirectorField& U);

}  // namespace thinslab
