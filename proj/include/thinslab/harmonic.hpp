#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thinslab/field.hpp"
#include "thinslab/vortex.hpp"

namespace thinslab {

/// Psi = R + sum_j d_j log|x - a_j| with R the regular harmonic part.
struct PsiSolution {
  ScalarField2D psi;
  ScalarField2D regular;
  double compatibility_residual = 0.0;  // int_{dOmega} dR/dnu ds before correction
  double flux_correction = 0.0;         // constant added to the Neumann data by the solve
  double boundary_mean = 0.0;           // mean of Psi on the boundary after normalization

  /// Psi at an arbitrary point (R interpolated, singular part exact).
  double psi_at(Vec2 x, const DefectSet& defects) const;
  double regular_at(Vec2 x) const;
};

struct CanonicalMap {
  PlanarField u;    // u* at nodes (0 at a node that coincides with a defect)
  ScalarField2D phi;  // harmonic phase correction
};

struct RenormalizedReport {
  double w_closed = 0.0;
  double pair_term = 0.0;
  double boundary_term = 0.0;
  double regular_term = 0.0;
  std::optional<double> w_limit;
  std::vector<std::pair<double, double>> sigma_samples;  // (sigma, truncated energy + pi sum d^2 log sigma)
  double compatibility_residual = 0.0;
};

/// Point on the exact boundary with outward normal and quadrature weight.
struct BoundaryNodeSample {
  Vec2 point;
  Vec2 normal;
  double weight = 0.0;
  double twist = 0.0;  // g x dg/dtau
};

/// Solver for the harmonic problems attached to a fixed (domain, g):
/// the Neumann problem for R and the Dirichlet problem for the phase of
/// the canonical map. Boundary nodes carry quadratic extrapolation rows
/// along the normal through their projection, and both sparse matrices
/// are factorized once and reused for every defect configuration.
class HarmonicSolver {
 public:
  HarmonicSolver(DomainPtr domain, BoundaryDatum g);
  ~HarmonicSolver();
  HarmonicSolver(const HarmonicSolver&) = delete;
  HarmonicSolver& operator=(const HarmonicSolver&) = delete;

  const Domain2D& domain() const { return *domain_; }
  const BoundaryDatum& datum() const { return g_; }
  int degree() const { return degree_; }
  const std::vector<BoundaryNodeSample>& boundary_quadrature() const { return quad_; }

  PsiSolution solve_psi(const DefectSet& defects) const;
  CanonicalMap canonical_map(const DefectSet& defects) const;
  /// Closed form only (cheap, used by the optimizer).
  RenormalizedReport closed_form(const DefectSet& defects) const;
  /// Closed form plus the truncated-energy limit.
  RenormalizedReport renormalized_energy(const DefectSet& defects) const;

  /// (1/2) int over Omega minus sigma-disks of |Du*|^2 + pi sum d^2 log sigma.
  double truncated_energy(const DefectSet& defects, const CanonicalMap& cmap, double sigma) const;

 private:
  void check(const DefectSet& defects) const;

  DomainPtr domain_;
  BoundaryDatum g_;
  int degree_ = 0;
  std::vector<BoundaryNodeSample> quad_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

PsiSolution solve_psi(const DomainPtr& domain, const DefectSet& defects, const BoundaryDatum& g);
PlanarField canonical_map(const DomainPtr& domain, const DefectSet& defects, const BoundaryDatum& g);
RenormalizedReport renormalized_energy(const DomainPtr& domain, const DefectSet& defects,
                                       const BoundaryDatum& g);

struct PatternSearchOptions {
  int n_seeds = 4;
  std::uint64_t seed = 1;
  double initial_step = 0.1;  // relative to the domain diameter
  double min_step = 0.0;      // absolute; 0 means h/4
  int max_evaluations = 4000;
  int threads = 1;
};

struct RenormalizedOptimum {
  std::vector<Vec2> positions;
  double value = 0.0;
  int evaluations = 0;
  std::vector<double> seed_values;  // best value reached from each start
};

/// Compass search on W_g over configurations of n_defects charge +1
/// points; configurations closer than 3h to each other or to the boundary
/// are rejected. Best of all starts is returned.
RenormalizedOptimum minimize_renormalized(const HarmonicSolver& solver, int n_defects,
                                          const PatternSearchOptions& opts = {});
RenormalizedOptimum minimize_renormalized(const DomainPtr& domain, const BoundaryDatum& g,
                                          int n_defects, const PatternSearchOptions& opts = {});

/// W_g (closed form) on a list of configurations; rejected ones get +inf.
std::vector<double> renormalized_landscape(const HarmonicSolver& solver,
                                           const std::vector<std::vector<Vec2>>& configurations);

/// Shortest distance between defects and from defects to the boundary.
double configuration_clearance(const Domain2D& domain, const std::vector<Vec2>& points);

}  // namespace thinslab
