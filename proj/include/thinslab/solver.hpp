#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "thinslab/energy.hpp"
#include "thinslab/error.hpp"

namespace thinslab {

struct SolveOptions {
  int max_iters = 4000;
  double tol_residual = 1e-3;  // discrete L2 norm of the tangential EL residual
  double step_init = 1.0;      // first trial step (preconditioned units)
  double step_shrink = 0.5;
  std::uint64_t seed = 1;
  int progress_every = 0;      // 0 disables progress lines on stderr
  bool precondition = true;
  double init_noise = 1e-2;    // amplitude of the random perturbation of the initial field

  void validate() const;
};

struct SolveReport {
  int iterations = 0;
  EnergyBreakdown final_energy;
  double residual = 0.0;
  std::vector<double> energy_trace;
  bool converged = false;
  int restarts = 0;
};

/// The line search could not decrease the energy any further although the
/// residual is above tolerance. Carries the state reached so far.
class NoProgress : public Error {
 public:
  NoProgress(const std::string& what, SolveReport report, std::vector<Vec3> last = {})
      : Error(what), report_(std::move(report)), last_(std::move(last)) {}
  const SolveReport& report() const { return report_; }
  const std::vector<Vec3>& last_values() const { return last_; }

 private:
  SolveReport report_;
  std::vector<Vec3> last_;
};

/// Degree-d vortex (cos d theta, sin d theta, 0) about the centroid,
/// phase-matched to g, blended linearly onto the north pole within
/// 2 max(hx, hy) of the center, plus seeded noise of amplitude `noise`
/// (then renormalized). Lateral nodes carry (g, 0).
DirectorField initial_director(const Grid3D& grid, const BoundaryDatum& g, std::uint64_t seed,
                               double noise = 1e-2);
PlanarField initial_planar(const DomainPtr& domain, const BoundaryDatum& g, std::uint64_t seed,
                           double noise = 1e-2);

/// Inverse of the quadratic part of F (horizontal Dirichlet form, vertical
/// coupling, anchoring) on the free nodes, applied component-wise.
/// Vertical modes are diagonalized exactly, leaving one sparse 2D
/// factorization per mode.
class SlabPreconditioner {
 public:
  SlabPreconditioner(const Grid3D& grid, const ScalingParams& p);
  ~SlabPreconditioner();
  SlabPreconditioner(const SlabPreconditioner&) = delete;
  SlabPreconditioner& operator=(const SlabPreconditioner&) = delete;

  /// out = H^{-1} r on free nodes, zero elsewhere.
  void apply(std::span<const Vec3> r, std::vector<Vec3>& out) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Projected nonlinear conjugate gradients with an Armijo line search on
/// F_eps over unit fields with lateral data (g, 0).
std::pair<DirectorField, SolveReport> minimize_full(const DirectorField& init,
                                                    const BoundaryDatum& g,
                                                    const ScalingParams& p,
                                                    const SolveOptions& opts);

/// Nonlinear conjugate gradients on GL_eps with Dirichlet data g.
std::pair<PlanarField, SolveReport> minimize_gl(const PlanarField& init, const BoundaryDatum& g,
                                                double eps, const SolveOptions& opts);

/// sqrt(sum |(I - U (x) U) dF/dU_n|^2 / m_n) over free nodes (interior and
/// top/bottom faces), m_n the nodal quadrature weight.
double el_residual(const DirectorField& U, const ScalingParams& p);
/// Same for GL_eps (no projection).
double gl_residual(const PlanarField& u, double eps);

struct GradientCheckReport {
  double bulk_derivative = 0.0;       // B'(0)
  double anchoring_derivative = 0.0;  // Gamma'(0)
  double derivative = 0.0;            // B'(0) + Gamma'(0)
  std::vector<double> steps;
  std::vector<double> finite_difference;
  std::vector<double> mismatch;       // |fd - derivative| / |derivative| (absolute when derivative = 0)
  std::vector<double> orders;         // log ratios between consecutive steps
  double observed_order = 0.0;        // least-squares slope of log mismatch vs log step
};

/// Compares the assembled first variation along V(t) = (U + t phi)/|U + t phi|
/// with central differences of the energy. phi must be tangential to U and
/// vanish on the lateral boundary.
GradientCheckReport gradient_check(const DirectorField& U, const ScalingParams& p,
                                   std::span<const Vec3> phi, std::span<const double> steps);

}  // namespace thinslab
