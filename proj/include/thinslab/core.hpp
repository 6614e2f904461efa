#pragma once

#include <string>
#include <utility>
#include <vector>

#include "thinslab/solver.hpp"

namespace thinslab {

/// Grid for the cell problem on disk(sigma) x (0, 1). The in-plane spacing
/// is eps / cells_per_eps unless nx is given explicitly.
struct CoreResolution {
  double cells_per_eps = 4.0;
  int nx = 0;
  int n_layers = 8;
};

struct CoreSample {
  double sigma = 0.0;
  ScalingParams params{1.0, 1.0};
  double gamma_value = 0.0;   // minimal energy of the cell problem
  double tilde_gamma = 0.0;   // gamma_value - pi log(sigma / eps)
  SolveReport report;
  int nx = 0;
};

/// Minimizes F_eps on disk(sigma) x (0, 1) with lateral data (e^{i alpha} x/|x|, 0).
/// Throws ResolutionError when fewer than 4 cells span eps.
CoreSample core_energy(double sigma, const ScalingParams& p, const CoreResolution& res = {},
                       const SolveOptions& opts = {}, double rotation = 0.0);

struct CoreConstant {
  double k = 0.0;
  double gamma = 0.0;   // mean of the last two tilde_gamma values
  double spread = 0.0;  // relative difference of the last two (inf for a single entry)
  std::vector<CoreSample> samples;
  std::vector<std::string> warnings;
};

/// tilde_gamma along a ladder of (sigma, eps) pairs with eta = k eps,
/// ordered by increasing sigma / eps. Plateaus wider than 10% produce a
/// warning; the samples are always returned.
CoreConstant core_constant(double k, const std::vector<std::pair<double, double>>& ladder,
                           const CoreResolution& res = {}, const SolveOptions& opts = {},
                           int threads = 1);

/// Rows "k,sigma,eps,gamma_value,tilde_gamma,iterations,residual" without header.
std::string core_csv_rows(const CoreConstant& c);

}  // namespace thinslab
