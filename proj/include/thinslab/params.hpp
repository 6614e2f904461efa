#pragma once

#include <optional>
#include <span>
#include <vector>

namespace thinslab {

/// Dimensionless scaling regime of the slab: anchoring length eps and
/// relative thickness eta. Immutable once built.
class ScalingParams {
 public:
  /// Throws InvalidParameter unless eps > 0 and eta > 0.
  ScalingParams(double eps, double eta);

  double eps() const { return eps_; }
  double eta() const { return eta_; }

  /// sqrt(2) * eta <= eps. Outside this regime the GL coupling bound
  /// only holds with the factor max(1, 2 eta^2 / eps^2).
  bool bbh_regime() const { return bbh_; }

  /// Physical pair (h, lambda) recovered from (eps, eta): h = eta,
  /// lambda = eta / eps^2.
  double thickness() const { return eta_; }
  double anchoring_strength() const { return eta_ / (eps_ * eps_); }

  /// eta / eps, when the pair came from a linear schedule.
  std::optional<double> slope() const { return slope_; }
  ScalingParams with_slope(double k) const;

 private:
  double eps_;
  double eta_;
  bool bbh_;
  std::optional<double> slope_;
};

/// Physical thin-film parameters to (eps, eta) = (sqrt(h / lambda), h).
ScalingParams from_physical(double h, double lambda);

/// eta = k * eps for each eps; requires 0 < k <= 1/sqrt(2).
std::vector<ScalingParams> linear_schedule(double k, std::span<const double> eps_list);

}  // namespace thinslab
