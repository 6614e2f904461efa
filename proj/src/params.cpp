#include "thinslab/params.hpp"

#include <cmath>
#include <string>

#include "thinslab/error.hpp"

namespace thinslab {

namespace {

// Tolerate the round-off of k = 1/sqrt(2) computed by callers.
constexpr double kRegimeSlack = 1e-14;

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

ScalingParams::ScalingParams(double eps, double eta) : eps_(eps), eta_(eta) {
  if (!positive_finite(eps) || !positive_finite(eta)) {
    throw InvalidParameter("ScalingParams: eps and eta must be positive, got eps=" +
                           std::to_string(eps) + " eta=" + std::to_string(eta));
  }
  bbh_ = std::sqrt(2.0) * eta <= eps * (1.0 + kRegimeSlack);
}

ScalingParams ScalingParams::with_slope(double k) const {
  ScalingParams p = *this;
  p.slope_ = k;
  return p;
}

ScalingParams from_physical(double h, double lambda) {
  if (!positive_finite(h) || !positive_finite(lambda)) {
    throw InvalidParameter("from_physical: h and lambda must be positive");
  }
  return ScalingParams(std::sqrt(h / lambda), h);
}

std::vector<ScalingParams> linear_schedule(double k, std::span<const double> eps_list) {
  if (!(k > 0.0) || k > (1.0 / std::sqrt(2.0)) * (1.0 + kRegimeSlack)) {
    throw InvalidParameter("linear_schedule: k must lie in (0, 1/sqrt(2)], got " +
                           std::to_string(k));
  }
  std::vector<ScalingParams> out;
  out.reserve(eps_list.size());
  for (double eps : eps_list) out.push_back(ScalingParams(eps, k * eps).with_slope(k));
  return out;
}

}  // namespace thinslab
