#include "thinslab/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <numbers>

namespace thinslab {

CoreSample core_energy(double sigma, const ScalingParams& p, const CoreResolution& res,
                       const SolveOptions& opts, double rotation) {
  if (!(sigma > 0.0)) throw InvalidParameter("core_energy: sigma must be positive");
  if (res.n_layers < 2) throw InvalidParameter("core_energy: need at least 2 layers");
  int nx = res.nx;
  if (nx <= 0) {
    if (!(res.cells_per_eps >= 4.0)) {
      throw ResolutionError("core_energy: cells_per_eps must be at least 4");
    }
    nx = static_cast<int>(std::ceil(2.0 * sigma * res.cells_per_eps / p.eps() - 1e-9));
    nx = std::max(nx, 16);
  }
  const double h = 2.0 * sigma / nx;
  if (p.eps() / h < 4.0 - 1e-9) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "core_energy: eps = %g spans %.2f cells (h = %g); at least 4 required",
                  p.eps(), p.eps() / h, h);
    throw ResolutionError(buf);
  }
  const DomainPtr dom = make_domain(DomainShape::disk(sigma), nx, nx);
  const Grid3D grid(dom, res.n_layers);
  BoundaryDatum g = power_law_datum(dom, 1);
  if (rotation != 0.0) g = rotated(g, rotation);
  const DirectorField init = initial_director(grid, g, opts.seed, opts.init_noise);
  auto [U, report] = minimize_full(init, g, p, opts);
  CoreSample s;
  s.sigma = sigma;
  s.params = p;
  s.gamma_value = report.final_energy.total;
  s.tilde_gamma = s.gamma_value - std::numbers::pi * std::log(sigma / p.eps());
  s.report = std::move(report);
  s.nx = nx;
  return s;
}

CoreConstant core_constant(double k, const std::vector<std::pair<double, double>>& ladder,
                           const CoreResolution& res, const SolveOptions& opts, int threads) {
  if (ladder.empty()) throw InvalidParameter("core_constant: empty ladder");
  if (!(k > 0.0)) throw InvalidParameter("core_constant: k must be positive");
  std::vector<std::pair<double, double>> sorted = ladder;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.first / a.second < b.first / b.second;
  });
  CoreConstant out;
  out.k = k;
  out.samples.resize(sorted.size());
  auto run = [&](std::size_t i) {
    const auto [sigma, eps] = sorted[i];
    out.samples[i] = core_energy(sigma, ScalingParams(eps, k * eps).with_slope(k), res, opts);
  };
  if (threads > 1) {
    for (std::size_t base = 0; base < sorted.size(); base += threads) {
      std::vector<std::future<void>> jobs;
      for (std::size_t i = base; i < std::min(sorted.size(), base + threads); ++i) {
        jobs.push_back(std::async(std::launch::async, run, i));
      }
      for (auto& j : jobs) j.get();
    }
  } else {
    for (std::size_t i = 0; i < sorted.size(); ++i) run(i);
  }
  char buf[200];
  const std::size_t n = out.samples.size();
  if (n == 1) {
    out.gamma = out.samples[0].tilde_gamma;
    out.spread = std::numeric_limits<double>::infinity();
    out.warnings.emplace_back("single ladder entry: plateau spread unknown");
  } else {
    const double a = out.samples[n - 2].tilde_gamma;
    const double b = out.samples[n - 1].tilde_gamma;
    out.gamma = 0.5 * (a + b);
    out.spread = std::abs(b - a) / std::max(std::abs(out.gamma), 1e-300);
    if (out.spread > 0.10) {
      std::snprintf(buf, sizeof buf, "ladder not converged: last two tilde_gamma %.6g, %.6g (spread %.1f%%)",
                    a, b, 100.0 * out.spread);
      out.warnings.emplace_back(buf);
    }
  }
  for (const CoreSample& s : out.samples) {
    if (!s.report.converged) {
      std::snprintf(buf, sizeof buf, "solve at sigma=%g eps=%g stopped at residual %.3e", s.sigma,
                    s.params.eps(), s.report.residual);
      out.warnings.emplace_back(buf);
    }
  }
  return out;
}

std::string core_csv_rows(const CoreConstant& c) {
  std::string out;
  char buf[256];
  for (const CoreSample& s : c.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g\n", c.k, s.sigma, s.params.eps(),
                  s.gamma_value, s.tilde_gamma, s.report.iterations, s.report.residual);
    out += buf;
  }
  return out;
}

}  // namespace thinslab
