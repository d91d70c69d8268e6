#include "nsvda/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsvda/errors.hpp"
#include "nsvda/experiment.hpp"
#include "nsvda/spectral_ops.hpp"

namespace nsvda {
namespace {

// dE/dt at sample i from uniformly spaced values.
double derivative_at(const std::vector<double>& e, std::size_t i, double dt) {
  const std::size_t n = e.size();
  if (n < 5) {
    if (i == 0) return (-3.0 * e[0] + 4.0 * e[1] - e[2]) / (2.0 * dt);
    if (i == n - 1) return (3.0 * e[n - 1] - 4.0 * e[n - 2] + e[n - 3]) / (2.0 * dt);
    return (e[i + 1] - e[i - 1]) / (2.0 * dt);
  }
  const double d = 12.0 * dt;
  if (i == 0) return (-25.0 * e[0] + 48.0 * e[1] - 36.0 * e[2] + 16.0 * e[3] - 3.0 * e[4]) / d;
  if (i == 1) return (-3.0 * e[0] - 10.0 * e[1] + 18.0 * e[2] - 6.0 * e[3] + e[4]) / d;
  if (i == n - 1) {
    return (25.0 * e[n - 1] - 48.0 * e[n - 2] + 36.0 * e[n - 3] - 16.0 * e[n - 4] +
            3.0 * e[n - 5]) / d;
  }
  if (i == n - 2) {
    return (3.0 * e[n - 1] + 10.0 * e[n - 2] - 18.0 * e[n - 3] + 6.0 * e[n - 4] - e[n - 5]) / d;
  }
  return (-e[i + 2] + 8.0 * e[i + 1] - 8.0 * e[i - 1] + e[i - 2]) / d;
}

}  // namespace

std::vector<BalanceSample> energy_balance(const std::vector<VelocityField>& samples, double t0,
                                          double dt, const PhysicsParams& p, bool voigt) {
  if (samples.size() < 3) throw PreconditionError("energy_balance: need at least 3 samples");
  if (!(dt > 0.0)) throw PreconditionError("energy_balance: sampling interval must be > 0");
  const double a2 = voigt ? p.alpha * p.alpha : 0.0;

  std::vector<BalanceSample> out(samples.size());
  std::vector<double> weighted(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Norms nm = norms(samples[i]);
    BalanceSample& s = out[i];
    s.t = t0 + static_cast<double>(i) * dt;
    s.enstrophy = 0.5 * nm.h1 * nm.h1;
    s.energy = 0.5 * nm.l2 * nm.l2 + a2 * s.enstrophy;
    s.injection = inner(p.forcing, samples[i]);
    s.dissipation = p.nu * nm.h1 * nm.h1;
    weighted[i] = s.energy;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].residual = derivative_at(weighted, i, dt) - out[i].injection + out[i].dissipation;
  }
  return out;
}

std::vector<SpectrumBin> energy_spectrum(const VelocityField& u) {
  const GridSpec& g = u.grid();
  // Largest |k| / 2 pi on the half spectrum is n/2 * sqrt(2).
  const int shells = static_cast<int>(std::ceil(g.n() / 2 * std::sqrt(2.0))) + 1;
  std::vector<SpectrumBin> bins(static_cast<std::size_t>(shells));
  for (int m = 0; m < shells; ++m) bins[static_cast<std::size_t>(m)].shell = m;
  for (int r = 0; r < g.n(); ++r) {
    for (int c = 0; c < g.columns(); ++c) {
      const double kappa = std::sqrt(g.k2(r, c)) / kTwoPi;
      const auto m = static_cast<std::size_t>(std::floor(kappa + 0.5));
      const double w = c == 0 ? 1.0 : 2.0;
      bins[m].energy += 0.5 * w * (std::norm(u.x.at(r, c)) + std::norm(u.y.at(r, c)));
    }
  }
  return bins;
}

BallReport ball_monitor(const TwinRunRecord& rec, const GrashofReport& g, double nu) {
  BallReport b;
  b.l2_bound_sq = 2.0 * nu * nu * g.g * g.g;
  b.h1_bound_sq = b.l2_bound_sq * g.lambda1;
  b.samples = rec.size();
  if (b.samples == 0) return b;

  auto ratio = [](double value, double bound) {
    if (bound > 0.0) return value / bound;
    return value > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  std::size_t l2_bad = 0, h1_bad = 0;
  for (std::size_t i = 0; i < b.samples; ++i) {
    const double l2_sq = 2.0 * rec.energy_u[i];
    const double h1_sq = 2.0 * rec.enstrophy_u[i];
    const double rl = ratio(l2_sq, b.l2_bound_sq);
    const double rh = ratio(h1_sq, b.h1_bound_sq);
    b.max_l2_ratio = std::max(b.max_l2_ratio, rl);
    b.max_h1_ratio = std::max(b.max_h1_ratio, rh);
    if (rl > 1.0) ++l2_bad;
    if (rh > 1.0) ++h1_bad;
  }
  b.l2_violation_fraction = static_cast<double>(l2_bad) / static_cast<double>(b.samples);
  b.h1_violation_fraction = static_cast<double>(h1_bad) / static_cast<double>(b.samples);
  b.decaying = rec.energy_u.back() < rec.energy_u.front();
  return b;
}

}  // namespace nsvda
