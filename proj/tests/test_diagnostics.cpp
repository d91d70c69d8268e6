#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "nsvda/diagnostics.hpp"
#include "nsvda/errors.hpp"
#include "nsvda/experiment.hpp"
#include "nsvda/random_fields.hpp"
#include "nsvda/spectral_ops.hpp"

using namespace nsvda;

namespace {

VelocityField initial(const GridSpec& g) {
  Rng rng(5);
  return random_solenoidal(g, rng, power_law_spectrum(-3.0), 1.0);
}

std::vector<VelocityField> unforced_trajectory(const PhysicsParams& p, double dt, double t,
                                               bool voigt) {
  const GridSpec& g = p.forcing.grid();
  TwinStepper s(p, StepperConfig{dt, Scheme::etdrk4, t});
  VelocityField u = initial(g), v = initial(g);
  std::vector<VelocityField> out{voigt ? v : u};
  const long n = std::lround(t / dt);
  for (long k = 0; k < n; ++k) {
    s.step(u, v, k * dt);
    out.push_back(voigt ? v : u);
  }
  return out;
}

double worst_relative_residual(const std::vector<BalanceSample>& b) {
  double worst = 0.0;
  for (const auto& s : b) worst = std::max(worst, std::abs(s.residual) / s.dissipation);
  return worst;
}

}  // namespace

TEST(Spectrum, SumsToEnergy) {
  const GridSpec g(32);
  const VelocityField u = initial(g);
  double total = 0.0;
  for (const auto& b : energy_spectrum(u)) total += b.energy;
  EXPECT_NEAR(total, 0.5 * std::pow(norms(u).l2, 2), 1e-15);
}

TEST(Spectrum, TaylorGreenSitsInShellOne) {
  const auto s = energy_spectrum(taylor_green(GridSpec(16)));
  EXPECT_NEAR(s.at(1).energy, 0.25, 1e-15);
  for (const auto& b : s)
    if (b.shell != 1) EXPECT_LT(b.energy, 1e-30);
}

TEST(Ball, FlagsOversizedTruth) {
  TwinRunRecord r;
  const GrashofReport g{10.0, 0.0, kLambda1};
  const double nu = 0.1;
  const double bound = 2.0 * nu * nu * 100.0;
  for (int i = 0; i < 10; ++i) {
    r.times.push_back(i);
    const double l2sq = i < 5 ? 0.5 * bound : 10.0 * bound;
    r.energy_u.push_back(0.5 * l2sq);
    r.enstrophy_u.push_back(0.5 * kLambda1 * l2sq);
  }
  const BallReport b = ball_monitor(r, g, nu);
  EXPECT_DOUBLE_EQ(b.l2_bound_sq, bound);
  EXPECT_DOUBLE_EQ(b.l2_violation_fraction, 0.5);
  EXPECT_NEAR(b.max_l2_ratio, 10.0, 1e-12);
  EXPECT_FALSE(b.decaying);
}

TEST(Balance, UnforcedNse) {
  const GridSpec g(32);
  PhysicsParams p;
  p.nu = 0.01;
  p.forcing = VelocityField(g);
  const auto b = energy_balance(unforced_trajectory(p, 1e-3, 0.1, false), 0.0, 1e-3, p, false);
  EXPECT_LE(worst_relative_residual(b), 1e-3);
  const auto b2 = energy_balance(unforced_trajectory(p, 2e-3, 0.1, false), 0.0, 2e-3, p, false);
  EXPECT_GT(worst_relative_residual(b2) / worst_relative_residual(b), 8.0);
}

TEST(Balance, VoigtNeedsAlphaTerm) {
  const GridSpec g(32);
  PhysicsParams p;
  p.nu = 0.01;
  p.alpha = 0.05;
  p.forcing = VelocityField(g);
  const auto traj = unforced_trajectory(p, 1e-3, 0.1, true);
  EXPECT_LE(worst_relative_residual(energy_balance(traj, 0.0, 1e-3, p, true)), 1e-3);
  EXPECT_GT(worst_relative_residual(energy_balance(traj, 0.0, 1e-3, p, false)), 0.1);
}

TEST(Balance, NeedsThreeSamples) {
  const GridSpec g(16);
  PhysicsParams p;
  p.forcing = VelocityField(g);
  EXPECT_THROW(energy_balance({VelocityField(g), VelocityField(g)}, 0.0, 1.0, p, false),
               PreconditionError);
}
