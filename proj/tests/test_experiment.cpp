#include <gtest/gtest.h>

#include <cmath>

#include "nsvda/errors.hpp"
#include "nsvda/experiment.hpp"
#include "nsvda/spectral_ops.hpp"

using namespace nsvda;

namespace {

TwinConfig small_config() {
  TwinConfig c;
  c.grid = GridSpec(32);
  c.stepper.t_end = 0.5;
  c.spinup_time = 0.5;
  c.sample_interval = 0.05;
  return c;
}

TwinRunRecord synthetic(const std::function<double(double)>& x, int n = 1001, double dt = 0.01) {
  TwinRunRecord r;
  for (int i = 0; i < n; ++i) {
    const double t = i * dt;
    r.times.push_back(t);
    r.x_t.push_back(x(t));
    r.l2_err.push_back(std::sqrt(x(t)));
    r.h1_err.push_back(2.0 * std::sqrt(x(t)));
    r.h2_err.push_back(4.0 * std::sqrt(x(t)));
  }
  return r;
}

}  // namespace

TEST(Conditions, WorkedExample) {
  // mu = 100, nu = 1, G = 1: M1 = 50 - 4 pi^2, alpha_max = 1 / sqrt(M1).
  PhysicsParams p;
  p.nu = 1.0;
  p.mu = 100.0;
  p.forcing = band_forcing(GridSpec(32), 2.0, 4.0, 1.0, 1.0, 1);
  const ConditionReport r = check_conditions(p, grashof(p), 1.0);
  EXPECT_NEAR(r.m1, 10.52, 5e-3);
  EXPECT_NEAR(r.alpha_max_t2, 0.3083, 5e-4);
  EXPECT_LT(r.m2, r.m1 + 1e-12);
  EXPECT_NEAR(r.h_max, 1.0 / (2.0 * kPi) / (2.0 * r.c1 * std::sqrt(2.0)), 1e-12);
}

TEST(Conditions, UnforcedAndUnderNudged) {
  PhysicsParams p;
  p.nu = 0.05;
  p.mu = 1.0;
  p.forcing = VelocityField(GridSpec(16));
  EXPECT_TRUE(check_conditions(p, grashof(p), 1.0).h_unconstrained);
  p.forcing = band_forcing(GridSpec(16), 2.0, 4.0, 50.0, 0.05, 1);
  const ConditionReport r = check_conditions(p, grashof(p), 1.0);
  EXPECT_LT(r.m1, 0.0);
  EXPECT_TRUE(std::isnan(r.alpha_max_t2));
  EXPECT_FALSE(r.satisfied_t2);
}

TEST(Fit, ExponentialDecayToFloor) {
  const DecayFit f = fit_decay_and_plateau(synthetic([](double t) { return 1e-8 + std::exp(-3 * t); }));
  EXPECT_NEAR(f.rate, 3.0, 0.06);
  EXPECT_NEAR(f.plateau_x, 1e-8, 1e-10);
  EXPECT_NEAR(f.plateau_l2, 1e-4, 1e-6);
  EXPECT_NEAR(f.t_knee, std::log(1e8) / 3.0, 0.02);
}

TEST(Fit, ConstantSeries) {
  const DecayFit f = fit_decay_and_plateau(synthetic([](double) { return 0.25; }));
  EXPECT_EQ(f.rate, 0.0);
  EXPECT_EQ(f.t_knee, 0.0);
  EXPECT_DOUBLE_EQ(f.plateau_l2, 0.5);
}

TEST(Fit, StillDecayingHasNoPlateau) {
  EXPECT_THROW(fit_decay_and_plateau(synthetic([](double t) { return std::exp(-t); })),
               NoPlateauError);
  EXPECT_THROW(fit_decay_and_plateau(synthetic([](double) { return 1.0; }, 5)),
               PreconditionError);
}

TEST(Sweep, SlopeAndPreconditions) {
  EXPECT_NEAR(loglog_slope({1, 2, 4}, {3, 12, 48}), 2.0, 1e-12);
  const TwinConfig c = small_config();
  EXPECT_THROW(alpha_sweep(c, {0.02, 0.04}), PreconditionError);
  EXPECT_THROW(alpha_sweep(c, {0.02, 0.03, 0.04}), PreconditionError);
  EXPECT_THROW(alpha_sweep(c, {0.0, 0.02, 0.08}), PreconditionError);
}

TEST(Config, ValidateNamesKey) {
  TwinConfig c = small_config();
  c.nu = -1.0;
  try {
    c.validate();
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_EQ(e.key(), "physics.nu");
  }
  // Rounded to whole steps.
  EXPECT_NEAR(TwinConfig{}.resolved_spinup_time(), 20.0 / (std::sqrt(2.0) * 0.05 * 50.0), 1e-3);
}

TEST(Twin, DeterministicRecords) {
  const TwinConfig c = small_config();
  const TwinRunRecord a = run_twin(c);
  const TwinRunRecord b = run_twin(c);
  ASSERT_EQ(a.size(), 11u);
  EXPECT_EQ(a.l2_err, b.l2_err);
  EXPECT_EQ(a.energy_u, b.energy_u);
  EXPECT_LT(a.l2_err.back(), a.l2_err.front());
}

TEST(Twin, ResumeMatchesUninterrupted) {
  for (Scheme s : {Scheme::etdrk4, Scheme::imex_cnab2}) {
    TwinConfig c = small_config();
    c.stepper.scheme = s;
    c.mu = 100.0;
    TwinRun full(c);
    full.advance_to(0.5);
    TwinRun first(c);
    first.advance_to(0.25);
    TwinRun second = TwinRun::resume(c, first.checkpoint_fields(), first.step_index());
    second.advance_to(0.5);
    const double scale = norms(full.estimate()).l2;
    EXPECT_LE(norms(second.estimate() - full.estimate()).l2, 1e-12 * scale) << to_string(s);
    EXPECT_LE(norms(second.truth() - full.truth()).l2, 1e-12 * scale) << to_string(s);
  }
}

TEST(Twin, VInitModes) {
  TwinConfig c = small_config();
  c.stepper.t_end = 0.0;
  c.v_init = VInit::perturbed;
  c.v_epsilon = 0.0;
  EXPECT_EQ(run_twin(c).l2_err.front(), 0.0);
  c.v_epsilon = 1e-3;
  const TwinRunRecord r = run_twin(c);
  EXPECT_NEAR(r.l2_err.front() / std::sqrt(2.0 * r.energy_u.front()), 1e-3, 1e-4);
  c.v_init = VInit::zero;
  EXPECT_DOUBLE_EQ(run_twin(c).l2_err.front(), std::sqrt(2.0 * r.energy_u.front()));
}
