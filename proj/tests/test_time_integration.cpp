#include <gtest/gtest.h>

#include <cmath>

#include "nsvda/errors.hpp"
#include "nsvda/random_fields.hpp"
#include "nsvda/spectral_ops.hpp"
#include "nsvda/time_integration.hpp"
#include "nsvda/verification.hpp"

using namespace nsvda;

namespace {

PhysicsParams forced(const GridSpec& g, double grashof = 50.0) {
  PhysicsParams p;
  p.nu = 0.05;
  p.forcing = band_forcing(g, 2.0, 4.0, grashof, p.nu, 3);
  p.interpolant = InterpolantOp(InterpolantKind::fourier_truncation, 0.125);
  return p;
}

VelocityField initial(const GridSpec& g, std::uint64_t seed = 1) {
  Rng rng(seed);
  return random_solenoidal(g, rng, power_law_spectrum(-3.0), 1.0);
}

VelocityField run_nse(const PhysicsParams& p, Scheme scheme, double dt, double t) {
  StepperConfig cfg{dt, scheme, t};
  NseStepper s(p, cfg);
  VelocityField u = initial(p.forcing.grid());
  const long n = cfg.steps_for(t);
  for (long k = 0; k < n; ++k) s.step(u, k * dt);
  return u;
}

std::pair<VelocityField, VelocityField> run_pair(const PhysicsParams& p, Scheme scheme, double dt,
                                                 double t, const VelocityField& v0) {
  StepperConfig cfg{dt, scheme, t};
  TwinStepper s(p, cfg);
  VelocityField u = initial(p.forcing.grid()), v = v0;
  const long n = cfg.steps_for(t);
  for (long k = 0; k < n; ++k) s.step(u, v, k * dt);
  return {u, v};
}

}  // namespace

TEST(Stepper, IntegratingFactorIsExactOnLinearPart) {
  const GridSpec g(16);
  PhysicsParams p;
  p.nu = 0.1;
  p.forcing = VelocityField(g);
  p.nonlinear = false;
  VelocityField u(g);
  u.x.at(2, 0) = Complex(0.3, -0.1);
  u.x.at(14, 0) = std::conj(u.x.at(2, 0));
  const StepperConfig cfg{0.01, Scheme::if_rk4, 1.0};
  const VelocityField out = step(u, RhsKind::nse, p, std::nullopt, cfg);
  const double factor = std::exp(-p.nu * g.k2(2, 0) * cfg.dt);
  EXPECT_EQ(out.x.at(2, 0), factor * u.x.at(2, 0));
}

TEST(Stepper, TaylorGreenDecay) {
  for (Scheme s : {Scheme::etdrk4, Scheme::if_rk4}) {
    EXPECT_LE(taylor_green_decay(32, 0.01, 1e-3, 0.1, s).relative_error, 1e-8) << to_string(s);
  }
  EXPECT_LE(taylor_green_decay(32, 0.01, 1e-3, 0.1, Scheme::imex_cnab2).relative_error, 1e-6);
}

TEST(Stepper, TemporalOrder) {
  const GridSpec g(32);
  const PhysicsParams p = forced(g);
  auto ratio = [&](Scheme s) {
    const VelocityField a = run_nse(p, s, 4e-3, 0.4);
    const VelocityField b = run_nse(p, s, 2e-3, 0.4);
    const VelocityField c = run_nse(p, s, 1e-3, 0.4);
    return norms(a - b).l2 / norms(b - c).l2;
  };
  EXPECT_NEAR(ratio(Scheme::if_rk4), 16.0, 3.0);
  EXPECT_NEAR(ratio(Scheme::etdrk4), 16.0, 3.0);
  EXPECT_NEAR(ratio(Scheme::imex_cnab2), 4.0, 1.0);
}

TEST(Stepper, BlowUpIsReported) {
  const GridSpec g(16);
  const PhysicsParams p = forced(g, 1e7);
  NseStepper s(p, StepperConfig{0.05, Scheme::if_rk4, 100.0});
  VelocityField u = initial(g);
  EXPECT_THROW(
      {
        for (int k = 0; k < 2000; ++k) s.step(u, k * 0.05);
      },
      BlowUpError);
}

TEST(Stepper, ExplicitNudgingNeedsSmallMuDt) {
  const GridSpec g(16);
  PhysicsParams p = forced(g);
  p.mu = 1000.0;
  EXPECT_THROW(TwinStepper(p, StepperConfig{1e-3, Scheme::if_rk4, 1.0}), ParameterError);
  EXPECT_NO_THROW(TwinStepper(p, StepperConfig{1e-3, Scheme::etdrk4, 1.0}));
}

TEST(Pair, IdenticalStartStaysIdentical) {
  const GridSpec g(32);
  PhysicsParams p = forced(g);
  p.alpha = 0.0;
  const VelocityField u0 = initial(g);
  for (auto [scheme, mu] : {std::pair{Scheme::etdrk4, 1e4}, std::pair{Scheme::if_rk4, 100.0},
                            std::pair{Scheme::imex_cnab2, 100.0}}) {
    p.mu = mu;
    const auto [u, v] = run_pair(p, scheme, 1e-3, 0.5, u0);
    EXPECT_LE(norms(u - v).l2, 1e-13) << to_string(scheme);
  }
}

TEST(Pair, UncoupledMatchesIndependentRunBitwise) {
  const GridSpec g(32);
  PhysicsParams p = forced(g);
  const VelocityField v0 = 0.5 * initial(g, 9);
  const auto [u, v] = run_pair(p, Scheme::etdrk4, 1e-3, 0.2, v0);
  NseStepper s(p, StepperConfig{1e-3, Scheme::etdrk4, 0.2});
  VelocityField w = v0;
  for (long k = 0; k < 200; ++k) s.step(w, k * 1e-3);
  for (std::size_t i = 0; i < g.modes(); ++i) {
    ASSERT_EQ(v.x.coeffs()[i], w.x.coeffs()[i]);
    ASSERT_EQ(v.y.coeffs()[i], w.y.coeffs()[i]);
  }
}

TEST(Pair, CoupledExponentialAgreesWithExplicitNudging) {
  // Exact coupling in the exponential scheme against explicit nudging at a
  // ten times smaller step.
  const GridSpec g(32);
  PhysicsParams p = forced(g);
  p.alpha = 0.02;
  p.mu = 100.0;
  const VelocityField v0(g);
  const auto [ua, va] = run_pair(p, Scheme::etdrk4, 1e-3, 0.3, v0);
  const auto [ub, vb] = run_pair(p, Scheme::if_rk4, 1e-4, 0.3, v0);
  EXPECT_LT(norms(va - vb).l2, 1e-9 * norms(vb).l2);
  EXPECT_LT(norms(ua - ub).l2, 1e-9 * norms(ub).l2);
}

TEST(Pair, CoupledExponentialIsFourthOrder) {
  const GridSpec g(32);
  PhysicsParams p = forced(g);
  p.alpha = 0.02;
  const VelocityField v0(g);
  for (double mu : {100.0, 1e4}) {
    p.mu = mu;
    const VelocityField a = run_pair(p, Scheme::etdrk4, 8e-3, 0.4, v0).second;
    const VelocityField b = run_pair(p, Scheme::etdrk4, 4e-3, 0.4, v0).second;
    const VelocityField c = run_pair(p, Scheme::etdrk4, 2e-3, 0.4, v0).second;
    const double r = norms(a - b).l2 / norms(b - c).l2;
    EXPECT_GT(r, 12.0) << "mu = " << mu;
    EXPECT_LT(r, 20.0) << "mu = " << mu;
  }
}

TEST(Pair, NudgingPullsEstimateToTruth) {
  const GridSpec g(32);
  PhysicsParams p = forced(g);
  p.alpha = 0.0;
  p.mu = 1e4;
  const VelocityField v0(g);
  const auto [u, v] = run_pair(p, Scheme::etdrk4, 1e-3, 1.0, v0);
  EXPECT_LT(norms(u - v).l2, 1e-6 * norms(u).l2);
}
