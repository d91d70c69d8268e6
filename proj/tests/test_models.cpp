#include <gtest/gtest.h>

#include <cmath>

#include "nsvda/errors.hpp"
#include "nsvda/interpolant.hpp"
#include "nsvda/models.hpp"
#include "nsvda/random_fields.hpp"
#include "nsvda/spectral_ops.hpp"

using namespace nsvda;

namespace {

PhysicsParams params(const GridSpec& g, double nu, double grashof) {
  PhysicsParams p;
  p.nu = nu;
  p.forcing = band_forcing(g, 2.0, 4.0, grashof, nu, 42);
  return p;
}

VelocityField rand_field(const GridSpec& g, std::uint64_t seed, double exponent = -3.0) {
  Rng rng(seed);
  return random_solenoidal(g, rng, power_law_spectrum(exponent), 1.0);
}

}  // namespace

TEST(Models, ForcingHitsRequestedGrashof) {
  const GridSpec g(32);
  const PhysicsParams p = params(g, 0.05, 50.0);
  EXPECT_NEAR(grashof(p).g, 50.0, 1e-12);
  EXPECT_LT(divergence_ratio(p.forcing), 1e-14);
}

TEST(Models, EnergyLawOfTheRhs) {
  // (nse_rhs(u), u) = (f, u) - nu ||grad u||^2 because (B(u,u), u) = 0.
  const GridSpec g(32);
  const PhysicsParams p = params(g, 0.05, 50.0);
  const VelocityField u = rand_field(g, 1);
  const double expected = inner(p.forcing, u) - p.nu * std::pow(norms(u).h1, 2);
  EXPECT_NEAR(inner(nse_rhs(u, p), u), expected, 1e-12 * std::abs(expected));
}

TEST(Models, VoigtReducesToNse) {
  const GridSpec g(32);
  PhysicsParams p = params(g, 0.05, 50.0);
  const VelocityField v = rand_field(g, 2);
  const VelocityField obs(g);
  EXPECT_LT(norms(voigt_nudged_rhs(v, obs, p) - nse_rhs(v, p)).l2, 1e-14);
}

TEST(Models, VoigtRhsIsHelmholtzSmoothed) {
  const GridSpec g(32);
  PhysicsParams p = params(g, 0.05, 50.0);
  p.alpha = 0.03;
  const VelocityField v = rand_field(g, 3);
  const VelocityField lhs = helmholtz_apply(voigt_nudged_rhs(v, VelocityField(g), p), p.alpha);
  PhysicsParams q = p;
  q.alpha = 0.0;
  EXPECT_LT(norms(lhs - nse_rhs(v, q)).l2, 1e-12 * norms(lhs).l2);
}

TEST(Models, NudgingVanishesWhenObservationMatches) {
  const GridSpec g(32);
  PhysicsParams p = params(g, 0.05, 50.0);
  p.interpolant = InterpolantOp(InterpolantKind::fourier_truncation, 0.125);
  const VelocityField v = rand_field(g, 4);
  PhysicsParams q = p;
  q.mu = 30.0;
  const VelocityField obs = q.interpolant.apply(v);
  EXPECT_LT(norms(voigt_nudged_rhs(v, obs, q) - voigt_nudged_rhs(v, obs, p)).l2, 1e-13);
}

TEST(Models, ValidateRejectsBadParameters) {
  const GridSpec g(16);
  PhysicsParams p = params(g, 0.05, 10.0);
  p.nu = 0.0;
  EXPECT_THROW(p.validate(), ParameterError);
  p.nu = 0.05;
  p.mu = -1.0;
  EXPECT_THROW(p.validate(), ParameterError);
}

TEST(Models, TaylorGreenIsSolenoidalEigenfunction) {
  const GridSpec g(16);
  const VelocityField u = taylor_green(g);
  EXPECT_LT(divergence_ratio(u), 1e-14);
  EXPECT_LT(norms(stokes_apply(u) - (2.0 * kLambda1) * u).l2, 1e-12);
  EXPECT_NEAR(norms(u).l2, std::sqrt(0.5), 1e-15);
}

TEST(Interpolant, Linearity) {
  const GridSpec g(64);
  const VelocityField a = rand_field(g, 5), b = rand_field(g, 6);
  for (auto kind : {InterpolantKind::fourier_truncation, InterpolantKind::nodal_bilinear,
                    InterpolantKind::volume_average}) {
    const InterpolantOp op(kind, 0.125);
    const VelocityField lhs = op.apply(2.0 * a - 3.0 * b);
    const VelocityField rhs = 2.0 * op.apply(a) - 3.0 * op.apply(b);
    EXPECT_LT(norms(lhs - rhs).l2, 1e-14 * norms(lhs).l2) << to_string(kind);
  }
}

TEST(Interpolant, FourierTruncationBound) {
  // Only modes with |k_i| > 2 pi / h are dropped, so the ratio stays below 1 / (2 pi).
  const GridSpec g(64);
  const InterpolantOp op(InterpolantKind::fourier_truncation, 0.125);
  for (std::uint64_t s = 0; s < 20; ++s) {
    EXPECT_LE(bound_ratio(op, rand_field(g, 100 + s, s % 2 ? -1.0 : -3.0)), 1.0 / kTwoPi);
  }
}

TEST(Interpolant, FourierKeepsLowModesExactly) {
  const GridSpec g(64);
  const InterpolantOp op(InterpolantKind::fourier_truncation, 0.125);
  Rng rng(7);
  const VelocityField u = random_solenoidal(g, rng, band_spectrum(0.5, 3.0), 1.0);
  EXPECT_LT(norms(op.apply(u) - u).l2, 1e-15);
  EXPECT_EQ(bound_ratio(op, VelocityField(g)), 0.0);
}

TEST(Interpolant, CertifiedConstantBoundsFreshFields) {
  const GridSpec g(32);
  InterpolantOp op(InterpolantKind::nodal_bilinear, 0.125);
  const Certification c = certify_c1(op, g, 100, 9);
  EXPECT_GE(c.c1, c.corpus_max);
  EXPECT_DOUBLE_EQ(op.c1_certified(), c.c1);
  for (std::uint64_t s = 0; s < 50; ++s) {
    EXPECT_LE(bound_ratio(op, rand_field(g, 500 + s, s % 2 ? -1.0 : -3.0)), c.c1);
  }
}

TEST(Interpolant, AdjointIdentity) {
  const GridSpec g(32);
  const VelocityField a = rand_field(g, 20), b = rand_field(g, 21);
  for (auto kind : {InterpolantKind::nodal_bilinear, InterpolantKind::volume_average}) {
    const InterpolantOp op(kind, 0.125);
    const double lhs = inner(op.apply(a), b);
    const double rhs = inner(a, op.apply_adjoint(b));
    EXPECT_NEAR(lhs, rhs, 1e-13 * std::abs(lhs) + 1e-15) << to_string(kind);
  }
}

TEST(Interpolant, LatticeMustAlignWithGrid) {
  const InterpolantOp op(InterpolantKind::nodal_bilinear, 1.0 / 3.0);
  EXPECT_THROW(op.check_grid(GridSpec(32)), ParameterError);
  EXPECT_THROW(InterpolantOp(InterpolantKind::volume_average, 0.0), ParameterError);
}
