#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nsvda/errors.hpp"
#include "nsvda/fft.hpp"
#include "nsvda/random_fields.hpp"
#include "nsvda/spectral_ops.hpp"

using namespace nsvda;

namespace {

VelocityField rand_field(const GridSpec& g, std::uint64_t seed) {
  Rng rng(seed);
  return random_solenoidal(g, rng, power_law_spectrum(-3.0), 1.0);
}

}  // namespace

TEST(Grid, CutoffAndWavenumbers) {
  EXPECT_EQ(GridSpec(128).cutoff(), 42);
  EXPECT_EQ(GridSpec(64).cutoff(), 21);
  EXPECT_EQ(GridSpec(32).cutoff(), 10);
  const GridSpec g(16);
  EXPECT_EQ(g.columns(), 9);
  EXPECT_EQ(g.ky(9), -7);
  EXPECT_DOUBLE_EQ(g.k2(1, 1), 2.0 * kTwoPi * kTwoPi);
  EXPECT_FALSE(g.retained(0, 0));
  EXPECT_THROW(GridSpec(15), ParameterError);
}

TEST(Fft, RoundTripRandomField) {
  const GridSpec g(32);
  const VelocityField u = rand_field(g, 3);
  const auto values = to_physical(u.x);
  const SpectralField back = from_physical(g, values);
  for (std::size_t i = 0; i < g.modes(); ++i) {
    EXPECT_NEAR(std::abs(back.coeffs()[i] - u.x.coeffs()[i]), 0.0, 1e-15);
  }
}

TEST(Fft, SingleModeAmplitude) {
  // sin(2 pi x) has coefficient -i/2 at kx = 1.
  const GridSpec g(16);
  std::vector<double> values(g.points());
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i) values[j * 16 + i] = std::sin(kTwoPi * i / 16.0);
  const SpectralField f = from_physical(g, values);
  EXPECT_NEAR(f.at(0, 1).real(), 0.0, 1e-15);
  EXPECT_NEAR(f.at(0, 1).imag(), -0.5, 1e-15);
}

TEST(Fft, ParsevalMatchesGridMean) {
  const GridSpec g(32);
  const VelocityField u = rand_field(g, 4);
  const auto x = to_physical(u.x);
  const auto y = to_physical(u.y);
  double mean = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mean += x[i] * x[i] + y[i] * y[i];
  mean /= static_cast<double>(x.size());
  EXPECT_NEAR(norms(u).l2, std::sqrt(mean), 1e-14);
}

TEST(Operators, LerayIdempotentAndDivergenceFree) {
  const GridSpec g(32);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  SpectralField ax(g), ay(g);
  for (auto& c : ax.coeffs()) c = Complex(n(rng), n(rng));
  for (auto& c : ay.coeffs()) c = Complex(n(rng), n(rng));
  ax.enforce_invariants();
  ay.enforce_invariants();
  const VelocityField p = leray_project(ax, ay);
  EXPECT_LT(divergence_ratio(p), 1e-13);
  const VelocityField pp = leray_project(p);
  EXPECT_LT(norms(pp - p).l2, 1e-14 * norms(p).l2);
}

TEST(Operators, HelmholtzInverse) {
  const GridSpec g(32);
  const VelocityField u = rand_field(g, 8);
  const VelocityField back = helmholtz_apply(helmholtz_invert(u, 0.05), 0.05);
  EXPECT_LT(norms(back - u).l2, 1e-14);
  EXPECT_LT(norms(helmholtz_invert(u, 0.0) - u).l2, 1e-16);
}

TEST(Operators, StokesMatchesH1) {
  const GridSpec g(32);
  const VelocityField u = rand_field(g, 9);
  const Norms n = norms(u);
  EXPECT_NEAR(inner(stokes_apply(u), u), n.h1 * n.h1, 1e-12 * n.h1 * n.h1);
  EXPECT_NEAR(norms(stokes_apply(u)).l2, n.h2, 1e-12 * n.h2);
}

TEST(Operators, PoincareOnLowestShell) {
  const GridSpec g(32);
  Rng rng(10);
  const VelocityField u = random_solenoidal(g, rng, band_spectrum(0.5, 1.2), 1.0);
  const Norms n = norms(u);
  EXPECT_NEAR(kLambda1 * n.l2 * n.l2, n.h1 * n.h1, 1e-12 * n.h1 * n.h1);
}

TEST(Bilinear, SkewSymmetryAndOrthogonality) {
  const GridSpec g(32);
  const VelocityField u = rand_field(g, 11), v = rand_field(g, 12), w = rand_field(g, 13);
  EXPECT_NEAR(inner(nonlinear_term(u, v), v), 0.0, 1e-14);
  EXPECT_NEAR(inner(nonlinear_term(u, v), w) + inner(nonlinear_term(u, w), v), 0.0, 1e-13);
  EXPECT_NEAR(inner(nonlinear_term(w, w), stokes_apply(w)), 0.0, 1e-11);
}

TEST(Bilinear, SolenoidalOutputAndLinearity) {
  const GridSpec g(32);
  const VelocityField u = rand_field(g, 14), v = rand_field(g, 15), w = rand_field(g, 16);
  const VelocityField b = nonlinear_term(u, v);
  EXPECT_LT(divergence_ratio(b), 1e-13);
  const VelocityField lhs = nonlinear_term(u, 2.0 * v + w);
  const VelocityField rhs = 2.0 * b + nonlinear_term(u, w);
  EXPECT_LT(norms(lhs - rhs).l2, 1e-13 * norms(lhs).l2);
}

TEST(Bilinear, ShearFlowIsSteady) {
  // u = (sin 2 pi y, 0): (u . grad) u = 0.
  const GridSpec g(32);
  VelocityField u(g);
  u.x.at(1, 0) = Complex(0.0, -0.5);
  u.x.at(31, 0) = Complex(0.0, 0.5);
  EXPECT_LT(norms(nonlinear_term(u, u)).l2, 1e-15);
}

TEST(Field, GridMismatchThrows) {
  VelocityField a(GridSpec(16)), b(GridSpec(32));
  EXPECT_THROW(a += b, StructuralError);
  EXPECT_THROW(inner(a, b), StructuralError);
}
