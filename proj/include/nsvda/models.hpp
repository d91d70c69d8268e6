#pragma once

#include <cstdint>

#include "nsvda/field.hpp"
#include "nsvda/interpolant.hpp"

namespace nsvda {

/// Coefficients of the reference and the assimilating systems.
struct PhysicsParams {
  double nu = 0.05;     ///< viscosity
  double alpha = 0.0;   ///< Voigt length
  double mu = 0.0;      ///< nudging rate
  InterpolantOp interpolant;
  VelocityField forcing;  ///< time independent, divergence free, mean free
  /// Test hook: drop the advection term from both right-hand sides.
  bool nonlinear = true;

  /// Checks signs and the forcing invariants; throws ParameterError.
  void validate() const;
};

struct GrashofReport {
  double g = 0.0;
  double f_l2 = 0.0;
  double lambda1 = 0.0;
};

/// G = ||f|| / (nu^2 lambda1) with lambda1 = 4 pi^2.
GrashofReport grashof(const PhysicsParams& p);

/// P(-(u.grad)u + nu Lap u + f).
VelocityField nse_rhs(const VelocityField& u, const PhysicsParams& p);

/// (I - alpha^2 Lap)^{-1} P(-(v.grad)v + nu Lap v + f + mu (obs - I_h v)), where
/// obs = I_h(u) has already been computed. obs is ignored when mu = 0.
VelocityField voigt_nudged_rhs(const VelocityField& v, const VelocityField& obs,
                               const PhysicsParams& p);

/// Random divergence-free forcing supported on kmin <= |k|/2pi <= kmax,
/// scaled so that the Grashof number equals `grashof` for viscosity nu.
VelocityField band_forcing(const GridSpec& grid, double kmin, double kmax, double grashof,
                           double nu, std::uint64_t seed);

/// (sin 2pi x cos 2pi y, -cos 2pi x sin 2pi y) times amplitude.
VelocityField taylor_green(const GridSpec& grid, double amplitude = 1.0);

}  // namespace nsvda
