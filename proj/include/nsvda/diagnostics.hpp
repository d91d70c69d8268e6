#pragma once

#include <vector>

#include "nsvda/field.hpp"
#include "nsvda/models.hpp"

namespace nsvda {

struct TwinRunRecord;

struct BalanceSample {
  double t = 0.0;
  double energy = 0.0;     ///< 1/2 ||u||^2, plus 1/2 alpha^2 ||grad u||^2 when weighted
  double enstrophy = 0.0;  ///< 1/2 ||grad u||^2
  double injection = 0.0;  ///< (f, u)
  double dissipation = 0.0;
  double residual = 0.0;   ///< dE/dt - injection + dissipation
};

/// Energy budget of a uniformly sampled trajectory of the unnudged system.
///
/// dE/dt uses fourth-order finite differences (one-sided near the ends;
/// second order when there are fewer than 5 samples), so with one sample per
/// step the residual measures the time stepper's own consistency error. With
/// voigt set the energy carries the alpha^2 ||grad u||^2 term of the
/// regularized system. Nudging is not part of the budget. Throws PreconditionError for fewer than 3 samples.
std::vector<BalanceSample> energy_balance(const std::vector<VelocityField>& samples, double t0,
                                          double dt, const PhysicsParams& p, bool voigt);

struct SpectrumBin {
  int shell = 0;        ///< m: 2 pi (m - 1/2) <= |k| < 2 pi (m + 1/2)
  double energy = 0.0;  ///< sum of 1/2 |u(k)|^2 over the shell
};

/// Shell-summed kinetic energy spectrum; sums to 1/2 ||u||^2.
std::vector<SpectrumBin> energy_spectrum(const VelocityField& u);

struct BallReport {
  double l2_bound_sq = 0.0;  ///< 2 nu^2 G^2
  double h1_bound_sq = 0.0;  ///< 2 nu^2 lambda1 G^2
  double l2_violation_fraction = 0.0;
  double h1_violation_fraction = 0.0;
  double max_l2_ratio = 0.0;  ///< max ||u||^2 / bound (inf when the bound is 0 and u is not)
  double max_h1_ratio = 0.0;
  std::size_t samples = 0;
  /// Final ||u||^2 below the first one; the only meaningful check for G = 0.
  bool decaying = false;
};

/// Checks the truth's recorded norms against the absorbing-ball radii.
/// Advisory: every sample of a record is taken after spinup.
BallReport ball_monitor(const TwinRunRecord& rec, const GrashofReport& g, double nu);

}  // namespace nsvda
