#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsvda/interpolant.hpp"
#include "nsvda/spectral_ops.hpp"
#include "nsvda/time_integration.hpp"

namespace nsvda {

struct PropertyResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      ///< largest observed defect (relative unless stated)
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyOptions {
  int n = 64;
  int fields = 50;
  std::uint64_t seed = 2024;
  BilinearFn bilinear = nonlinear_term;
  bool interpolants = true;
  bool taylor_green = true;
};

/// B with a sign error in the advecting velocity: uses (u_x, -u_y).
VelocityField mutated_nonlinear_term(const VelocityField& u, const VelocityField& v);

/// P(P a) = P a on random, not divergence-free fields.
PropertyResult check_projector(int n, int fields, std::uint64_t seed);

/// <B(u,v),w> + <B(u,w),v> = 0 and <B(v,v),v> = 0.
PropertyResult check_skew_symmetry(const BilinearFn& b, int n, int fields, std::uint64_t seed);

/// <B(w,w),Aw> = 0.
PropertyResult check_orthogonality(const BilinearFn& b, int n, int fields, std::uint64_t seed);

/// <B(u,w),Aw> + <B(w,u),Aw> + <B(w,w),Au> = 0.
PropertyResult check_jacobi(const BilinearFn& b, int n, int fields, std::uint64_t seed);

/// lambda1 ||u||^2 <= ||grad u||^2 and lambda1 ||grad u||^2 <= ||Lap u||^2.
PropertyResult check_poincare(int n, int fields, std::uint64_t seed);

struct TaylorGreenResult {
  double relative_error = 0.0;
  double seconds = 0.0;
};

/// Unforced decay of the Taylor-Green vortex against exp(-8 pi^2 nu t) u0.
TaylorGreenResult taylor_green_decay(int n, double nu, double dt, double t, Scheme scheme);

struct InterpolantCheck {
  InterpolantKind kind{};
  std::vector<double> c1_per_seed;
  double spread = 0.0;  ///< (max - min) / mean over seeds
  int fresh_fields = 0;
  int violations = 0;   ///< fresh fields with ratio > certified c1
};

/// Certifies c1 for each seed, then counts violations of the smallest
/// certified constant on `fresh` new fields.
InterpolantCheck check_interpolant(InterpolantKind kind, double h, int n,
                                   const std::vector<std::uint64_t>& seeds, int fresh,
                                   std::uint64_t fresh_seed);

/// Everything above with pass/fail against the library's tolerances.
std::vector<PropertyResult> run_property_suite(const VerifyOptions& opt);

}  // namespace nsvda
