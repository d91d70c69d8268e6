#include "nsvda/models.hpp"

#include <cmath>
#include <vector>

#include "nsvda/errors.hpp"
#include "nsvda/fft.hpp"
#include "nsvda/random_fields.hpp"
#include "nsvda/spectral_ops.hpp"

namespace nsvda {

void PhysicsParams::validate() const {
  if (!(nu > 0.0)) throw ParameterError("nu must be > 0");
  if (!(alpha >= 0.0)) throw ParameterError("alpha must be >= 0");
  if (!(mu >= 0.0)) throw ParameterError("mu must be >= 0");
  const double f = norms(forcing).l2;
  if (f > 0.0) {
    const VelocityField proj = leray_project(forcing);
    if (norms(proj - forcing).l2 > 1e-12 * f) {
      throw ParameterError("forcing must be divergence free and mean free");
    }
  }
}

GrashofReport grashof(const PhysicsParams& p) {
  if (!(p.nu > 0.0)) throw ParameterError("grashof: nu must be > 0");
  GrashofReport r;
  r.lambda1 = kLambda1;
  r.f_l2 = norms(p.forcing).l2;
  r.g = r.f_l2 / (p.nu * p.nu * r.lambda1);
  return r;
}

namespace {

// -B(u,u) + nu Lap u + f; all terms already lie in the divergence-free space.
VelocityField momentum(const VelocityField& u, const PhysicsParams& p) {
  require_same_grid(u.grid(), p.forcing.grid(), "forcing");
  VelocityField out = stokes_apply(u);
  out *= -p.nu;
  out += p.forcing;
  if (p.nonlinear) out.axpy(-1.0, nonlinear_term(u, u));
  return out;
}

}  // namespace

VelocityField nse_rhs(const VelocityField& u, const PhysicsParams& p) { return momentum(u, p); }

VelocityField voigt_nudged_rhs(const VelocityField& v, const VelocityField& obs,
                               const PhysicsParams& p) {
  if (!(p.alpha >= 0.0) || !(p.mu >= 0.0)) {
    throw ParameterError("voigt_nudged_rhs: alpha and mu must be >= 0");
  }
  VelocityField out = momentum(v, p);
  if (p.mu > 0.0) {
    require_same_grid(v.grid(), obs.grid(), "voigt_nudged_rhs obs");
    out.axpy(p.mu, obs);
    out.axpy(-p.mu, p.interpolant.apply(v));
  }
  return helmholtz_invert(out, p.alpha);
}

VelocityField band_forcing(const GridSpec& grid, double kmin, double kmax, double grashof,
                           double nu, std::uint64_t seed) {
  if (!(grashof >= 0.0)) throw ParameterError("forcing Grashof number must be >= 0");
  if (grashof == 0.0) return VelocityField(grid);
  Rng rng(seed);
  return random_solenoidal(grid, rng, band_spectrum(kmin, kmax), grashof * nu * nu * kLambda1);
}

VelocityField taylor_green(const GridSpec& grid, double amplitude) {
  const int n = grid.n();
  std::vector<double> ux(grid.points()), uy(grid.points());
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const double x = kTwoPi * ix / n;
      const double y = kTwoPi * iy / n;
      ux[iy * n + ix] = amplitude * std::sin(x) * std::cos(y);
      uy[iy * n + ix] = -amplitude * std::cos(x) * std::sin(y);
    }
  }
  return VelocityField(from_physical(grid, ux), from_physical(grid, uy));
}

}  // namespace nsvda
