#include "nsvda/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "nsvda/models.hpp"
#include "nsvda/random_fields.hpp"

namespace nsvda {
namespace {

constexpr double kIdentityTol = 1e-10;
constexpr double kProjectorTol = 1e-12;

VelocityField solenoidal(const GridSpec& g, Rng& rng) {
  return random_solenoidal(g, rng, power_law_spectrum(-3.0), 1.0);
}

SpectralField raw_scalar(const GridSpec& g, Rng& rng) {
  std::normal_distribution<double> normal;
  SpectralField f(g);
  for (auto& c : f.coeffs()) c = Complex(normal(rng), normal(rng));
  f.enforce_invariants();
  return f;
}

PropertyResult make(const std::string& name, double worst, double tol) {
  PropertyResult r;
  r.name = name;
  r.worst = worst;
  r.tolerance = tol;
  r.passed = std::isfinite(worst) && worst <= tol;
  return r;
}

}  // namespace

VelocityField mutated_nonlinear_term(const VelocityField& u, const VelocityField& v) {
  VelocityField flipped = u;
  flipped.y *= -1.0;
  return nonlinear_term(flipped, v);
}

PropertyResult check_projector(int n, int fields, std::uint64_t seed) {
  const GridSpec g(n);
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < fields; ++i) {
    const SpectralField ax = raw_scalar(g, rng);
    const SpectralField ay = raw_scalar(g, rng);
    const VelocityField p1 = leray_project(ax, ay);
    const VelocityField p2 = leray_project(p1);
    worst = std::max(worst, norms(p2 - p1).l2 / norms(p1).l2);
  }
  return make("leray_idempotent", worst, kProjectorTol);
}

PropertyResult check_skew_symmetry(const BilinearFn& b, int n, int fields, std::uint64_t seed) {
  const GridSpec g(n);
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < fields; ++i) {
    const VelocityField u = solenoidal(g, rng);
    const VelocityField v = solenoidal(g, rng);
    const VelocityField w = solenoidal(g, rng);
    const VelocityField buv = b(u, v);
    const VelocityField buw = b(u, w);
    const double scale = norms(buv).l2 * norms(w).l2 + norms(buw).l2 * norms(v).l2;
    worst = std::max(worst, std::abs(inner(buv, w) + inner(buw, v)) / scale);
    const VelocityField bvv = b(v, v);
    worst = std::max(worst, std::abs(inner(bvv, v)) / (norms(bvv).l2 * norms(v).l2));
  }
  return make("bilinear_skew_symmetry", worst, kIdentityTol);
}

PropertyResult check_orthogonality(const BilinearFn& b, int n, int fields, std::uint64_t seed) {
  const GridSpec g(n);
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < fields; ++i) {
    const VelocityField w = solenoidal(g, rng);
    const VelocityField bww = b(w, w);
    const VelocityField aw = stokes_apply(w);
    worst = std::max(worst, std::abs(inner(bww, aw)) / (norms(bww).l2 * norms(aw).l2));
  }
  return make("enstrophy_orthogonality", worst, kIdentityTol);
}

PropertyResult check_jacobi(const BilinearFn& b, int n, int fields, std::uint64_t seed) {
  const GridSpec g(n);
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < fields; ++i) {
    const VelocityField u = solenoidal(g, rng);
    const VelocityField w = solenoidal(g, rng);
    const VelocityField aw = stokes_apply(w);
    const VelocityField au = stokes_apply(u);
    const VelocityField buw = b(u, w);
    const VelocityField bwu = b(w, u);
    const VelocityField bww = b(w, w);
    const double sum = inner(buw, aw) + inner(bwu, aw) + inner(bww, au);
    const double scale = norms(buw).l2 * norms(aw).l2 + norms(bwu).l2 * norms(aw).l2 +
                         norms(bww).l2 * norms(au).l2;
    worst = std::max(worst, std::abs(sum) / scale);
  }
  return make("jacobi_identity", worst, kIdentityTol);
}

PropertyResult check_poincare(int n, int fields, std::uint64_t seed) {
  const GridSpec g(n);
  Rng rng(seed);
  // Worst value of lambda1 ||u||^2 / ||grad u||^2 and lambda1 ||grad u||^2 / ||Lap u||^2;
  // both must stay <= 1.
  double worst = 0.0;
  for (int i = 0; i < fields; ++i) {
    // Alternate broadband fields with ones concentrated on the lowest shell,
    // where the inequalities are tight.
    const VelocityField u = i % 2 == 0 ? solenoidal(g, rng)
                                       : random_solenoidal(g, rng, band_spectrum(0.5, 1.5), 1.0);
    const Norms nm = norms(u);
    worst = std::max(worst, kLambda1 * nm.l2 * nm.l2 / (nm.h1 * nm.h1));
    worst = std::max(worst, kLambda1 * nm.h1 * nm.h1 / (nm.h2 * nm.h2));
  }
  PropertyResult r = make("poincare", worst, 1.0 + 1e-12);
  r.detail = "worst lambda1-weighted ratio";
  return r;
}

TaylorGreenResult taylor_green_decay(int n, double nu, double dt, double t, Scheme scheme) {
  const auto start = std::chrono::steady_clock::now();
  const GridSpec g(n);
  PhysicsParams p;
  p.nu = nu;
  p.forcing = VelocityField(g);
  StepperConfig cfg;
  cfg.dt = dt;
  cfg.scheme = scheme;
  cfg.t_end = t;
  const VelocityField u0 = taylor_green(g);
  VelocityField u = u0;
  NseStepper stepper(p, cfg);
  const long steps = cfg.steps_for(t);
  for (long k = 0; k < steps; ++k) stepper.step(u, static_cast<double>(k) * dt);
  const VelocityField exact = std::exp(-8.0 * kPi * kPi * nu * t) * u0;
  TaylorGreenResult r;
  r.relative_error = norms(u - exact).l2 / norms(exact).l2;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

InterpolantCheck check_interpolant(InterpolantKind kind, double h, int n,
                                   const std::vector<std::uint64_t>& seeds, int fresh,
                                   std::uint64_t fresh_seed) {
  const GridSpec g(n);
  InterpolantCheck out;
  out.kind = kind;
  for (std::uint64_t s : seeds) {
    InterpolantOp op(kind, h);
    out.c1_per_seed.push_back(certify_c1(op, g, 100, s).c1);
  }
  const auto [lo, hi] = std::minmax_element(out.c1_per_seed.begin(), out.c1_per_seed.end());
  double mean = 0.0;
  for (double c : out.c1_per_seed) mean += c;
  mean /= static_cast<double>(out.c1_per_seed.size());
  out.spread = (*hi - *lo) / mean;

  InterpolantOp op(kind, h);
  const double c1 = *lo;
  Rng rng(fresh_seed);
  const SpectrumShape shapes[] = {power_law_spectrum(-3.0), power_law_spectrum(-1.0),
                                  power_law_spectrum(-5.0), band_spectrum(1.0, 3.0)};
  for (int i = 0; i < fresh; ++i) {
    const VelocityField phi = random_solenoidal(g, rng, shapes[i % 4], 1.0);
    if (bound_ratio(op, phi) > c1) ++out.violations;
    ++out.fresh_fields;
  }
  return out;
}

std::vector<PropertyResult> run_property_suite(const VerifyOptions& opt) {
  std::vector<PropertyResult> out;
  out.push_back(check_projector(opt.n, opt.fields, opt.seed));
  out.push_back(check_skew_symmetry(opt.bilinear, opt.n, opt.fields, opt.seed + 1));
  out.push_back(check_orthogonality(opt.bilinear, opt.n, opt.fields, opt.seed + 2));
  out.push_back(check_jacobi(opt.bilinear, opt.n, opt.fields, opt.seed + 3));
  out.push_back(check_poincare(opt.n, opt.fields, opt.seed + 4));

  if (opt.interpolants) {
    const std::vector<std::uint64_t> seeds{opt.seed + 10, opt.seed + 11, opt.seed + 12};
    for (InterpolantKind kind : {InterpolantKind::fourier_truncation,
                                 InterpolantKind::nodal_bilinear,
                                 InterpolantKind::volume_average}) {
      const InterpolantCheck c = check_interpolant(kind, 0.125, opt.n, seeds, 1000, opt.seed + 20);
      PropertyResult r;
      r.name = "interpolant_bound_" + to_string(kind);
      r.worst = *std::max_element(c.c1_per_seed.begin(), c.c1_per_seed.end());
      const bool fourier = kind == InterpolantKind::fourier_truncation;
      r.tolerance = fourier ? 1.0 / kTwoPi + 1e-10 : std::numeric_limits<double>::infinity();
      r.passed = std::isfinite(r.worst) && r.worst <= r.tolerance && c.spread <= 0.1 &&
                 c.violations == 0;
      r.detail = "c1 spread " + std::to_string(c.spread) + ", " + std::to_string(c.violations) +
                 " violations in " + std::to_string(c.fresh_fields) + " fresh fields";
      out.push_back(r);
    }
  }
  if (opt.taylor_green) {
    const TaylorGreenResult tg = taylor_green_decay(32, 0.01, 1e-3, 0.1, Scheme::etdrk4);
    out.push_back(make("taylor_green_decay", tg.relative_error, 1e-8));
  }
  return out;
}

}  // namespace nsvda
