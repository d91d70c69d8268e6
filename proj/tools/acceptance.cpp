// Acceptance checks 1-8. Prints one PASS/FAIL line per criterion; exit status
// is nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nsvda/diagnostics.hpp"
#include "nsvda/experiment.hpp"
#include "nsvda/io.hpp"
#include "nsvda/random_fields.hpp"
#include "nsvda/spectral_ops.hpp"
#include "nsvda/verification.hpp"

namespace fs = std::filesystem;
using namespace nsvda;

namespace {

// Tolerances and limits.
constexpr double kTgTol = 1e-8;
constexpr double kTgSeconds = 5.0;
constexpr double kIdentityTol = 1e-10;
constexpr double kProjectorTol = 1e-12;
constexpr double kSeedSpread = 0.10;
constexpr double kDecayOrders = 4.0;
constexpr double kDefaultSeconds = 600.0;
constexpr double kSlopeL2Lo = 1.5, kSlopeL2Hi = 2.5;
constexpr double kSlopeH1Lo = 0.5, kSlopeH1Hi = 2.5;
constexpr double kSweepSeconds = 1800.0;
constexpr double kControlRatio = 100.0;
constexpr double kRoundOff = 1e-10;
constexpr double kBalanceTol = 1e-3;
constexpr double kResumeTol = 1e-12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  fs::path configs;
  fs::path out;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Outcome check_taylor_green(const Context&) {
  const Stopwatch w;
  const TaylorGreenResult r = taylor_green_decay(32, 0.01, 1e-3, 0.1, Scheme::etdrk4);
  const double s = w.seconds();
  return {r.relative_error <= kTgTol && s < kTgSeconds,
          fmt("rel l2 err %.3e (tol %.0e), %.2f s (limit %.0f s)", r.relative_error, kTgTol, s,
              kTgSeconds)};
}

Outcome check_identities(const Context&) {
  VerifyOptions opt;
  opt.n = 64;
  opt.fields = 50;
  const std::vector<std::pair<PropertyResult, double>> checks{
      {check_skew_symmetry(opt.bilinear, opt.n, opt.fields, opt.seed + 1), kIdentityTol},
      {check_orthogonality(opt.bilinear, opt.n, opt.fields, opt.seed + 2), kIdentityTol},
      {check_jacobi(opt.bilinear, opt.n, opt.fields, opt.seed + 3), kIdentityTol},
      {check_projector(opt.n, opt.fields, opt.seed), kProjectorTol},
      {check_poincare(opt.n, opt.fields, opt.seed + 4), 1.0 + 1e-12},
  };
  Outcome o{true, ""};
  for (const auto& [r, tol] : checks) {
    const bool ok = std::isfinite(r.worst) && r.worst <= tol;
    o.pass = o.pass && ok;
    o.detail += fmt("%s%s %.2e", o.detail.empty() ? "" : ", ", r.name.c_str(), r.worst);
  }
  return o;
}

Outcome check_interpolants(const Context&) {
  const std::vector<std::uint64_t> seeds{11, 12, 13};
  Outcome o{true, ""};
  for (InterpolantKind kind : {InterpolantKind::fourier_truncation,
                               InterpolantKind::nodal_bilinear, InterpolantKind::volume_average}) {
    const InterpolantCheck c = check_interpolant(kind, 0.125, 64, seeds, 1000, 99);
    const double hi = *std::max_element(c.c1_per_seed.begin(), c.c1_per_seed.end());
    bool ok = std::isfinite(hi) && c.spread <= kSeedSpread && c.violations == 0;
    if (kind == InterpolantKind::fourier_truncation) ok = ok && hi <= 1.0 / kTwoPi + 1e-10;
    o.pass = o.pass && ok;
    o.detail += fmt("%s%s c1 %.4f spread %.1e viol %d/%d", o.detail.empty() ? "" : "; ",
                    to_string(kind).c_str(), hi, c.spread, c.violations, c.fresh_fields);
  }
  return o;
}

Outcome check_default_decay(const Context& ctx) {
  const Stopwatch w;
  const TwinConfig cfg = load_config(ctx.configs / "default.cfg");
  const TwinRunRecord rec = run_twin(cfg);
  const double s = w.seconds();
  if (!ctx.out.empty()) write_record_csv(ctx.out / "default_twin.csv", rec);
  const double m1 = rec.conditions.m1;
  try {
    const DecayFit f = fit_decay_and_plateau(rec, cfg.fit);
    const double x0 = rec.x_t.front();
    const double orders = f.plateau_x > 0.0 ? std::log10(x0 / f.plateau_x)
                                            : std::numeric_limits<double>::infinity();
    const bool ok = orders >= kDecayOrders && f.rate > 0.0 && m1 > 0.0 && s <= kDefaultSeconds;
    return {ok, fmt("X %.3e -> plateau %.3e (%.1f orders, need %.0f), rate %.3f, knee t=%.2f, "
                    "M1 %.4g, %.0f s (limit %.0f s)",
                    x0, f.plateau_x, orders, kDecayOrders, f.rate, f.t_knee, m1, s,
                    kDefaultSeconds)};
  } catch (const NoPlateauError& e) {
    return {false, std::string("no plateau: ") + e.what()};
  }
}

Outcome check_alpha_scaling(const Context& ctx) {
  const Stopwatch w;
  const TwinConfig cfg = load_config(ctx.configs / "sweep.cfg");
  const SweepResult r = alpha_sweep(cfg, {0.08, 0.04, 0.02});
  const double s = w.seconds();
  if (!ctx.out.empty()) {
    write_sweep_csv(ctx.out / "sweep.csv", r);
    write_slopes_csv(ctx.out / "slopes.csv", r);
  }
  bool rows_ok = true;
  std::string rows;
  for (const auto& row : r.rows) {
    rows_ok = rows_ok && row.ok && !row.floor_limited;
    rows += fmt(" a=%g:%s", row.alpha,
                row.ok ? fmt("%.3e", row.fit.plateau_l2).c_str() : row.error.c_str());
  }
  const bool ok = rows_ok && r.slope_l2 >= kSlopeL2Lo && r.slope_l2 <= kSlopeL2Hi &&
                  r.slope_h1 >= kSlopeH1Lo && r.slope_h1 <= kSlopeH1Hi && s <= kSweepSeconds;
  return {ok, fmt("slope l2 %.3f [%.1f, %.1f], h1 %.3f [%.1f, %.1f], floor %.2e;%s; %.0f s "
                  "(limit %.0f s)",
                  r.slope_l2, kSlopeL2Lo, kSlopeL2Hi, r.slope_h1, kSlopeH1Lo, kSlopeH1Hi,
                  r.floor ? r.floor->fit.plateau_l2 : std::nan(""), rows.c_str(), s,
                  kSweepSeconds)};
}

Outcome check_controls(const Context& ctx) {
  const TwinConfig off = load_config(ctx.configs / "mu0.cfg");
  TwinConfig on = load_config(ctx.configs / "sweep.cfg");
  on.stepper.t_end = off.stepper.t_end;
  const double e_off = run_twin(off).l2_err.back();
  const double e_on = run_twin(on).l2_err.back();
  const TwinRunRecord same = run_twin(load_config(ctx.configs / "identical.cfg"));
  const double worst = *std::max_element(same.l2_err.begin(), same.l2_err.end());
  const double ratio = e_off / e_on;
  return {ratio >= kControlRatio && worst <= kRoundOff,
          fmt("mu=0 %.3e vs nudged %.3e (ratio %.2e, need %.0f); u0=v0 alpha=0 max %.2e over %zu "
              "samples (tol %.0e)",
              e_off, e_on, ratio, kControlRatio, worst, same.size(), kRoundOff)};
}

std::vector<VelocityField> unforced_run(const PhysicsParams& p, double dt, double t, bool voigt) {
  const GridSpec& g = p.forcing.grid();
  Rng rng(17);
  const VelocityField u0 = random_solenoidal(g, rng, power_law_spectrum(-3.0), 1.0);
  TwinStepper s(p, StepperConfig{dt, Scheme::etdrk4, t});
  VelocityField u = u0, v = u0;
  std::vector<VelocityField> out{u0};
  const long n = std::lround(t / dt);
  for (long k = 0; k < n; ++k) {
    s.step(u, v, k * dt);
    out.push_back(voigt ? v : u);
  }
  return out;
}

double worst_balance(const std::vector<VelocityField>& traj, double dt, const PhysicsParams& p,
                     bool voigt) {
  double worst = 0.0;
  for (const auto& b : energy_balance(traj, 0.0, dt, p, voigt))
    worst = std::max(worst, std::abs(b.residual) / b.dissipation);
  return worst;
}

Outcome check_conservation(const Context&) {
  const GridSpec g(64);
  PhysicsParams p;
  p.nu = 0.01;
  p.forcing = VelocityField(g);
  const double r1 = worst_balance(unforced_run(p, 1e-3, 0.2, false), 1e-3, p, false);
  const double r2 = worst_balance(unforced_run(p, 5e-4, 0.2, false), 5e-4, p, false);
  const double order = std::log2(r1 / r2);
  p.alpha = 0.05;
  const auto traj = unforced_run(p, 1e-3, 0.2, true);
  const double rv = worst_balance(traj, 1e-3, p, true);
  const double rv_plain = worst_balance(traj, 1e-3, p, false);
  const bool ok = r1 <= kBalanceTol && order >= 3.0 && order <= 5.0 && rv <= kBalanceTol;
  return {ok, fmt("NSE residual/dissipation %.2e (tol %.0e), dt/2 %.2e, observed order %.2f "
                  "[3, 5]; Voigt with alpha^2 term %.2e, without %.2e",
                  r1, kBalanceTol, r2, order, rv, rv_plain)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome check_reproducibility(const Context& ctx) {
  TwinConfig cfg = load_config(ctx.configs / "sweep.cfg");
  cfg.spinup_time = 2.0;
  cfg.stepper.t_end = 2.0;
  const fs::path dir = ctx.out.empty() ? fs::temp_directory_path() / "nsvda_acceptance" : ctx.out;
  fs::create_directories(dir);
  write_record_csv(dir / "repro_a.csv", run_twin(cfg));
  write_record_csv(dir / "repro_b.csv", run_twin(cfg));
  const std::string a = slurp(dir / "repro_a.csv"), b = slurp(dir / "repro_b.csv");
  const bool same = !a.empty() && a == b;

  TwinRun full(cfg);
  full.advance_to(cfg.stepper.t_end);
  TwinRun half(cfg);
  half.advance_to(0.5 * cfg.stepper.t_end);
  write_checkpoint(dir / "half.chk", half.checkpoint_fields());
  TwinRun resumed = TwinRun::resume(cfg, read_checkpoint(dir / "half.chk"), half.step_index());
  resumed.advance_to(cfg.stepper.t_end);
  const double du = norms(resumed.truth() - full.truth()).l2 / norms(full.truth()).l2;
  const double dv = norms(resumed.estimate() - full.estimate()).l2 / norms(full.estimate()).l2;
  const double d = std::max(du, dv);
  return {same && d <= kResumeTol,
          fmt("CSV %s (%zu bytes); resume rel diff %.2e (tol %.0e)",
              same ? "bit-identical" : "DIFFERS", a.size(), d, kResumeTol)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> selected;
  Context ctx;
  std::string configs = NSVDA_SOURCE_DIR "/configs";
  std::string out;
  app.add_option("criteria", selected, "criteria to run (default: all)")
      ->check(CLI::Range(1, 8));
  app.add_option("--configs", configs, "directory with the shipped configs");
  app.add_option("--out", out, "directory for run artifacts");
  CLI11_PARSE(app, argc, argv);
  ctx.configs = configs;
  if (!out.empty()) {
    ctx.out = out;
    fs::create_directories(ctx.out);
  }
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8};

  const std::vector<std::pair<const char*, std::function<Outcome(const Context&)>>> criteria{
      {"taylor_green", check_taylor_green},
      {"operator_identities", check_identities},
      {"interpolant_bound", check_interpolants},
      {"exponential_decay", check_default_decay},
      {"alpha_scaling", check_alpha_scaling},
      {"controls", check_controls},
      {"conservation", check_conservation},
      {"reproducibility", check_reproducibility},
  };
  bool all = true;
  for (int c : selected) {
    const auto& [name, fn] = criteria[c - 1];
    Outcome o;
    try {
      o = fn(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all = all && o.pass;
    std::printf("criterion %d %-20s %s  %s\n", c, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
