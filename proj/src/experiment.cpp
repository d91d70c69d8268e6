#include "nsvda/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <thread>

#include "nsvda/random_fields.hpp"
#include "nsvda/spectral_ops.hpp"

namespace nsvda {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Independent streams derived from the run seed (splitmix64 finalizer).
std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum Stream : std::uint64_t { kForcing = 1, kTruth = 2, kIndependent = 3, kPerturbation = 4,
                              kCertify = 5 };

template <class Fn>
void keyed(const char* key, Fn&& fn) {
  try {
    fn();
  } catch (const ParameterError& e) {
    if (!e.key().empty()) throw;
    throw ParameterError(key, e.what());
  }
}

void require(bool ok, const char* key, const char* message) {
  if (!ok) throw ParameterError(key, message);
}

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

std::vector<double> tail(const std::vector<double>& v, std::size_t from, std::size_t to) {
  return {v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(to)};
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : kNaN;
}

VelocityField initial_estimate(const TwinConfig& cfg, const VelocityField& u) {
  const GridSpec& g = cfg.grid;
  const double scale = norms(u).l2;
  switch (cfg.v_init) {
    case VInit::zero:
      return VelocityField(g);
    case VInit::perturbed: {
      VelocityField v = u;
      if (cfg.v_epsilon > 0.0 && scale > 0.0) {
        Rng rng(substream(cfg.seed, kPerturbation));
        v.axpy(cfg.v_epsilon * scale, random_solenoidal(g, rng, power_law_spectrum(-3.0), 1.0));
      }
      return v;
    }
    case VInit::independent: {
      Rng rng(substream(cfg.seed, kIndependent));
      return random_solenoidal(g, rng, power_law_spectrum(-3.0), scale > 0.0 ? scale : 1.0);
    }
  }
  return VelocityField(g);
}

std::unique_ptr<PhysicsParams> prepare(const TwinConfig& cfg) {
  cfg.validate();
  return std::make_unique<PhysicsParams>(cfg.physics());
}

}  // namespace

std::string to_string(VInit v) {
  switch (v) {
    case VInit::zero: return "zero";
    case VInit::perturbed: return "perturbed";
    case VInit::independent: return "independent";
  }
  return "?";
}

std::optional<VInit> v_init_from_string(const std::string& s) {
  if (s == "zero") return VInit::zero;
  if (s == "perturbed") return VInit::perturbed;
  if (s == "independent") return VInit::independent;
  return std::nullopt;
}

void TwinConfig::validate() const {
  require(nu > 0.0 && std::isfinite(nu), "physics.nu", "must be > 0");
  require(alpha >= 0.0 && std::isfinite(alpha), "physics.alpha", "must be >= 0");
  require(mu >= 0.0 && std::isfinite(mu), "physics.mu", "must be >= 0");
  keyed("interpolant.h", [&] { interpolant.check_grid(grid); });
  require(forcing.grashof >= 0.0 && std::isfinite(forcing.grashof), "forcing.grashof",
          "must be >= 0");
  require(forcing.kmin > 0.0, "forcing.kmin", "must be > 0");
  require(forcing.kmax >= forcing.kmin, "forcing.kmax", "must be >= forcing.kmin");
  require(init.amplitude >= 0.0, "init.amplitude", "must be >= 0");
  require(stepper.dt > 0.0 && std::isfinite(stepper.dt), "stepper.dt", "must be > 0");
  require(stepper.t_end >= 0.0, "stepper.t_end", "must be >= 0");
  require(stepper.cfl_limit > 0.0, "stepper.cfl_limit", "must be > 0");
  keyed("stepper.t_end", [&] { stepper.steps_for(stepper.t_end); });
  if (spinup_time) {
    require(*spinup_time >= 0.0, "twin.spinup_time", "must be >= 0");
    keyed("twin.spinup_time", [&] { stepper.steps_for(*spinup_time); });
  }
  require(sample_interval >= stepper.dt, "twin.sample_interval", "must be >= stepper.dt");
  keyed("twin.sample_interval", [&] { stepper.steps_for(sample_interval); });
  require(v_epsilon >= 0.0, "twin.v_epsilon", "must be >= 0");
  require(c_assumed > 0.0, "twin.c_assumed", "must be > 0");
  require(fit.decay_window > 0.0 && fit.decay_window <= 1.0, "twin.decay_window",
          "must lie in (0, 1]");
  require(fit.plateau_window > 0.0 && fit.plateau_window < 1.0, "twin.plateau_window",
          "must lie in (0, 1)");
  require(fit.plateau_tolerance > 0.0, "twin.plateau_tolerance", "must be > 0");
  const bool folded = stepper.scheme == Scheme::etdrk4 && interpolant.diagonal();
  require(mu == 0.0 || folded || mu * stepper.dt <= 0.5, "physics.mu",
          "explicit nudging needs mu * dt <= 0.5 for this scheme and interpolant");
}

double TwinConfig::resolved_spinup_time() const {
  if (spinup_time) return *spinup_time;
  const double g = forcing.kind == ForcingSpec::Kind::none ? 0.0 : forcing.grashof;
  if (g == 0.0) return 0.0;
  const double turnover = 1.0 / (std::sqrt(2.0) * nu * g);
  return static_cast<double>(std::lround(20.0 * turnover / stepper.dt)) * stepper.dt;
}

long TwinConfig::sample_every() const { return stepper.steps_for(sample_interval); }

PhysicsParams TwinConfig::physics() const {
  PhysicsParams p;
  p.nu = nu;
  p.alpha = alpha;
  p.mu = mu;
  p.interpolant = interpolant;
  const double g = forcing.kind == ForcingSpec::Kind::none ? 0.0 : forcing.grashof;
  p.forcing = band_forcing(grid, forcing.kmin, forcing.kmax, g, nu, substream(seed, kForcing));
  if (!p.interpolant.diagonal() && p.interpolant.c1_certified() == 0.0) {
    certify_c1(p.interpolant, grid, 100, substream(seed, kCertify));
  }
  return p;
}

ConditionReport check_conditions(const PhysicsParams& p, const GrashofReport& g,
                                 double c_assumed) {
  ConditionReport r;
  r.g = g.g;
  r.c_assumed = c_assumed;
  r.h = p.interpolant.h();
  r.alpha = p.alpha;
  r.c1 = p.interpolant.c1_certified();
  if (r.c1 == 0.0 && p.interpolant.diagonal()) r.c1 = 1.0 / kTwoPi;

  const double lambda1 = g.lambda1;
  if (g.g == 0.0) {
    r.h_max = std::numeric_limits<double>::infinity();
    r.h_unconstrained = true;
  } else if (r.c1 > 0.0) {
    r.h_max = 1.0 / std::sqrt(lambda1) / (2.0 * r.c1 * std::sqrt(2.0 * c_assumed)) / g.g;
  } else {
    r.h_max = kNaN;
  }
  r.m1 = 0.5 * p.mu - c_assumed * p.nu * lambda1 * g.g * g.g;
  r.m2 = 0.5 * p.mu - c_assumed * p.nu * lambda1 * std::pow(g.g, 8.0 / 3.0);
  r.alpha_max_t2 = r.m1 > 0.0 ? std::sqrt(p.nu / r.m1) : kNaN;
  r.alpha_max_t3 = r.m2 > 0.0 ? std::sqrt(p.nu / r.m2) : kNaN;

  const bool h_ok = r.h_unconstrained || r.h < r.h_max;
  const double a2 = p.alpha * p.alpha;
  r.satisfied_t2 = h_ok && r.m1 > 0.0 && a2 < p.nu / r.m1;
  r.satisfied_t3 = h_ok && r.m2 > 0.0 && a2 < p.nu / r.m2;
  return r;
}

void TwinRunRecord::append(double t, const VelocityField& u, const VelocityField& v,
                           double alpha) {
  const Norms w = norms(u - v);
  const Norms nu = norms(u);
  const double nv = norms(v).l2;
  const double a2 = alpha * alpha;
  times.push_back(t);
  l2_err.push_back(w.l2);
  h1_err.push_back(w.h1);
  h2_err.push_back(w.h2);
  x_t.push_back(w.l2 * w.l2 + a2 * w.h1 * w.h1);
  x_tilde_t.push_back(w.h1 * w.h1 + a2 * w.h2 * w.h2);
  energy_u.push_back(0.5 * nu.l2 * nu.l2);
  energy_v.push_back(0.5 * nv * nv);
  enstrophy_u.push_back(0.5 * nu.h1 * nu.h1);
}

VelocityField spin_up_truth(const TwinConfig& cfg, const PhysicsParams& p) {
  const GridSpec& g = cfg.grid;
  VelocityField u(g);
  switch (cfg.init.kind) {
    case InitSpec::Kind::random: {
      if (cfg.init.amplitude > 0.0) {
        Rng rng(substream(cfg.seed, kTruth));
        u = random_solenoidal(g, rng, power_law_spectrum(-3.0), cfg.init.amplitude);
      }
      break;
    }
    case InitSpec::Kind::taylor_green:
      u = taylor_green(g, cfg.init.amplitude);
      break;
    case InitSpec::Kind::zero:
      break;
  }
  const long steps = cfg.stepper.steps_for(cfg.resolved_spinup_time());
  if (steps == 0) return u;
  NseStepper stepper(p, cfg.stepper);
  for (long k = 0; k < steps; ++k) stepper.step(u, static_cast<double>(k) * cfg.stepper.dt);
  return u;
}

TwinRun::TwinRun(TwinConfig cfg, std::unique_ptr<PhysicsParams> p)
    : cfg_(std::move(cfg)), physics_(std::move(p)) {
  record_.config = cfg_;
  record_.grashof = grashof(*physics_);
  record_.conditions = check_conditions(*physics_, record_.grashof, cfg_.c_assumed);
  record_.spinup_time = cfg_.resolved_spinup_time();
  stepper_ = std::make_unique<TwinStepper>(*physics_, cfg_.stepper);
}

TwinRun::TwinRun(TwinConfig cfg, const std::optional<VelocityField>& truth)
    : TwinRun(cfg, prepare(cfg)) {
  if (truth) {
    require_same_grid(truth->grid(), cfg_.grid, "TwinRun truth");
    u_ = *truth;
  } else {
    u_ = spin_up_truth(cfg_, *physics_);
  }
  v_ = initial_estimate(cfg_, u_);
  record_.append(0.0, u_, v_, cfg_.alpha);
}

TwinRun TwinRun::resume(TwinConfig cfg, std::vector<VelocityField> fields, long step) {
  if (fields.size() != 2 && fields.size() != 4) {
    throw StructuralError("TwinRun::resume: expected 2 or 4 fields, got " +
                          std::to_string(fields.size()));
  }
  for (const auto& f : fields) require_same_grid(f.grid(), cfg.grid, "TwinRun::resume");
  if (step < 0) throw ParameterError("TwinRun::resume: negative step index");
  auto p = prepare(cfg);
  TwinRun run(std::move(cfg), std::move(p));
  run.u_ = std::move(fields[0]);
  run.v_ = std::move(fields[1]);
  if (fields.size() == 4) {
    if (run.cfg_.stepper.scheme != Scheme::imex_cnab2) {
      throw StructuralError("TwinRun::resume: history fields only apply to imex_cnab2");
    }
    run.stepper_->integrator().set_history({std::move(fields[2]), std::move(fields[3])});
  }
  run.step_ = step;
  return run;
}

void TwinRun::advance_to(double t) {
  const long target = cfg_.stepper.steps_for(t);
  const long every = cfg_.sample_every();
  try {
    while (step_ < target) {
      stepper_->step(u_, v_, time());
      ++step_;
      if (step_ % every == 0) record_.append(time(), u_, v_, cfg_.alpha);
    }
  } catch (const BlowUpError& e) {
    throw TwinBlowUpError(e, record_);
  }
}

std::vector<VelocityField> TwinRun::checkpoint_fields() const {
  std::vector<VelocityField> out{u_, v_};
  for (const auto& h : stepper_->integrator().history()) out.push_back(h);
  return out;
}

TwinRunRecord run_twin(const TwinConfig& cfg) {
  TwinRun run(cfg);
  run.advance_to(cfg.stepper.t_end);
  return run.record();
}

DecayFit fit_decay_and_plateau(const TwinRunRecord& rec, const FitOptions& opt) {
  const std::size_t n = rec.size();
  if (n < 10) throw PreconditionError("fit_decay_and_plateau: need at least 10 samples");
  const auto window = std::max<std::size_t>(
      4, static_cast<std::size_t>(std::lround(opt.plateau_window * static_cast<double>(n))));
  if (window >= n) throw PreconditionError("fit_decay_and_plateau: plateau window covers the record");
  const std::size_t start = n - window;
  const std::size_t mid = start + window / 2;

  const double first = median(tail(rec.x_t, start, mid));
  const double second = median(tail(rec.x_t, mid, n));
  const double scale = std::max(first, second);
  if (std::abs(first - second) > opt.plateau_tolerance * scale) {
    throw NoPlateauError("no plateau: X changes from " + std::to_string(first) + " to " +
                         std::to_string(second) + " across the final window");
  }

  DecayFit fit;
  fit.plateau_x = median(tail(rec.x_t, start, n));
  fit.plateau_l2 = median(tail(rec.l2_err, start, n));
  fit.plateau_h1 = median(tail(rec.h1_err, start, n));
  fit.plateau_h2 = median(tail(rec.h2_err, start, n));

  std::size_t knee = 0;
  while (knee < n && rec.x_t[knee] > 2.0 * fit.plateau_x) ++knee;
  fit.t_knee = rec.times[std::min(knee, n - 1)];

  const auto used = static_cast<std::size_t>(std::ceil(opt.decay_window * static_cast<double>(knee)));
  std::vector<double> t, logx;
  for (std::size_t i = 0; i < used; ++i) {
    if (rec.x_t[i] > 0.0) {
      t.push_back(rec.times[i]);
      logx.push_back(std::log(rec.x_t[i]));
    }
  }
  fit.rate = t.size() >= 2 ? -least_squares_slope(t, logx) : 0.0;
  return fit;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw StructuralError("loglog_slope: length mismatch");
  if (x.size() < 2) return kNaN;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return kNaN;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return least_squares_slope(lx, ly);
}

SweepResult alpha_sweep(const TwinConfig& base, const std::vector<double>& alphas,
                        const SweepOptions& opt) {
  if (alphas.size() < 3) throw PreconditionError("alpha_sweep: need at least 3 alphas");
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) throw PreconditionError("alpha_sweep: alphas must be > 0");
  }
  const auto [lo, hi] = std::minmax_element(alphas.begin(), alphas.end());
  if (*hi < 4.0 * *lo) throw PreconditionError("alpha_sweep: alphas must span a factor of at least 4");
  base.validate();

  // The truth does not depend on alpha; spin it up once.
  const PhysicsParams p = base.physics();
  const VelocityField truth = spin_up_truth(base, p);

  std::vector<double> jobs = alphas;
  if (opt.floor_run) jobs.push_back(0.0);
  std::vector<SweepRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      SweepRow& row = rows[i];
      row.alpha = jobs[i];
      TwinConfig cfg = base;
      cfg.alpha = jobs[i];
      try {
        TwinRun run(cfg, truth);
        run.advance_to(cfg.stepper.t_end);
        row.record = run.record();
        row.fit = fit_decay_and_plateau(row.record, cfg.fit);
        row.ok = true;
      } catch (const TwinBlowUpError& e) {
        row.record = e.partial();
        row.error = e.what();
      } catch (const Error& e) {
        row.error = e.what();
      }
    }
  };
  const int workers = std::clamp<int>(opt.workers, 1, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  SweepResult out;
  if (opt.floor_run) {
    out.floor = std::move(rows.back());
    rows.pop_back();
  }
  std::vector<double> a, l2, h1, h2;
  for (auto& row : rows) {
    if (out.floor && out.floor->ok && row.ok) {
      row.floor_limited = row.fit.plateau_l2 < opt.floor_factor * out.floor->fit.plateau_l2;
    }
    if (row.ok && !row.floor_limited) {
      a.push_back(row.alpha);
      l2.push_back(row.fit.plateau_l2);
      h1.push_back(row.fit.plateau_h1);
      h2.push_back(row.fit.plateau_h2);
    }
  }
  out.rows = std::move(rows);
  out.slope_l2 = loglog_slope(a, l2);
  out.slope_h1 = loglog_slope(a, h1);
  out.slope_h2 = loglog_slope(a, h2);
  return out;
}

}  // namespace nsvda
