// Command-line driver: simulate, assimilate, sweep-alpha, verify.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nsvda/diagnostics.hpp"
#include "nsvda/experiment.hpp"
#include "nsvda/io.hpp"
#include "nsvda/spectral_ops.hpp"
#include "nsvda/verification.hpp"

namespace fs = std::filesystem;
using namespace nsvda;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kBlowUp = 3, kPropertyFailure = 4 };

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
};

TwinConfig load(const Common& c) {
  TwinConfig cfg = load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

fs::path prepare_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json finite_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

void print_conditions(const ConditionReport& c) {
  std::printf("Grashof G = %.6g\n", c.g);
  std::printf("h = %.6g, h_max = %.6g%s (c1 = %.6g)\n", c.h, c.h_max,
              c.h_unconstrained ? " (unconstrained)" : "", c.c1);
  std::printf("M1 = %.6g, alpha_max = %.6g; M2 = %.6g, alpha_max = %.6g (C = %g)\n", c.m1,
              c.alpha_max_t2, c.m2, c.alpha_max_t3, c.c_assumed);
  std::printf("conditions satisfied: decay %s, H1 rate %s\n", c.satisfied_t2 ? "yes" : "no",
              c.satisfied_t3 ? "yes" : "no");
}

int simulate(const Common& opt) {
  TwinConfig cfg = load(opt);
  const fs::path dir = prepare_dir(opt.out);
  RunManifest manifest;
  manifest.started = utc_timestamp();
  manifest.config_echo = emit_config(cfg);
  manifest.seed = cfg.seed;

  const PhysicsParams p = cfg.physics();
  TwinConfig initial = cfg;
  initial.spinup_time = 0.0;
  VelocityField u = spin_up_truth(initial, p);

  const long every = cfg.sample_every();
  const long steps = cfg.stepper.steps_for(cfg.stepper.t_end);
  std::ofstream csv(dir / "simulate.csv");
  csv << "t,l2,h1,h2,energy,enstrophy,injection,dissipation\n";
  auto row = [&](double t) {
    const Norms n = norms(u);
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t, n.l2,
                  n.h1, n.h2, 0.5 * n.l2 * n.l2, 0.5 * n.h1 * n.h1, inner(p.forcing, u),
                  p.nu * n.h1 * n.h1);
    csv << buf;
  };
  row(0.0);
  NseStepper stepper(p, cfg.stepper);
  int code = kOk;
  try {
    for (long k = 0; k < steps; ++k) {
      stepper.step(u, static_cast<double>(k) * cfg.stepper.dt);
      if ((k + 1) % every == 0) row(static_cast<double>(k + 1) * cfg.stepper.dt);
    }
  } catch (const BlowUpError& e) {
    std::fprintf(stderr, "blow-up: %s\n", e.what());
    code = kBlowUp;
  }
  csv.close();
  manifest.artifacts.push_back("simulate.csv");
  if (code == kOk) {
    write_checkpoint(dir / "final.chk", std::vector<VelocityField>{u});
    write_spectrum_csv(dir / "spectrum.csv", energy_spectrum(u));
    manifest.artifacts.push_back("final.chk");
    manifest.artifacts.push_back("spectrum.csv");
    const Norms n = norms(u);
    std::printf("t = %.6g  l2 = %.17g  h1 = %.17g\n", cfg.stepper.t_end, n.l2, n.h1);
  }
  manifest.finished = utc_timestamp();
  manifest.artifacts.push_back("manifest.json");
  write_manifest(dir / "manifest.json", manifest);
  return code;
}

int assimilate(const Common& opt) {
  TwinConfig cfg = load(opt);
  const fs::path dir = prepare_dir(opt.out);
  RunManifest manifest;
  manifest.started = utc_timestamp();
  manifest.config_echo = emit_config(cfg);
  manifest.seed = cfg.seed;

  std::optional<TwinRun> run;
  int code = kOk;
  TwinRunRecord rec;
  try {
    run.emplace(cfg);
    print_conditions(run->record().conditions);
    run->advance_to(cfg.stepper.t_end);
    rec = run->record();
  } catch (const TwinBlowUpError& e) {
    std::fprintf(stderr, "blow-up: %s\n", e.what());
    rec = e.partial();
    code = kBlowUp;
  }

  write_record_csv(dir / "twin.csv", rec);
  manifest.artifacts.push_back("twin.csv");

  nlohmann::json summary;
  summary["conditions_satisfied"] = rec.conditions.satisfied_t2;
  summary["conditions_satisfied_h1"] = rec.conditions.satisfied_t3;
  summary["grashof"] = rec.grashof.g;
  summary["status"] = code == kOk ? "ok" : "blow_up";
  std::optional<DecayFit> fit;
  if (code == kOk) {
    try {
      fit = fit_decay_and_plateau(rec, cfg.fit);
      summary["fit_status"] = "ok";
    } catch (const Error& e) {
      summary["fit_status"] = "no_plateau";
      summary["fit_error"] = e.what();
    }
  }
  const double initial = rec.l2_err.empty() ? 0.0 : rec.l2_err.front();
  const double terminal = rec.l2_err.empty() ? 0.0 : rec.l2_err.back();
  const double level = fit ? fit->plateau_l2 : terminal;
  const double orders = initial > 0.0 && level > 0.0 ? std::log10(initial / level) : 0.0;
  summary["rate"] = fit ? finite_or_null(fit->rate) : nlohmann::json(nullptr);
  summary["plateau_l2"] = fit ? finite_or_null(fit->plateau_l2) : nlohmann::json(nullptr);
  summary["plateau_h1"] = fit ? finite_or_null(fit->plateau_h1) : nlohmann::json(nullptr);
  summary["plateau_h2"] = fit ? finite_or_null(fit->plateau_h2) : nlohmann::json(nullptr);
  summary["t_knee"] = fit ? finite_or_null(fit->t_knee) : nlohmann::json(nullptr);
  summary["initial_l2_err"] = initial;
  summary["terminal_l2_err"] = terminal;
  summary["decay_orders"] = orders;
  summary["no_decay"] = !(initial > 0.0) || orders < 1.0;
  if (!rec.times.empty()) {
    const BallReport ball = ball_monitor(rec, rec.grashof, cfg.nu);
    summary["ball"] = {{"l2_violation_fraction", ball.l2_violation_fraction},
                       {"h1_violation_fraction", ball.h1_violation_fraction},
                       {"max_l2_ratio", finite_or_null(ball.max_l2_ratio)},
                       {"max_h1_ratio", finite_or_null(ball.max_h1_ratio)}};
    if (ball.l2_violation_fraction > 0.0 || ball.h1_violation_fraction > 0.0) {
      std::fprintf(stderr, "warning: truth left the absorbing ball in %.3g / %.3g of samples\n",
                   ball.l2_violation_fraction, ball.h1_violation_fraction);
    }
  }
  std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
  write_record_metadata(dir / "twin.json", rec, fit ? &*fit : nullptr);
  manifest.artifacts.push_back("summary.json");
  manifest.artifacts.push_back("twin.json");

  if (code == kOk) {
    const auto fields = run->checkpoint_fields();
    write_checkpoint(dir / "final.chk", fields);
    manifest.artifacts.push_back("final.chk");
  }
  if (fit) {
    std::printf("rate = %.6g  plateau_l2 = %.6g  plateau_h1 = %.6g  t_knee = %.6g\n", fit->rate,
                fit->plateau_l2, fit->plateau_h1, fit->t_knee);
  } else if (code == kOk) {
    std::printf("no plateau reached; terminal l2_err = %.6g\n", terminal);
  }
  manifest.finished = utc_timestamp();
  manifest.artifacts.push_back("manifest.json");
  write_manifest(dir / "manifest.json", manifest);
  return code;
}

int sweep(const Common& opt, const std::vector<double>& alphas, int workers) {
  TwinConfig cfg = load(opt);
  const fs::path dir = prepare_dir(opt.out);
  RunManifest manifest;
  manifest.started = utc_timestamp();
  manifest.config_echo = emit_config(cfg);
  manifest.seed = cfg.seed;

  SweepOptions so;
  so.workers = workers;
  const SweepResult res = alpha_sweep(cfg, alphas, so);

  write_sweep_csv(dir / "sweep.csv", res);
  write_slopes_csv(dir / "slopes.csv", res);
  manifest.artifacts.push_back("sweep.csv");
  manifest.artifacts.push_back("slopes.csv");
  auto emit_row = [&](const SweepRow& row, std::size_t index) {
    const std::string name = "twin_" + std::to_string(index) + ".csv";
    if (row.record.size() > 0) {
      write_record_csv(dir / name, row.record);
      manifest.artifacts.push_back(name);
    }
    std::printf("alpha = %-10g plateau_l2 = %-12.6g plateau_h1 = %-12.6g %s%s\n", row.alpha,
                row.fit.plateau_l2, row.fit.plateau_h1, row.ok ? "ok" : row.error.c_str(),
                row.floor_limited ? " (floor-limited)" : "");
  };
  for (std::size_t i = 0; i < res.rows.size(); ++i) emit_row(res.rows[i], i);
  if (res.floor) emit_row(*res.floor, res.rows.size());
  std::printf("slope l2 = %.4f  h1 = %.4f  h2 = %.4f\n", res.slope_l2, res.slope_h1, res.slope_h2);

  manifest.finished = utc_timestamp();
  manifest.artifacts.push_back("manifest.json");
  write_manifest(dir / "manifest.json", manifest);
  bool all_ok = true;
  for (const auto& r : res.rows) all_ok = all_ok && r.ok;
  return all_ok ? kOk : kFailure;
}

int verify(const std::string& out, bool mutate) {
  VerifyOptions opt;
  if (mutate) opt.bilinear = mutated_nonlinear_term;
  const auto results = run_property_suite(opt);
  bool all = true;
  for (const auto& r : results) {
    std::printf("%s %-40s worst = %.3e  tol = %.3e  %s\n", r.passed ? "PASS" : "FAIL",
                r.name.c_str(), r.worst, r.tolerance, r.detail.c_str());
    all = all && r.passed;
  }
  if (!out.empty()) {
    const fs::path dir = prepare_dir(out);
    std::ofstream csv(dir / "verify.csv");
    csv << "property,passed,worst,tolerance\n";
    for (const auto& r : results) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g\n", r.name.c_str(), r.passed ? 1 : 0,
                    r.worst, r.tolerance);
      csv << buf;
    }
  }
  return all ? kOk : kPropertyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nudged Navier-Stokes-Voigt data assimilation on the periodic square"};
  app.require_subcommand(1);

  Common common;
  std::vector<double> alphas{0.08, 0.04, 0.02};
  int workers = 1;
  std::string verify_out;
  bool mutate = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "configuration file")->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory");
    sub->add_option("--seed", common.seed, "override run.seed");
  };
  CLI::App* sim = app.add_subcommand("simulate", "run the reference Navier-Stokes system");
  add_common(sim);
  CLI::App* assim = app.add_subcommand("assimilate", "run one twin experiment");
  add_common(assim);
  CLI::App* sw = app.add_subcommand("sweep-alpha", "twin experiments over several alphas");
  add_common(sw);
  sw->add_option("--alphas", alphas, "comma separated alphas")->delimiter(',');
  sw->add_option("--workers", workers, "parallel runs")->check(CLI::PositiveNumber);
  CLI::App* ver = app.add_subcommand("verify", "run the built-in property suite");
  ver->add_option("--out", verify_out, "directory for verify.csv (optional)");
  ver->add_flag("--mutate-bilinear", mutate, "inject a sign error into B (self-test)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) return simulate(common);
    if (*assim) return assimilate(common);
    if (*sw) return sweep(common, alphas, workers);
    if (*ver) return verify(verify_out, mutate);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kUsage;
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return kUsage;
  } catch (const PreconditionError& e) {
    std::fprintf(stderr, "precondition failed: %s\n", e.what());
    return kUsage;
  } catch (const BlowUpError& e) {
    std::fprintf(stderr, "blow-up: %s\n", e.what());
    return kBlowUp;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kFailure;
}
