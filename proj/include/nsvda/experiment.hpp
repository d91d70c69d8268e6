#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nsvda/errors.hpp"
#include "nsvda/models.hpp"
#include "nsvda/time_integration.hpp"

namespace nsvda {

enum class VInit { zero, perturbed, independent };
std::string to_string(VInit v);
std::optional<VInit> v_init_from_string(const std::string& s);

struct ForcingSpec {
  enum class Kind { band, none };
  Kind kind = Kind::band;
  double grashof = 50.0;
  double kmin = 2.0;  ///< band edges in units of 2 pi
  double kmax = 4.0;
};

struct InitSpec {
  enum class Kind { random, taylor_green, zero };
  Kind kind = Kind::random;
  double amplitude = 1.0;  ///< L2 norm (random) or velocity amplitude (taylor_green)
};

struct FitOptions {
  double decay_window = 0.6;    ///< leading fraction of the pre-knee samples used for the rate
  double plateau_window = 0.2;  ///< trailing fraction of the record treated as the plateau
  double plateau_tolerance = 0.1;
};

/// Everything that defines a twin experiment. The defaults are the shipped
/// default experiment (configs/default.cfg).
struct TwinConfig {
  GridSpec grid{128};
  double nu = 0.05;
  double alpha = 0.02;
  double mu = 1.0e4;
  InterpolantOp interpolant{InterpolantKind::fourier_truncation, 0.125};
  ForcingSpec forcing;
  InitSpec init;
  StepperConfig stepper{1e-3, Scheme::etdrk4, 50.0, 0.5, ObservationTiming::stage};
  /// Truth evolution before assimilation starts; unset means 20 eddy
  /// turnovers, 20 / (sqrt(2) nu G), using the absorbing-ball speed.
  std::optional<double> spinup_time;
  VInit v_init = VInit::zero;
  double v_epsilon = 0.0;  ///< relative size of the perturbation for VInit::perturbed
  double sample_interval = 0.1;
  double c_assumed = 1.0;
  FitOptions fit;
  std::uint64_t seed = 1;

  /// Throws ParameterError naming the offending setting.
  void validate() const;
  double resolved_spinup_time() const;
  long sample_every() const;
  /// Materializes the forcing (seeded) and certifies c1 for nodal interpolants.
  PhysicsParams physics() const;
};

struct ConditionReport {
  double g = 0.0;
  double c1 = 0.0;      ///< interpolant constant used for h_max
  double h = 0.0;
  double h_max = 0.0;   ///< +inf when G = 0
  bool h_unconstrained = false;
  double m1 = 0.0;
  double m2 = 0.0;
  double alpha = 0.0;
  double alpha_max_t2 = 0.0;  ///< NaN when M1 <= 0
  double alpha_max_t3 = 0.0;  ///< NaN when M2 <= 0
  double c_assumed = 1.0;
  bool satisfied_t2 = false;
  bool satisfied_t3 = false;
};

/// Evaluates the admissibility conditions on h, mu and alpha literally:
///   h < lambda1^{-1/2} / (2 c1 sqrt(2C)) / G,
///   M1 = mu/2 - C nu lambda1 G^2 > 0,   alpha^2 < nu / M1,
///   M2 = mu/2 - C nu lambda1 G^{8/3} > 0, alpha^2 < nu / M2.
/// c1 is p.interpolant.c1_certified(), or 1/(2 pi) for an uncertified
/// Fourier truncation.
ConditionReport check_conditions(const PhysicsParams& p, const GrashofReport& g,
                                 double c_assumed);

struct TwinRunRecord {
  std::vector<double> times;
  std::vector<double> l2_err, h1_err, h2_err;
  std::vector<double> x_t;        ///< l2^2 + alpha^2 h1^2
  std::vector<double> x_tilde_t;  ///< h1^2 + alpha^2 h2^2
  std::vector<double> energy_u;   ///< 1/2 ||u||^2
  std::vector<double> energy_v;
  std::vector<double> enstrophy_u;  ///< 1/2 ||grad u||^2 (not part of the CSV)
  TwinConfig config;
  ConditionReport conditions;
  GrashofReport grashof;
  double spinup_time = 0.0;

  std::size_t size() const { return times.size(); }
  void append(double t, const VelocityField& u, const VelocityField& v, double alpha);
};

/// Blow-up during a twin run; carries everything recorded up to that point.
class TwinBlowUpError : public BlowUpError {
 public:
  TwinBlowUpError(const BlowUpError& cause, TwinRunRecord partial)
      : BlowUpError(cause), partial_(std::move(partial)) {}
  const TwinRunRecord& partial() const { return partial_; }

 private:
  TwinRunRecord partial_;
};

/// A twin experiment in progress. Time is measured from the end of spinup.
class TwinRun {
 public:
  /// Spins up the truth (or starts from `truth` if given, e.g. shared by a
  /// sweep), initializes v and records the t = 0 sample.
  explicit TwinRun(TwinConfig cfg, const std::optional<VelocityField>& truth = std::nullopt);

  /// Continues from saved state; nothing is recorded for the resume instant.
  /// `fields` holds u, v and, for imex_cnab2 after the first step, the two
  /// previous explicit terms.
  static TwinRun resume(TwinConfig cfg, std::vector<VelocityField> fields, long step);

  /// Steps until time() >= t, recording every sample_interval. Throws
  /// TwinBlowUpError.
  void advance_to(double t);

  double time() const { return static_cast<double>(step_) * cfg_.stepper.dt; }
  long step_index() const { return step_; }
  const VelocityField& truth() const { return u_; }
  const VelocityField& estimate() const { return v_; }
  const TwinRunRecord& record() const { return record_; }
  const PhysicsParams& physics() const { return *physics_; }

  /// State needed by resume().
  std::vector<VelocityField> checkpoint_fields() const;

  TwinRun(TwinRun&&) noexcept = default;

 private:
  TwinRun(TwinConfig cfg, std::unique_ptr<PhysicsParams> p);
  TwinConfig cfg_;
  std::unique_ptr<PhysicsParams> physics_;  // stable address for the stepper
  std::unique_ptr<TwinStepper> stepper_;
  VelocityField u_, v_;
  long step_ = 0;
  TwinRunRecord record_;
};

/// Evolves the truth from its seeded initial condition for the spinup time.
VelocityField spin_up_truth(const TwinConfig& cfg, const PhysicsParams& p);

/// Full experiment: spinup, assimilation to stepper.t_end, record.
TwinRunRecord run_twin(const TwinConfig& cfg);

struct DecayFit {
  double rate = 0.0;  ///< -d log X / dt over the decay window
  double plateau_x = 0.0;
  double plateau_l2 = 0.0;
  double plateau_h1 = 0.0;
  double plateau_h2 = 0.0;
  double t_knee = 0.0;
};

/// Plateau = medians over the trailing plateau window; knee = first time
/// X <= 2 plateau_x; rate = least-squares slope of log X over the leading
/// decay_window of [t0, t_knee).
///
/// Throws NoPlateauError unless the medians of the two halves of the plateau
/// window agree to plateau_tolerance, and PreconditionError for records with
/// fewer than 10 samples.
DecayFit fit_decay_and_plateau(const TwinRunRecord& rec, const FitOptions& opt = {});

struct SweepRow {
  double alpha = 0.0;
  bool ok = false;
  std::string error;  ///< set when the run or its fit failed
  DecayFit fit;
  bool floor_limited = false;
  TwinRunRecord record;  ///< partial on blow-up, empty on other failures
};

struct SweepResult {
  std::vector<SweepRow> rows;  ///< in the order of the requested alphas
  /// mu > 0, alpha = 0 run on the same truth (scheme/observation floor).
  std::optional<SweepRow> floor;
  /// Log-log least-squares slopes over the rows that are ok and not
  /// floor-limited; NaN with fewer than 2 such rows.
  double slope_l2 = 0.0;
  double slope_h1 = 0.0;
  double slope_h2 = 0.0;
};

struct SweepOptions {
  int workers = 1;
  bool floor_run = true;
  /// A row is floor-limited if its plateau_l2 is below this multiple of the
  /// floor run's plateau_l2.
  double floor_factor = 10.0;
};

/// One twin run per alpha sharing the spun-up truth; runs execute on up to
/// `workers` threads and are merged by alpha order. Requires at least 3
/// positive alphas spanning a factor >= 4 (PreconditionError).
SweepResult alpha_sweep(const TwinConfig& base, const std::vector<double>& alphas,
                        const SweepOptions& opt = {});

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nsvda
