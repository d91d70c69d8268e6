#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nsvda/field.hpp"
#include "nsvda/models.hpp"

namespace nsvda {

enum class Scheme {
  if_rk4,      ///< integrating-factor (Lawson) RK4
  imex_cnab2,  ///< Crank-Nicolson / Adams-Bashforth 2
  etdrk4,      ///< exponential time differencing RK4 (Cox-Matthews)
};

/// When the assimilating system reads I_h(u) inside a step. Only used with
/// explicit nudging; etdrk4 with a diagonal interpolant couples the pair
/// exactly in its linear part instead.
enum class ObservationTiming {
  stage,       ///< at every stage, from the truth's stage value
  step_start,  ///< once per step, held fixed
};

std::string to_string(Scheme s);
std::optional<Scheme> scheme_from_string(const std::string& s);
std::string to_string(ObservationTiming t);
std::optional<ObservationTiming> observation_timing_from_string(const std::string& s);

struct StepperConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::etdrk4;
  double t_end = 1.0;
  double cfl_limit = 0.5;  ///< advisory
  ObservationTiming observation = ObservationTiming::stage;

  void validate() const;
  /// round(t / dt) with a check that t is a whole number of steps.
  long steps_for(double t) const;
};

/// du_i/dt = L_i u_i + N_i(u, t) for a set of fields, L_i diagonal in Fourier
/// space (one real rate per half-spectrum mode).
class SplitSystem {
 public:
  virtual ~SplitSystem() = default;
  virtual std::size_t size() const = 0;
  virtual const std::vector<double>& linear(std::size_t i) const = 0;
  virtual void explicit_terms(std::span<const VelocityField> state, double t,
                              std::span<VelocityField> out) = 0;
  /// Optional per-mode rates m with d(field 1)/dt += m * field 0 in the
  /// linear part (two-field systems, etdrk4 only).
  virtual const std::vector<double>* coupling() const { return nullptr; }
  /// Called once at the start of every step with the step's initial state.
  virtual void begin_step(std::span<const VelocityField> /*state*/, double /*t*/) {}
};

/// One scheme with its per-mode coefficients precomputed for a fixed dt.
class Integrator {
 public:
  Integrator(Scheme scheme, double dt, const SplitSystem& system);

  /// Advances state from t to t + dt; throws BlowUpError on non-finite output.
  void step(SplitSystem& system, std::vector<VelocityField>& state, double t);

  Scheme scheme() const { return scheme_; }
  double dt() const { return dt_; }

  /// Previous explicit terms (imex_cnab2 only; empty before the first step).
  const std::vector<VelocityField>& history() const { return previous_; }
  void set_history(std::vector<VelocityField> previous) { previous_ = std::move(previous); }

 private:
  struct Coefficients {
    std::vector<double> e, e2, q, f1, f2, f3;  // exponential schemes
    std::vector<double> plus, inv_minus;       // cnab2
  };
  void step_rk4(SplitSystem& system, std::vector<VelocityField>& state, double t);
  void step_etd(SplitSystem& system, std::vector<VelocityField>& state, double t);
  void step_cnab2(SplitSystem& system, std::vector<VelocityField>& state, double t);

  Scheme scheme_;
  double dt_;
  std::vector<Coefficients> coeffs_;
  Coefficients cross_;  // off-diagonal block when the system is coupled
  bool coupled_ = false;
  std::vector<VelocityField> previous_;
};

enum class RhsKind { nse, voigt_nudged };

/// Reference system du/dt = nse_rhs(u).
class NseSystem : public SplitSystem {
 public:
  explicit NseSystem(const PhysicsParams& p);
  std::size_t size() const override { return 1; }
  const std::vector<double>& linear(std::size_t) const override { return linear_; }
  void explicit_terms(std::span<const VelocityField> state, double t,
                      std::span<VelocityField> out) override;

 private:
  const PhysicsParams& p_;
  std::vector<double> linear_;
};

/// Nudged Voigt system; `fold_nudging` moves mu I_h into the linear operator
/// (only for diagonal interpolants). In the twin pair the folded observation
/// term becomes the linear coupling m_k u_k with m_k = mu mask_k / (1 + alpha^2 k^2).
class VoigtTerms {
 public:
  VoigtTerms(const PhysicsParams& p, bool fold_nudging);
  const std::vector<double>& linear() const { return linear_; }
  const std::vector<double>& coupling() const { return coupling_; }
  bool folded() const { return folded_; }
  /// Explicit part given the observation I_h(u) (ignored when mu = 0).
  VelocityField explicit_part(const VelocityField& v, const VelocityField* obs) const;
  /// Explicit part without the observation (folded only).
  VelocityField unobserved_part(const VelocityField& v) const;

 private:
  const PhysicsParams& p_;
  bool folded_;
  std::vector<double> linear_;
  std::vector<double> coupling_;
};

/// Whether a scheme integrates a diagonal nudging term inside its linear part.
bool folds_nudging(Scheme scheme, const PhysicsParams& p);

/// Single-system step. obs (I_h(u) at the start of the step) is required iff
/// rhs_kind is voigt_nudged and mu > 0, and is held fixed over the step.
VelocityField step(const VelocityField& state, RhsKind rhs_kind, const PhysicsParams& p,
                   const std::optional<VelocityField>& obs, const StepperConfig& cfg,
                   double t = 0.0);

/// Steps the truth (NSE) and the assimilating system (nudged Voigt) together.
/// The assimilating system only sees the truth through p.interpolant.apply.
class TwinStepper {
 public:
  /// Both systems share nu and the forcing; alpha, mu and the interpolant
  /// only act on the assimilating one.
  TwinStepper(const PhysicsParams& p, const StepperConfig& cfg);

  void step(VelocityField& u, VelocityField& v, double t);
  const Integrator& integrator() const { return integrator_; }
  Integrator& integrator() { return integrator_; }

 private:
  class PairSystem;
  std::shared_ptr<PairSystem> system_;
  Integrator integrator_;
};

/// Per-sample callback: (t, u, v).
using PairRecorder = std::function<void(double, const VelocityField&, const VelocityField&)>;

/// Advances (u, v) from t0 to t0 + steps * dt, calling recorder at t0 and then
/// every sample_every steps.
void advance_pair(VelocityField& u, VelocityField& v, TwinStepper& stepper, double t0, long steps,
                  long sample_every, const PairRecorder& recorder);

/// Single-field stepper for the reference system.
class NseStepper {
 public:
  NseStepper(const PhysicsParams& p, const StepperConfig& cfg);
  void step(VelocityField& u, double t);
  Integrator& integrator() { return integrator_; }

 private:
  NseSystem system_;
  Integrator integrator_;
};

}  // namespace nsvda
