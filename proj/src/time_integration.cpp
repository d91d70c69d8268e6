#include "nsvda/time_integration.hpp"

#include <cmath>

#include "nsvda/errors.hpp"
#include "nsvda/spectral_ops.hpp"

namespace nsvda {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::if_rk4: return "if_rk4";
    case Scheme::imex_cnab2: return "imex_cnab2";
    case Scheme::etdrk4: return "etdrk4";
  }
  return "unknown";
}

std::optional<Scheme> scheme_from_string(const std::string& s) {
  if (s == "if_rk4") return Scheme::if_rk4;
  if (s == "imex_cnab2") return Scheme::imex_cnab2;
  if (s == "etdrk4") return Scheme::etdrk4;
  return std::nullopt;
}

std::string to_string(ObservationTiming t) {
  return t == ObservationTiming::stage ? "stage" : "step_start";
}

std::optional<ObservationTiming> observation_timing_from_string(const std::string& s) {
  if (s == "stage") return ObservationTiming::stage;
  if (s == "step_start") return ObservationTiming::step_start;
  return std::nullopt;
}

void StepperConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be > 0");
  if (!(t_end >= 0.0)) throw ParameterError("t_end must be >= 0");
  if (!(cfl_limit > 0.0)) throw ParameterError("cfl_limit must be > 0");
}

long StepperConfig::steps_for(double t) const {
  const double s = t / dt;
  const long k = std::lround(s);
  if (std::abs(s - static_cast<double>(k)) > 1e-6 * std::max(1.0, s)) {
    throw ParameterError("duration " + std::to_string(t) + " is not a multiple of dt");
  }
  return k;
}

namespace {

std::span<Complex> comp(VelocityField& v, int c) { return c == 0 ? v.x.coeffs() : v.y.coeffs(); }

std::vector<double> viscous_rates(const GridSpec& g, double nu, double alpha) {
  std::vector<double> rates(g.modes());
  const double a2 = alpha * alpha;
  for (int r = 0; r < g.n(); ++r)
    for (int c = 0; c < g.columns(); ++c) {
      const double k2 = g.k2(r, c);
      rates[g.index(r, c)] = -nu * k2 / (1.0 + a2 * k2);
    }
  return rates;
}

void check_finite(const std::vector<VelocityField>& state, double t) {
  for (const auto& f : state) {
    if (!f.is_finite()) throw BlowUpError(t, "non-finite values in the solution");
  }
}

// phi-function coefficients of ETDRK4 by the contour-integral average.
void etd_coefficients(double z, double dt, double& q, double& f1, double& f2, double& f3) {
  constexpr int kPoints = 32;
  double sq = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (int j = 0; j < kPoints; ++j) {
    const Complex r = z + std::exp(Complex(0.0, kPi * (j + 0.5) / kPoints));
    const Complex er = std::exp(r);
    const Complex r3 = r * r * r;
    sq += std::real((std::exp(r / 2.0) - 1.0) / r);
    s1 += std::real((-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3);
    s2 += std::real((2.0 + r + er * (r - 2.0)) / r3);
    s3 += std::real((-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3);
  }
  q = dt * sq / kPoints;
  f1 = dt * s1 / kPoints;
  f2 = dt * s2 / kPoints;
  f3 = dt * s3 / kPoints;
}

struct EtdSet {
  double e, e2, q, f1, f2, f3;
};

EtdSet etd_scalar(double z, double dt) {
  EtdSet s{std::exp(z), std::exp(0.5 * z), 0, 0, 0, 0};
  etd_coefficients(z, dt, s.q, s.f1, s.f2, s.f3);
  return s;
}

// Off-diagonal entries of the ETDRK4 coefficient matrices for the per-mode
// block [[a, 0], [m, b]]: f(M)_{21} = m * (f(a) - f(b)) / (a - b). za = dt a,
// zb = dt b. Close eigenvalues use a contour integral for the divided difference.
EtdSet etd_cross(double za, double zb, double m, double dt) {
  const double md = m * dt;
  if (std::abs(za - zb) >= 0.5) {
    const EtdSet a = etd_scalar(za, dt), b = etd_scalar(zb, dt);
    const double w = md / (za - zb);
    return {w * (a.e - b.e),   w * (a.e2 - b.e2), w * (a.q - b.q),
            w * (a.f1 - b.f1), w * (a.f2 - b.f2), w * (a.f3 - b.f3)};
  }
  const double c = 0.5 * (za + zb);
  const double center = std::abs(c) < 2.0 ? 0.0 : c;
  const double radius = std::abs(c) < 2.0 ? 4.0 : 1.0;
  constexpr int kPoints = 64;
  Complex s[6] = {};
  for (int j = 0; j < kPoints; ++j) {
    const Complex dir = std::exp(Complex(0.0, 2.0 * kPi * (j + 0.5) / kPoints));
    const Complex r = center + radius * dir;
    const Complex w = radius * dir / ((r - za) * (r - zb));
    const Complex er = std::exp(r);
    const Complex r3 = r * r * r;
    s[0] += w * er;
    s[1] += w * std::exp(r / 2.0);
    s[2] += w * (std::exp(r / 2.0) - 1.0) / r;
    s[3] += w * (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3;
    s[4] += w * (2.0 + r + er * (r - 2.0)) / r3;
    s[5] += w * (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3;
  }
  const double k = md / kPoints;
  return {k * s[0].real(),      k * s[1].real(),      k * dt * s[2].real(),
          k * dt * s[3].real(), k * dt * s[4].real(), k * dt * s[5].real()};
}

}  // namespace

Integrator::Integrator(Scheme scheme, double dt, const SplitSystem& system)
    : scheme_(scheme), dt_(dt) {
  if (!(dt > 0.0)) throw ParameterError("dt must be > 0");
  coeffs_.resize(system.size());
  for (std::size_t i = 0; i < system.size(); ++i) {
    const auto& lin = system.linear(i);
    Coefficients& k = coeffs_[i];
    const std::size_t m = lin.size();
    if (scheme == Scheme::imex_cnab2) {
      k.plus.resize(m);
      k.inv_minus.resize(m);
      for (std::size_t j = 0; j < m; ++j) {
        k.plus[j] = 1.0 + 0.5 * dt * lin[j];
        k.inv_minus[j] = 1.0 / (1.0 - 0.5 * dt * lin[j]);
      }
      continue;
    }
    k.e.resize(m);
    k.e2.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      k.e[j] = std::exp(dt * lin[j]);
      k.e2[j] = std::exp(0.5 * dt * lin[j]);
    }
    if (scheme == Scheme::etdrk4) {
      k.q.resize(m);
      k.f1.resize(m);
      k.f2.resize(m);
      k.f3.resize(m);
      for (std::size_t j = 0; j < m; ++j) {
        etd_coefficients(dt * lin[j], dt, k.q[j], k.f1[j], k.f2[j], k.f3[j]);
      }
    }
  }
  if (const auto* m = system.coupling()) {
    if (scheme != Scheme::etdrk4 || system.size() != 2) {
      throw StructuralError("Integrator: linear coupling needs etdrk4 on a pair");
    }
    const auto& a = system.linear(0);
    const auto& b = system.linear(1);
    const std::size_t n = b.size();
    Coefficients& x = cross_;
    for (auto* v : {&x.e, &x.e2, &x.q, &x.f1, &x.f2, &x.f3}) v->assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if ((*m)[j] == 0.0) continue;
      const EtdSet c = etd_cross(dt * a[j], dt * b[j], (*m)[j], dt);
      x.e[j] = c.e;
      x.e2[j] = c.e2;
      x.q[j] = c.q;
      x.f1[j] = c.f1;
      x.f2[j] = c.f2;
      x.f3[j] = c.f3;
    }
    coupled_ = true;
  }
}

void Integrator::step(SplitSystem& system, std::vector<VelocityField>& state, double t) {
  if (state.size() != coeffs_.size()) throw StructuralError("Integrator: state size mismatch");
  system.begin_step(state, t);
  switch (scheme_) {
    case Scheme::if_rk4: step_rk4(system, state, t); break;
    case Scheme::etdrk4: step_etd(system, state, t); break;
    case Scheme::imex_cnab2: step_cnab2(system, state, t); break;
  }
  check_finite(state, t + dt_);
}

void Integrator::step_rk4(SplitSystem& system, std::vector<VelocityField>& u, double t) {
  const std::size_t nf = u.size();
  const double h = dt_;
  std::vector<VelocityField> n0(nf), n1(nf), n2(nf), n3(nf), s(u);

  system.explicit_terms(u, t, n0);
  for (std::size_t i = 0; i < nf; ++i)
    for (int c = 0; c < 2; ++c) {
      auto y = comp(s[i], c);
      auto a = comp(u[i], c);
      auto na = comp(n0[i], c);
      const auto& e2 = coeffs_[i].e2;
      for (std::size_t j = 0; j < y.size(); ++j) y[j] = e2[j] * (a[j] + 0.5 * h * na[j]);
    }
  system.explicit_terms(s, t + 0.5 * h, n1);
  for (std::size_t i = 0; i < nf; ++i)
    for (int c = 0; c < 2; ++c) {
      auto y = comp(s[i], c);
      auto a = comp(u[i], c);
      auto nb = comp(n1[i], c);
      const auto& e2 = coeffs_[i].e2;
      for (std::size_t j = 0; j < y.size(); ++j) y[j] = e2[j] * a[j] + 0.5 * h * nb[j];
    }
  system.explicit_terms(s, t + 0.5 * h, n2);
  for (std::size_t i = 0; i < nf; ++i)
    for (int c = 0; c < 2; ++c) {
      auto y = comp(s[i], c);
      auto a = comp(u[i], c);
      auto nc = comp(n2[i], c);
      const auto& e = coeffs_[i].e;
      const auto& e2 = coeffs_[i].e2;
      for (std::size_t j = 0; j < y.size(); ++j) y[j] = e[j] * a[j] + h * e2[j] * nc[j];
    }
  system.explicit_terms(s, t + h, n3);
  for (std::size_t i = 0; i < nf; ++i)
    for (int c = 0; c < 2; ++c) {
      auto a = comp(u[i], c);
      auto k0 = comp(n0[i], c);
      auto k1 = comp(n1[i], c);
      auto k2 = comp(n2[i], c);
      auto k3 = comp(n3[i], c);
      const auto& e = coeffs_[i].e;
      const auto& e2 = coeffs_[i].e2;
      for (std::size_t j = 0; j < a.size(); ++j) {
        a[j] = e[j] * a[j] +
               (h / 6.0) * (e[j] * k0[j] + 2.0 * e2[j] * (k1[j] + k2[j]) + k3[j]);
      }
    }
}

void Integrator::step_etd(SplitSystem& system, std::vector<VelocityField>& u, double t) {
  const std::size_t nf = u.size();
  const double h = dt_;
  std::vector<VelocityField> nu(nf), na(nf), nb(nf), nc(nf), a(u), b(u), cst(u);
  const Coefficients& x = cross_;

  system.explicit_terms(u, t, nu);
  for (std::size_t i = 0; i < nf; ++i)
    for (int c = 0; c < 2; ++c) {
      auto y = comp(a[i], c);
      auto s = comp(u[i], c);
      auto n = comp(nu[i], c);
      const auto& k = coeffs_[i];
      for (std::size_t j = 0; j < y.size(); ++j) y[j] = k.e2[j] * s[j] + k.q[j] * n[j];
      if (coupled_ && i == 1) {
        auto s0 = comp(u[0], c);
        auto n0 = comp(nu[0], c);
        for (std::size_t j = 0; j < y.size(); ++j) y[j] += x.e2[j] * s0[j] + x.q[j] * n0[j];
      }
    }
  system.explicit_terms(a, t + 0.5 * h, na);
  for (std::size_t i = 0; i < nf; ++i)
    for (int c = 0; c < 2; ++c) {
      auto y = comp(b[i], c);
      auto s = comp(u[i], c);
      auto n = comp(na[i], c);
      const auto& k = coeffs_[i];
      for (std::size_t j = 0; j < y.size(); ++j) y[j] = k.e2[j] * s[j] + k.q[j] * n[j];
      if (coupled_ && i == 1) {
        auto s0 = comp(u[0], c);
        auto n0 = comp(na[0], c);
        for (std::size_t j = 0; j < y.size(); ++j) y[j] += x.e2[j] * s0[j] + x.q[j] * n0[j];
      }
    }
  system.explicit_terms(b, t + 0.5 * h, nb);
  for (std::size_t i = 0; i < nf; ++i)
    for (int c = 0; c < 2; ++c) {
      auto y = comp(cst[i], c);
      auto s = comp(a[i], c);
      auto n0 = comp(nu[i], c);
      auto n2 = comp(nb[i], c);
      const auto& k = coeffs_[i];
      for (std::size_t j = 0; j < y.size(); ++j)
        y[j] = k.e2[j] * s[j] + k.q[j] * (2.0 * n2[j] - n0[j]);
      if (coupled_ && i == 1) {
        auto s0 = comp(a[0], c);
        auto m0 = comp(nu[0], c);
        auto m2 = comp(nb[0], c);
        for (std::size_t j = 0; j < y.size(); ++j)
          y[j] += x.e2[j] * s0[j] + x.q[j] * (2.0 * m2[j] - m0[j]);
      }
    }
  system.explicit_terms(cst, t + h, nc);
  // Field 1 first: its coupling reads field 0 at the start of the step.
  for (std::size_t i = nf; i-- > 0;)
    for (int c = 0; c < 2; ++c) {
      auto s = comp(u[i], c);
      auto n0 = comp(nu[i], c);
      auto n1 = comp(na[i], c);
      auto n2 = comp(nb[i], c);
      auto n3 = comp(nc[i], c);
      const auto& k = coeffs_[i];
      for (std::size_t j = 0; j < s.size(); ++j) {
        s[j] = k.e[j] * s[j] + k.f1[j] * n0[j] + 2.0 * k.f2[j] * (n1[j] + n2[j]) + k.f3[j] * n3[j];
      }
      if (coupled_ && i == 1) {
        auto s0 = comp(u[0], c);
        auto m0 = comp(nu[0], c);
        auto m1 = comp(na[0], c);
        auto m2 = comp(nb[0], c);
        auto m3 = comp(nc[0], c);
        for (std::size_t j = 0; j < s.size(); ++j) {
          s[j] += x.e[j] * s0[j] + x.f1[j] * m0[j] + 2.0 * x.f2[j] * (m1[j] + m2[j]) +
                  x.f3[j] * m3[j];
        }
      }
    }
}

void Integrator::step_cnab2(SplitSystem& system, std::vector<VelocityField>& u, double t) {
  const std::size_t nf = u.size();
  std::vector<VelocityField> now(nf);
  system.explicit_terms(u, t, now);
  // The first step has no history: CN with forward Euler on the explicit part.
  const bool start = previous_.size() != nf;
  for (std::size_t i = 0; i < nf; ++i)
    for (int c = 0; c < 2; ++c) {
      auto x = comp(u[i], c);
      auto n1 = comp(now[i], c);
      auto n0 = comp(start ? now[i] : previous_[i], c);
      const auto& k = coeffs_[i];
      for (std::size_t j = 0; j < x.size(); ++j) {
        x[j] = k.inv_minus[j] * (k.plus[j] * x[j] + dt_ * (1.5 * n1[j] - 0.5 * n0[j]));
      }
    }
  previous_ = std::move(now);
}

NseSystem::NseSystem(const PhysicsParams& p)
    : p_(p), linear_(viscous_rates(p.forcing.grid(), p.nu, 0.0)) {}

void NseSystem::explicit_terms(std::span<const VelocityField> state, double,
                               std::span<VelocityField> out) {
  const VelocityField& u = state[0];
  require_same_grid(u.grid(), p_.forcing.grid(), "forcing");
  VelocityField n = p_.forcing;
  if (p_.nonlinear) n.axpy(-1.0, nonlinear_term(u, u));
  out[0] = std::move(n);
}

bool folds_nudging(Scheme scheme, const PhysicsParams& p) {
  return scheme == Scheme::etdrk4 && p.mu > 0.0 && p.interpolant.diagonal();
}

VoigtTerms::VoigtTerms(const PhysicsParams& p, bool fold_nudging)
    : p_(p), folded_(fold_nudging), linear_(viscous_rates(p.forcing.grid(), p.nu, p.alpha)) {
  if (folded_) {
    coupling_.assign(linear_.size(), 0.0);
    const GridSpec& g = p.forcing.grid();
    const auto mask = p.interpolant.diagonal_mask(g);
    const double a2 = p.alpha * p.alpha;
    for (int r = 0; r < g.n(); ++r)
      for (int c = 0; c < g.columns(); ++c) {
        const std::size_t j = g.index(r, c);
        coupling_[j] = p.mu * mask[j] / (1.0 + a2 * g.k2(r, c));
        linear_[j] -= coupling_[j];
      }
  }
}

VelocityField VoigtTerms::unobserved_part(const VelocityField& v) const {
  if (!folded_) throw StructuralError("VoigtTerms: observation is not folded");
  VelocityField n = p_.forcing;
  if (p_.nonlinear) n.axpy(-1.0, nonlinear_term(v, v));
  return helmholtz_invert(n, p_.alpha);
}

VelocityField VoigtTerms::explicit_part(const VelocityField& v, const VelocityField* obs) const {
  require_same_grid(v.grid(), p_.forcing.grid(), "forcing");
  VelocityField n = p_.forcing;
  if (p_.nonlinear) n.axpy(-1.0, nonlinear_term(v, v));
  if (p_.mu > 0.0) {
    if (obs == nullptr) throw ParameterError("nudged system needs an observation when mu > 0");
    n.axpy(p_.mu, *obs);
    if (!folded_) n.axpy(-p_.mu, p_.interpolant.apply(v));
  }
  return helmholtz_invert(n, p_.alpha);
}

namespace {

void check_explicit_nudging(const PhysicsParams& p, const StepperConfig& cfg) {
  if (p.mu > 0.0 && !folds_nudging(cfg.scheme, p) && p.mu * cfg.dt > 0.5) {
    throw ParameterError("explicit nudging needs mu * dt <= 0.5 (mu = " + std::to_string(p.mu) +
                         ", dt = " + std::to_string(cfg.dt) + ")");
  }
}

class FrozenVoigtSystem : public SplitSystem {
 public:
  FrozenVoigtSystem(const PhysicsParams& p, bool fold, const VelocityField* obs)
      : terms_(p, fold), obs_(obs) {}
  std::size_t size() const override { return 1; }
  const std::vector<double>& linear(std::size_t) const override { return terms_.linear(); }
  void explicit_terms(std::span<const VelocityField> state, double,
                      std::span<VelocityField> out) override {
    out[0] = terms_.explicit_part(state[0], obs_);
  }

 private:
  VoigtTerms terms_;
  const VelocityField* obs_;
};

}  // namespace

VelocityField step(const VelocityField& state, RhsKind rhs_kind, const PhysicsParams& p,
                   const std::optional<VelocityField>& obs, const StepperConfig& cfg, double t) {
  cfg.validate();
  p.validate();
  std::vector<VelocityField> s{state};
  if (rhs_kind == RhsKind::nse) {
    NseSystem sys(p);
    Integrator(cfg.scheme, cfg.dt, sys).step(sys, s, t);
    return std::move(s[0]);
  }
  if (p.mu > 0.0 && !obs) throw ParameterError("step: obs is required when mu > 0");
  check_explicit_nudging(p, cfg);
  FrozenVoigtSystem sys(p, folds_nudging(cfg.scheme, p), obs ? &*obs : nullptr);
  Integrator(cfg.scheme, cfg.dt, sys).step(sys, s, t);
  return std::move(s[0]);
}

class TwinStepper::PairSystem : public SplitSystem {
 public:
  PairSystem(const PhysicsParams& p, const StepperConfig& cfg)
      : p_(p), truth_(p), assim_(p, folds_nudging(cfg.scheme, p)), timing_(cfg.observation) {}

  std::size_t size() const override { return 2; }
  const std::vector<double>& linear(std::size_t i) const override {
    return i == 0 ? truth_.linear(0) : assim_.linear();
  }
  const std::vector<double>* coupling() const override {
    return assim_.folded() ? &assim_.coupling() : nullptr;
  }

  void begin_step(std::span<const VelocityField> state, double) override {
    if (timing_ == ObservationTiming::step_start && p_.mu > 0.0 && !assim_.folded()) {
      held_ = p_.interpolant.apply(state[0]);
    }
  }

  void explicit_terms(std::span<const VelocityField> state, double t,
                      std::span<VelocityField> out) override {
    truth_.explicit_terms(state.subspan(0, 1), t, out.subspan(0, 1));
    if (assim_.folded()) {
      out[1] = assim_.unobserved_part(state[1]);
      return;
    }
    if (p_.mu == 0.0) {
      out[1] = assim_.explicit_part(state[1], nullptr);
      return;
    }
    if (timing_ == ObservationTiming::stage) {
      const VelocityField obs = p_.interpolant.apply(state[0]);
      out[1] = assim_.explicit_part(state[1], &obs);
    } else {
      out[1] = assim_.explicit_part(state[1], &held_);
    }
  }

 private:
  const PhysicsParams& p_;
  NseSystem truth_;
  VoigtTerms assim_;
  ObservationTiming timing_;
  VelocityField held_;
};

TwinStepper::TwinStepper(const PhysicsParams& p, const StepperConfig& cfg)
    : system_((cfg.validate(), p.validate(), check_explicit_nudging(p, cfg),
               std::make_shared<PairSystem>(p, cfg))),
      integrator_(cfg.scheme, cfg.dt, *system_) {}

void TwinStepper::step(VelocityField& u, VelocityField& v, double t) {
  std::vector<VelocityField> s{std::move(u), std::move(v)};
  try {
    integrator_.step(*system_, s, t);
  } catch (...) {
    u = std::move(s[0]);
    v = std::move(s[1]);
    throw;
  }
  u = std::move(s[0]);
  v = std::move(s[1]);
}

void advance_pair(VelocityField& u, VelocityField& v, TwinStepper& stepper, double t0, long steps,
                  long sample_every, const PairRecorder& recorder) {
  require_same_grid(u.grid(), v.grid(), "advance_pair");
  if (sample_every < 1) throw ParameterError("sample interval must be at least one step");
  const double dt = stepper.integrator().dt();
  if (recorder) recorder(t0, u, v);
  for (long k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    stepper.step(u, v, t);
    if (recorder && (k + 1) % sample_every == 0) recorder(t0 + static_cast<double>(k + 1) * dt, u, v);
  }
}

NseStepper::NseStepper(const PhysicsParams& p, const StepperConfig& cfg)
    : system_((cfg.validate(), p.validate(), p)), integrator_(cfg.scheme, cfg.dt, system_) {}

void NseStepper::step(VelocityField& u, double t) {
  std::vector<VelocityField> s{std::move(u)};
  integrator_.step(system_, s, t);
  u = std::move(s[0]);
}

}  // namespace nsvda
