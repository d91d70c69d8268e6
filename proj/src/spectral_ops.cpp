#include "nsvda/spectral_ops.hpp"

#include <algorithm>
#include <cmath>

#include "nsvda/errors.hpp"
#include "nsvda/fft.hpp"

namespace nsvda {
namespace {

// Half-spectrum multiplicity: columns kx > 0 stand for themselves and their
// conjugate partner.
inline double weight(int col) { return col == 0 ? 1.0 : 2.0; }

template <class Fn>
VelocityField map_modes(const VelocityField& v, Fn&& factor) {
  VelocityField out(v.grid());
  const GridSpec& g = v.grid();
  for (int r = 0; r < g.n(); ++r) {
    for (int c = 0; c < g.columns(); ++c) {
      const double s = factor(g.k2(r, c));
      out.x.at(r, c) = s * v.x.at(r, c);
      out.y.at(r, c) = s * v.y.at(r, c);
    }
  }
  return out;
}

// i k_x f or i k_y f on the half spectrum.
SpectralField derivative(const SpectralField& f, bool along_x) {
  SpectralField out(f.grid());
  const GridSpec& g = f.grid();
  for (int r = 0; r < g.n(); ++r) {
    for (int c = 0; c < g.columns(); ++c) {
      const double k = kTwoPi * (along_x ? g.kx(c) : g.ky(r));
      const Complex a = f.at(r, c);
      out.at(r, c) = Complex(-k * a.imag(), k * a.real());
    }
  }
  return out;
}

}  // namespace

VelocityField leray_project(const SpectralField& ax, const SpectralField& ay) {
  require_same_grid(ax.grid(), ay.grid(), "leray_project");
  const GridSpec& g = ax.grid();
  VelocityField out(g);
  for (int r = 0; r < g.n(); ++r) {
    for (int c = 0; c < g.columns(); ++c) {
      if (!g.retained(r, c)) continue;
      const double kx = kTwoPi * g.kx(c);
      const double ky = kTwoPi * g.ky(r);
      const double k2 = kx * kx + ky * ky;
      const Complex a = ax.at(r, c);
      const Complex b = ay.at(r, c);
      const Complex dot = (kx * a + ky * b) / k2;
      out.x.at(r, c) = a - kx * dot;
      out.y.at(r, c) = b - ky * dot;
    }
  }
  out.x.enforce_invariants();
  out.y.enforce_invariants();
  return out;
}

VelocityField leray_project(const VelocityField& a) { return leray_project(a.x, a.y); }

VelocityField stokes_apply(const VelocityField& v) {
  return map_modes(v, [](double k2) { return k2; });
}

VelocityField helmholtz_invert(const VelocityField& v, double alpha) {
  if (!(alpha >= 0.0)) throw ParameterError("helmholtz_invert: alpha must be >= 0");
  const double a2 = alpha * alpha;
  return map_modes(v, [a2](double k2) { return 1.0 / (1.0 + a2 * k2); });
}

VelocityField helmholtz_apply(const VelocityField& v, double alpha) {
  if (!(alpha >= 0.0)) throw ParameterError("helmholtz_apply: alpha must be >= 0");
  const double a2 = alpha * alpha;
  return map_modes(v, [a2](double k2) { return 1.0 + a2 * k2; });
}

VelocityField nonlinear_term(const VelocityField& u, const VelocityField& v) {
  require_same_grid(u.grid(), v.grid(), "nonlinear_term");
  const GridSpec& g = u.grid();
  const Transform& fft = Transform::get(g.n());
  const std::size_t np = g.points();

  std::vector<double> ux(np), uy(np), dxvx(np), dyvx(np), dxvy(np), dyvy(np);
  fft.to_physical(u.x, ux);
  fft.to_physical(u.y, uy);
  fft.to_physical(derivative(v.x, true), dxvx);
  fft.to_physical(derivative(v.x, false), dyvx);
  fft.to_physical(derivative(v.y, true), dxvy);
  fft.to_physical(derivative(v.y, false), dyvy);

  // Reuse the derivative buffers for the two advected components.
  for (std::size_t i = 0; i < np; ++i) {
    dxvx[i] = ux[i] * dxvx[i] + uy[i] * dyvx[i];
    dxvy[i] = ux[i] * dxvy[i] + uy[i] * dyvy[i];
  }
  SpectralField nx(g), ny(g);
  fft.to_spectral(dxvx, nx.coeffs());
  fft.to_spectral(dxvy, ny.coeffs());
  return leray_project(nx, ny);
}

Norms norms(const VelocityField& v) {
  const GridSpec& g = v.grid();
  double l2 = 0.0, h1 = 0.0, h2 = 0.0;
  for (int r = 0; r < g.n(); ++r) {
    for (int c = 0; c < g.columns(); ++c) {
      const double e = weight(c) * (std::norm(v.x.at(r, c)) + std::norm(v.y.at(r, c)));
      const double k2 = g.k2(r, c);
      l2 += e;
      h1 += k2 * e;
      h2 += k2 * k2 * e;
    }
  }
  return {std::sqrt(l2), std::sqrt(h1), std::sqrt(h2)};
}

double inner(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid(), b.grid(), "inner");
  const GridSpec& g = a.grid();
  double s = 0.0;
  for (int r = 0; r < g.n(); ++r) {
    for (int c = 0; c < g.columns(); ++c) {
      s += weight(c) * std::real(std::conj(a.at(r, c)) * b.at(r, c));
    }
  }
  return s;
}

double inner(const VelocityField& u, const VelocityField& v) {
  return inner(u.x, v.x) + inner(u.y, v.y);
}

double divergence_ratio(const VelocityField& v) {
  const GridSpec& g = v.grid();
  double div = 0.0, amp = 0.0;
  for (int r = 0; r < g.n(); ++r) {
    for (int c = 0; c < g.columns(); ++c) {
      const Complex a = v.x.at(r, c);
      const Complex b = v.y.at(r, c);
      div = std::max(div, std::abs(kTwoPi * g.kx(c) * a + kTwoPi * g.ky(r) * b));
      amp = std::max({amp, std::abs(a), std::abs(b)});
    }
  }
  return amp == 0.0 ? 0.0 : div / amp;
}

double max_speed(const VelocityField& v) {
  const auto ux = to_physical(v.x);
  const auto uy = to_physical(v.y);
  double m = 0.0;
  for (std::size_t i = 0; i < ux.size(); ++i) m = std::max(m, std::hypot(ux[i], uy[i]));
  return m;
}

}  // namespace nsvda
