#include "nsvda/field.hpp"

#include <cmath>
#include <string>

#include "nsvda/errors.hpp"

namespace nsvda {

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) {
    throw StructuralError(std::string(what) + ": grid mismatch (n = " + std::to_string(a.n()) +
                          " vs " + std::to_string(b.n()) + ")");
  }
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(grid_, o.grid_, "SpectralField +=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(grid_, o.grid_, "SpectralField -=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

void SpectralField::enforce_invariants() {
  const int n = grid_.n();
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < grid_.columns(); ++c) {
      if (!grid_.retained(r, c)) at(r, c) = 0.0;
    }
  }
  // kx = 0 column: c(-ky) = conj(c(ky)). Average the pair so that the result
  // is the Hermitian part of whatever was stored.
  for (int r = 1; r < n / 2; ++r) {
    const Complex a = at(r, 0);
    const Complex b = std::conj(at(n - r, 0));
    const Complex m = 0.5 * (a + b);
    at(r, 0) = m;
    at(n - r, 0) = std::conj(m);
  }
}

bool SpectralField::is_finite() const {
  for (const auto& c : coeffs_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

VelocityField::VelocityField(SpectralField ux, SpectralField uy) : x(std::move(ux)), y(std::move(uy)) {
  require_same_grid(x.grid(), y.grid(), "VelocityField");
}

VelocityField& VelocityField::operator+=(const VelocityField& o) {
  x += o.x;
  y += o.y;
  return *this;
}

VelocityField& VelocityField::operator-=(const VelocityField& o) {
  x -= o.x;
  y -= o.y;
  return *this;
}

VelocityField& VelocityField::operator*=(double s) {
  x *= s;
  y *= s;
  return *this;
}

VelocityField& VelocityField::axpy(double s, const VelocityField& o) {
  require_same_grid(grid(), o.grid(), "VelocityField axpy");
  auto ax = x.coeffs();
  auto ay = y.coeffs();
  auto bx = o.x.coeffs();
  auto by = o.y.coeffs();
  for (std::size_t i = 0; i < ax.size(); ++i) {
    ax[i] += s * bx[i];
    ay[i] += s * by[i];
  }
  return *this;
}

bool VelocityField::is_finite() const { return x.is_finite() && y.is_finite(); }

VelocityField operator+(VelocityField a, const VelocityField& b) { return a += b; }
VelocityField operator-(VelocityField a, const VelocityField& b) { return a -= b; }
VelocityField operator*(double s, VelocityField a) { return a *= s; }

}  // namespace nsvda
