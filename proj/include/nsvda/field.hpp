#pragma once

#include <complex>
#include <span>
#include <vector>

#include "nsvda/grid.hpp"

namespace nsvda {

using Complex = std::complex<double>;

/// One real periodic scalar field stored as half-spectrum Fourier coefficients.
///
/// Coefficients are normalized so that f(x) = sum_k c(k) exp(i k.x), i.e. they
/// are the physical Fourier amplitudes and Parseval reads ||f||^2 = sum |c|^2
/// over the full spectrum.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const GridSpec& grid) : grid_(grid), coeffs_(grid.modes()) {}

  const GridSpec& grid() const { return grid_; }
  std::span<Complex> coeffs() { return coeffs_; }
  std::span<const Complex> coeffs() const { return coeffs_; }

  Complex& at(int row, int col) { return coeffs_[grid_.index(row, col)]; }
  const Complex& at(int row, int col) const { return coeffs_[grid_.index(row, col)]; }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);

  /// Zero the mean, Nyquist and dealiased modes and restore Hermitian symmetry
  /// of the kx = 0 column.
  void enforce_invariants();

  bool is_finite() const;

 private:
  GridSpec grid_;
  std::vector<Complex> coeffs_;
};

/// Two-component velocity field on the torus (x- and y-velocity).
struct VelocityField {
  SpectralField x;
  SpectralField y;

  VelocityField() = default;
  explicit VelocityField(const GridSpec& grid) : x(grid), y(grid) {}
  VelocityField(SpectralField ux, SpectralField uy);

  const GridSpec& grid() const { return x.grid(); }

  VelocityField& operator+=(const VelocityField& o);
  VelocityField& operator-=(const VelocityField& o);
  VelocityField& operator*=(double s);
  /// this += s * o
  VelocityField& axpy(double s, const VelocityField& o);

  bool is_finite() const;
};

VelocityField operator+(VelocityField a, const VelocityField& b);
VelocityField operator-(VelocityField a, const VelocityField& b);
VelocityField operator*(double s, VelocityField a);

/// Throws StructuralError when the grids differ.
void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

}  // namespace nsvda
