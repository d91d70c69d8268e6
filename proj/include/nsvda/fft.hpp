#pragma once

#include <span>
#include <vector>

#include "nsvda/field.hpp"

namespace nsvda {

/// Real <-> half-spectrum transforms on an n x n grid, backed by FFTW.
///
/// Plans are created once per resolution with FFTW_ESTIMATE (deterministic
/// across processes) and shared; execution is thread-safe.
class Transform {
 public:
  static const Transform& get(int n);

  int n() const { return n_; }

  /// Grid values of a spectral field; out.size() == n*n.
  void to_physical(const SpectralField& f, std::span<double> out) const;
  /// Same, from a raw half-spectrum (input is preserved).
  void to_physical(std::span<const Complex> coeffs, std::span<double> out) const;

  /// Normalized coefficients of grid values. No masking is applied.
  void to_spectral(std::span<const double> values, std::span<Complex> out) const;

  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;
  ~Transform();

 private:
  explicit Transform(int n);
  int n_;
  void* forward_;
  void* backward_;
};

/// Convenience wrappers that allocate.
std::vector<double> to_physical(const SpectralField& f);
/// Transforms grid values and applies the field invariants (mask, mean, symmetry).
SpectralField from_physical(const GridSpec& grid, std::span<const double> values);

}  // namespace nsvda
