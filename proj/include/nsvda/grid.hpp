#pragma once

#include <cstddef>
#include <cstdint>

namespace nsvda {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
/// Smallest Stokes eigenvalue on the unit torus.
inline constexpr double kLambda1 = 4.0 * kPi * kPi;

/// Resolution of the unit torus [0,1)^2 and the spectral truncation.
///
/// Physical data is n x n, row-major with x fastest. Spectral data uses the
/// half-spectrum layout n x (n/2+1): row r holds ky = r (r <= n/2) or r - n,
/// column c holds kx = c. Wavevectors are 2*pi times these integer indices.
class GridSpec {
 public:
  explicit GridSpec(int n = 32, double dealias_fraction = 2.0 / 3.0);

  int n() const { return n_; }
  double dealias_fraction() const { return dealias_fraction_; }
  int columns() const { return n_ / 2 + 1; }
  std::size_t modes() const { return static_cast<std::size_t>(n_) * columns(); }
  std::size_t points() const { return static_cast<std::size_t>(n_) * n_; }

  int ky(int row) const { return row <= n_ / 2 ? row : row - n_; }
  int kx(int col) const { return col; }

  /// Largest retained |k_i| (integer index) after dealiasing.
  int cutoff() const { return cutoff_; }

  bool retained(int row, int col) const {
    const int a = ky(row) < 0 ? -ky(row) : ky(row);
    return col <= cutoff_ && a <= cutoff_ && !(row == 0 && col == 0);
  }

  /// |k|^2 with the 2*pi factor included.
  double k2(int row, int col) const {
    const double x = kTwoPi * kx(col);
    const double y = kTwoPi * ky(row);
    return x * x + y * y;
  }

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * columns() + col;
  }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.n_ == b.n_ && a.dealias_fraction_ == b.dealias_fraction_;
  }

 private:
  int n_;
  double dealias_fraction_;
  int cutoff_;
};

}  // namespace nsvda
