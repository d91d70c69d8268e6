#include "nsvda/random_fields.hpp"

#include <cmath>

#include "nsvda/errors.hpp"
#include "nsvda/spectral_ops.hpp"

namespace nsvda {

VelocityField random_solenoidal(const GridSpec& grid, Rng& rng, const SpectrumShape& shape) {
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField ax(grid), ay(grid);
  const int n = grid.n();
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < grid.columns(); ++c) {
      // Draw each independent mode once; the kx = 0, ky < 0 half is mirrored.
      if (c == 0 && grid.ky(r) < 0) continue;
      if (!grid.retained(r, c)) continue;
      const double kappa = std::sqrt(grid.k2(r, c)) / kTwoPi;
      const double e = shape(kappa);
      if (!(e > 0.0)) continue;
      // Mode count in a shell grows like 2 pi kappa; two components share e.
      const double sigma = std::sqrt(e / (2.0 * kPi * kappa) / 2.0);
      ax.at(r, c) = sigma * Complex(normal(rng), normal(rng)) / std::sqrt(2.0);
      ay.at(r, c) = sigma * Complex(normal(rng), normal(rng)) / std::sqrt(2.0);
      if (c == 0) {
        ax.at(n - r, 0) = std::conj(ax.at(r, 0));
        ay.at(n - r, 0) = std::conj(ay.at(r, 0));
      }
    }
  }
  return leray_project(ax, ay);
}

VelocityField random_solenoidal(const GridSpec& grid, Rng& rng, const SpectrumShape& shape,
                                double l2) {
  VelocityField v = random_solenoidal(grid, rng, shape);
  const double now = norms(v).l2;
  if (now == 0.0) throw ParameterError("random_solenoidal: spectrum selects no retained modes");
  v *= l2 / now;
  return v;
}

SpectrumShape power_law_spectrum(double exponent) {
  return [exponent](double kappa) { return std::pow(kappa, exponent); };
}

SpectrumShape band_spectrum(double kmin, double kmax) {
  return [kmin, kmax](double kappa) { return (kappa >= kmin && kappa <= kmax) ? 1.0 : 0.0; };
}

}  // namespace nsvda
