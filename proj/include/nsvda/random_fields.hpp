#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "nsvda/field.hpp"

namespace nsvda {

using Rng = std::mt19937_64;

/// Shell energy spectrum shape E(kappa), kappa = |k| / (2 pi).
using SpectrumShape = std::function<double(double kappa)>;

/// Random divergence-free, mean-free field with Gaussian amplitudes, random
/// phases and the requested shell spectrum shape (up to normalization).
VelocityField random_solenoidal(const GridSpec& grid, Rng& rng, const SpectrumShape& shape);

/// Same, rescaled to the given L2 norm.
VelocityField random_solenoidal(const GridSpec& grid, Rng& rng, const SpectrumShape& shape,
                                double l2);

/// E(kappa) ~ kappa^-3 over all retained modes.
SpectrumShape power_law_spectrum(double exponent = -3.0);

/// Flat spectrum restricted to kmin <= kappa <= kmax.
SpectrumShape band_spectrum(double kmin, double kmax);

}  // namespace nsvda
