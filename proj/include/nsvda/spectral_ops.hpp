#pragma once

#include <functional>

#include "nsvda/field.hpp"

namespace nsvda {

/// L2 norm and the H1 / H2 seminorms of a velocity field (Parseval).
struct Norms {
  double l2 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
};

/// Orthogonal projection onto divergence-free, mean-free fields:
/// u(k) -> (I - k k^T / |k|^2) u(k).
VelocityField leray_project(const SpectralField& ax, const SpectralField& ay);
VelocityField leray_project(const VelocityField& a);

/// Stokes operator A = -P Delta, i.e. multiplication by |k|^2.
VelocityField stokes_apply(const VelocityField& v);

/// (I - alpha^2 Delta)^{-1}: division by 1 + alpha^2 |k|^2.
VelocityField helmholtz_invert(const VelocityField& v, double alpha);
/// (I - alpha^2 Delta): multiplication by 1 + alpha^2 |k|^2.
VelocityField helmholtz_apply(const VelocityField& v, double alpha);

/// B(u, v) = P((u . grad) v), evaluated pseudo-spectrally in advective form
/// with 2/3 dealiasing.
VelocityField nonlinear_term(const VelocityField& u, const VelocityField& v);

/// Signature shared by B and its test variants.
using BilinearFn = std::function<VelocityField(const VelocityField&, const VelocityField&)>;

Norms norms(const VelocityField& v);

/// L2 inner product (u, v) over the unit torus.
double inner(const VelocityField& u, const VelocityField& v);
double inner(const SpectralField& a, const SpectralField& b);

/// max_k |k . u(k)| / max_k |u(k)| (0 for the zero field).
double divergence_ratio(const VelocityField& v);

/// Largest pointwise speed on the physical grid.
double max_speed(const VelocityField& v);

}  // namespace nsvda
