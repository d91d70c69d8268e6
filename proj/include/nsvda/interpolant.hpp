#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nsvda/field.hpp"

namespace nsvda {

enum class InterpolantKind { fourier_truncation, nodal_bilinear, volume_average };

std::string to_string(InterpolantKind kind);
std::optional<InterpolantKind> interpolant_kind_from_string(const std::string& s);

/// Linear observation operator I_h with ||phi - I_h phi|| <= c1 h ||grad phi||.
///
/// fourier_truncation keeps modes with |k_i| <= 2 pi / h. The nodal kinds use an
/// m x m lattice, m = floor(1/h), whose nodes must coincide with fine grid
/// points; their output is re-projected onto divergence-free, mean-free fields
/// and truncated to the retained band.
class InterpolantOp {
 public:
  InterpolantOp() = default;
  InterpolantOp(InterpolantKind kind, double h);

  InterpolantKind kind() const { return kind_; }
  double h() const { return h_; }
  /// floor(1/h): coarse points per axis, or the largest kept index for
  /// Fourier truncation.
  int coarse_points() const { return coarse_; }

  double c1_certified() const { return c1_; }
  void set_c1_certified(double c1) { c1_ = c1; }

  /// Diagonal in Fourier space (the nudging term can then be folded into a
  /// diagonal linear operator).
  bool diagonal() const { return kind_ == InterpolantKind::fourier_truncation; }
  /// 1 on observed modes, 0 elsewhere; only meaningful when diagonal().
  std::vector<double> diagonal_mask(const GridSpec& grid) const;

  /// Throws ParameterError if the operator cannot act on this grid.
  void check_grid(const GridSpec& grid) const;

  VelocityField apply(const VelocityField& phi) const;
  /// L2 adjoint restricted to the retained divergence-free fields.
  VelocityField apply_adjoint(const VelocityField& phi) const;

 private:
  InterpolantKind kind_ = InterpolantKind::fourier_truncation;
  double h_ = 0.125;
  int coarse_ = 8;
  double c1_ = 0.0;
};

/// ||phi - I_h phi|| / (h ||grad phi||); 0 for phi = 0.
double bound_ratio(const InterpolantOp& op, const VelocityField& phi);

struct Certification {
  double c1 = 0.0;
  double corpus_max = 0.0;   ///< largest ratio among the random corpus
  double refined_max = 0.0;  ///< largest ratio found by power iteration
  int iterations = 0;
};

/// Empirical constant for the approximation bound on a grid.
///
/// Draws corpus_size random fields (E(k) ~ k^-3, seeded), then runs power
/// iteration on the error Rayleigh quotient ||(I - I_h) phi||^2 / ||grad phi||^2
/// from the worst of them and from a flat-spectrum field, so the result
/// approaches the supremum over the discrete space. Stores the constant in op.
Certification certify_c1(InterpolantOp& op, const GridSpec& grid, int corpus_size,
                         std::uint64_t seed);

}  // namespace nsvda
