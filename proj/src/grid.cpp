#include "nsvda/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsvda/errors.hpp"

namespace nsvda {

GridSpec::GridSpec(int n, double dealias_fraction) : n_(n), dealias_fraction_(dealias_fraction) {
  if (n < 8 || n % 2 != 0) {
    throw ParameterError("grid resolution must be even and >= 8, got " + std::to_string(n));
  }
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
    throw ParameterError("dealias fraction must lie in (0, 1]");
  }
  // Strict inequality so that 3 * cutoff < n: the retained band is alias-free.
  const double edge = dealias_fraction * (n / 2);
  int cut = static_cast<int>(std::floor(edge));
  if (static_cast<double>(cut) == edge) --cut;
  cutoff_ = std::min(cut, n / 2 - 1);
  if (cutoff_ < 1) throw ParameterError("dealias fraction leaves no retained modes");
}

}  // namespace nsvda
