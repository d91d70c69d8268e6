#include "nsvda/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

#include "nsvda/errors.hpp"

namespace nsvda {
namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// SIMD-aligned scratch owned by one thread for one resolution.
struct Scratch {
  int n = 0;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  ~Scratch() {
    fftw_free(real);
    fftw_free(spec);
  }
  void ensure(int size) {
    if (n == size) return;
    fftw_free(real);
    fftw_free(spec);
    n = size;
    real = fftw_alloc_real(static_cast<std::size_t>(n) * n);
    spec = fftw_alloc_complex(static_cast<std::size_t>(n) * (n / 2 + 1));
  }
};

Scratch& scratch(int n) {
  thread_local Scratch s;
  s.ensure(n);
  return s;
}

}  // namespace

const Transform& Transform::get(int n) {
  static std::map<int, std::unique_ptr<Transform>> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::unique_ptr<Transform>(new Transform(n))).first;
  return *it->second;
}

Transform::Transform(int n) : n_(n) {
  const std::size_t half = static_cast<std::size_t>(n) * (n / 2 + 1);
  double* real = fftw_alloc_real(static_cast<std::size_t>(n) * n);
  fftw_complex* cplx = fftw_alloc_complex(half);
  // FFTW_ESTIMATE keeps plans identical between processes. Execution always
  // goes through fftw_malloc'd scratch so the SIMD alignment matches the plan.
  const unsigned flags = FFTW_ESTIMATE;
  forward_ = fftw_plan_dft_r2c_2d(n, n, real, cplx, flags);
  backward_ = fftw_plan_dft_c2r_2d(n, n, cplx, real, flags | FFTW_DESTROY_INPUT);
  fftw_free(real);
  fftw_free(cplx);
  if (forward_ == nullptr || backward_ == nullptr) throw Error("FFTW plan creation failed");
}

Transform::~Transform() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

void Transform::to_physical(std::span<const Complex> coeffs, std::span<double> out) const {
  if (out.size() != static_cast<std::size_t>(n_) * n_ ||
      coeffs.size() != static_cast<std::size_t>(n_) * (n_ / 2 + 1)) {
    throw StructuralError("Transform::to_physical: size mismatch");
  }
  Scratch& s = scratch(n_);
  std::copy(coeffs.begin(), coeffs.end(), reinterpret_cast<Complex*>(s.spec));
  fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_), s.spec, s.real);
  std::copy(s.real, s.real + out.size(), out.begin());
}

void Transform::to_physical(const SpectralField& f, std::span<double> out) const {
  to_physical(f.coeffs(), out);
}

void Transform::to_spectral(std::span<const double> values, std::span<Complex> out) const {
  if (values.size() != static_cast<std::size_t>(n_) * n_ ||
      out.size() != static_cast<std::size_t>(n_) * (n_ / 2 + 1)) {
    throw StructuralError("Transform::to_spectral: size mismatch");
  }
  Scratch& s = scratch(n_);
  std::copy(values.begin(), values.end(), s.real);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_), s.real, s.spec);
  const double scale = 1.0 / (static_cast<double>(n_) * n_);
  const Complex* src = reinterpret_cast<const Complex*>(s.spec);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * src[i];
}

std::vector<double> to_physical(const SpectralField& f) {
  std::vector<double> out(f.grid().points());
  Transform::get(f.grid().n()).to_physical(f, out);
  return out;
}

SpectralField from_physical(const GridSpec& grid, std::span<const double> values) {
  SpectralField f(grid);
  Transform::get(grid.n()).to_spectral(values, f.coeffs());
  f.enforce_invariants();
  return f;
}

}  // namespace nsvda
