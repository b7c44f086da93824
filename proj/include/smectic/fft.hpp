#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "smectic/grid.hpp"

namespace smectic {

// Real-to-complex DFT pair on the grid lattice (FFTW backend, Hermitian
// last-axis storage: J/2+1 modes). forward() is unnormalized; inverse()
// applies the 1/N factor, so inverse(forward(f)) == f to roundoff.
//
// Instances own their plans and scratch buffers; obtain one per thread via
// transform_for(). Plan creation is serialized internally (the FFTW planner
// is not thread-safe), execution is not.
class Transform {
 public:
  explicit Transform(const PeriodicGrid& g);
  ~Transform();
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t nmodes() const { return nmodes_; }

  void forward(const double* in, std::complex<double>* out) const;
  void inverse(const std::complex<double>* in, double* out) const;

  // Hermitian multiplicity of mode m in the full-spectrum Parseval sum:
  // 2 for interior last-axis modes, 1 for k_last = 0 and (J even) k_last = J/2.
  int multiplicity(std::size_t m) const { return mult_[m]; }

  // Exact eigenvalue of the discrete Laplacian D+D- for mode m:
  // -(4/h^2) * sum_axes sin^2(pi k_axis / J).
  double lap_symbol(std::size_t m) const { return lap_[m]; }

 private:
  PeriodicGrid grid_;
  std::size_t nmodes_ = 0;
  std::vector<int> mult_;
  std::vector<double> lap_;
  void* plan_fwd_ = nullptr;   // fftw_plan
  void* plan_inv_ = nullptr;   // fftw_plan
  double* rbuf_ = nullptr;     // fftw_malloc'd
  void* cbuf_ = nullptr;       // fftw_complex*, fftw_malloc'd
};

// Thread-local transform cache keyed by (d, J, L).
const Transform& transform_for(const PeriodicGrid& g);

}  // namespace smectic
