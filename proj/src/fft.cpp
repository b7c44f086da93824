#include "smectic/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace smectic {

namespace {
std::mutex planner_mutex;
}

Transform::Transform(const PeriodicGrid& g) : grid_(g) {
  const int J = g.J;
  const int Jh = J / 2 + 1;
  const std::size_t N = g.size();
  nmodes_ = (g.d == 2) ? static_cast<std::size_t>(J) * Jh
                       : static_cast<std::size_t>(J) * J * Jh;

  rbuf_ = fftw_alloc_real(N);
  fftw_complex* cb = fftw_alloc_complex(nmodes_);
  cbuf_ = cb;

  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    if (g.d == 2) {
      plan_fwd_ = fftw_plan_dft_r2c_2d(J, J, rbuf_, cb, FFTW_ESTIMATE);
      plan_inv_ = fftw_plan_dft_c2r_2d(J, J, cb, rbuf_, FFTW_ESTIMATE);
    } else {
      plan_fwd_ = fftw_plan_dft_r2c_3d(J, J, J, rbuf_, cb, FFTW_ESTIMATE);
      plan_inv_ = fftw_plan_dft_c2r_3d(J, J, J, cb, rbuf_, FFTW_ESTIMATE);
    }
  }

  // Mode tables: axis frequencies k = 0..J-1 (full) on leading axes,
  // k = 0..J/2 (Hermitian) on the last axis; index order matches the
  // row-major node layout.
  mult_.resize(nmodes_);
  lap_.resize(nmodes_);
  const double s = 4.0 / (g.h * g.h);
  auto axis_sym = [&](int k) {
    const double t = std::sin(std::numbers::pi * k / J);
    return s * t * t;
  };
  std::vector<double> sym(J);
  for (int k = 0; k < J; ++k) sym[k] = axis_sym(k);

  if (g.d == 2) {
    std::size_t m = 0;
    for (int kx = 0; kx < J; ++kx)
      for (int ky = 0; ky < Jh; ++ky, ++m) {
        lap_[m] = -(sym[kx] + sym[ky]);
        mult_[m] = (ky == 0 || 2 * ky == J) ? 1 : 2;
      }
  } else {
    std::size_t m = 0;
    for (int kx = 0; kx < J; ++kx)
      for (int ky = 0; ky < J; ++ky)
        for (int kz = 0; kz < Jh; ++kz, ++m) {
          lap_[m] = -(sym[kx] + sym[ky] + sym[kz]);
          mult_[m] = (kz == 0 || 2 * kz == J) ? 1 : 2;
        }
  }
}

Transform::~Transform() {
  std::lock_guard<std::mutex> lock(planner_mutex);
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_inv_) fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  if (rbuf_) fftw_free(rbuf_);
  if (cbuf_) fftw_free(static_cast<fftw_complex*>(cbuf_));
}

void Transform::forward(const double* in, std::complex<double>* out) const {
  std::memcpy(rbuf_, in, grid_.size() * sizeof(double));
  fftw_complex* cb = static_cast<fftw_complex*>(cbuf_);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_fwd_), rbuf_, cb);
  std::memcpy(out, cb, nmodes_ * sizeof(std::complex<double>));
}

void Transform::inverse(const std::complex<double>* in, double* out) const {
  fftw_complex* cb = static_cast<fftw_complex*>(cbuf_);
  std::memcpy(cb, in, nmodes_ * sizeof(std::complex<double>));
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_inv_), cb, rbuf_);
  const double scale = 1.0 / static_cast<double>(grid_.size());
  const std::size_t N = grid_.size();
  for (std::size_t i = 0; i < N; ++i) out[i] = rbuf_[i] * scale;
}

const Transform& transform_for(const PeriodicGrid& g) {
  thread_local std::map<std::tuple<int, int, double>, std::unique_ptr<Transform>>
      cache;
  auto key = std::make_tuple(g.d, g.J, g.L);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<Transform>(g)).first;
  return *it->second;
}

}  // namespace smectic
