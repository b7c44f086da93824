#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>

namespace smectic {

// Uniform periodic collocated grid on (0, L)^d with J nodes per axis.
// Nodes are x_i = i*h, i = 0..J-1; index i = J is identified with i = 0.
// Node storage is row-major with axis order (x, y, z): the last axis varies
// fastest, offset = (ix*J + iy) in 2D and ((ix*J + iy)*J + iz) in 3D.
struct PeriodicGrid {
  int d = 2;
  int J = 0;
  double L = 2.0 * std::numbers::pi;
  double h = 0.0;

  PeriodicGrid() = default;
  PeriodicGrid(int d_, int J_, double L_ = 2.0 * std::numbers::pi)
      : d(d_), J(J_), L(L_), h(L_ / J_) {
    if (d != 2 && d != 3) throw std::invalid_argument("grid: d must be 2 or 3");
    if (J < 2) throw std::invalid_argument("grid: J must be >= 2");
    if (!(L > 0.0)) throw std::invalid_argument("grid: L must be positive");
  }

  std::size_t size() const {
    std::size_t n = 1;
    for (int k = 0; k < d; ++k) n *= static_cast<std::size_t>(J);
    return n;
  }

  int wrap(int i) const {
    int r = i % J;
    return r < 0 ? r + J : r;
  }

  std::size_t index(int ix, int iy, int iz = 0) const {
    if (d == 2)
      return static_cast<std::size_t>(ix) * J + iy;
    return (static_cast<std::size_t>(ix) * J + iy) * J + iz;
  }

  std::size_t index_wrapped(int ix, int iy, int iz = 0) const {
    return d == 2 ? index(wrap(ix), wrap(iy)) : index(wrap(ix), wrap(iy), wrap(iz));
  }

  double coord(int i) const { return h * i; }

  bool operator==(const PeriodicGrid& o) const {
    return d == o.d && J == o.J && L == o.L;
  }
  bool operator!=(const PeriodicGrid& o) const { return !(*this == o); }
};

inline void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b) {
  if (a != b) throw std::invalid_argument("grid mismatch between fields");
}

}  // namespace smectic
