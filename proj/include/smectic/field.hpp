#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "smectic/grid.hpp"

namespace smectic {

// One real value per grid node.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const PeriodicGrid& g, double fill = 0.0)
      : grid_(g), v_(g.size(), fill) {}

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }

  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  double at_wrapped(int ix, int iy, int iz = 0) const {
    return v_[grid_.index_wrapped(ix, iy, iz)];
  }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }

 private:
  PeriodicGrid grid_;
  std::vector<double> v_;
};

// Symmetric (not traceless) d x d tensor per node; d(d+1)/2 stored components.
// Component order: 2D (11, 12, 22); 3D (11, 12, 13, 22, 23, 33).
class SymTensorField {
 public:
  SymTensorField() = default;
  explicit SymTensorField(const PeriodicGrid& g)
      : grid_(g), n_(g.size()), comps_(ncomp(g.d), ScalarField(g)) {}

  static int ncomp(int d) { return d * (d + 1) / 2; }

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t nodes() const { return n_; }
  int components() const { return static_cast<int>(comps_.size()); }

  ScalarField& comp(int c) { return comps_[c]; }
  const ScalarField& comp(int c) const { return comps_[c]; }

  // Full matrix at one node, row-major d x d (all d*d entries).
  std::array<double, 9> matrix(std::size_t i) const {
    std::array<double, 9> m{};
    if (grid_.d == 2) {
      const double t11 = comps_[0][i], t12 = comps_[1][i], t22 = comps_[2][i];
      m = {t11, t12, t12, t22, 0, 0, 0, 0, 0};
    } else {
      const double t11 = comps_[0][i], t12 = comps_[1][i], t13 = comps_[2][i];
      const double t22 = comps_[3][i], t23 = comps_[4][i], t33 = comps_[5][i];
      m = {t11, t12, t13, t12, t22, t23, t13, t23, t33};
    }
    return m;
  }

  double trace(std::size_t i) const {
    if (grid_.d == 2) return comps_[0][i] + comps_[2][i];
    return comps_[0][i] + comps_[3][i] + comps_[5][i];
  }

 private:
  PeriodicGrid grid_;
  std::size_t n_ = 0;
  std::vector<ScalarField> comps_;
};

// Symmetric traceless d x d tensor per node; independent components only.
// 2D: (Q11, Q12) with Q22 = -Q11.
// 3D: (Q11, Q12, Q13, Q22, Q23) with Q33 = -Q11 - Q22.
class QTensorField {
 public:
  QTensorField() = default;
  explicit QTensorField(const PeriodicGrid& g)
      : grid_(g), n_(g.size()), comps_(ncomp(g.d), ScalarField(g)) {}

  static int ncomp(int d) { return d == 2 ? 2 : 5; }

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t nodes() const { return n_; }
  int components() const { return static_cast<int>(comps_.size()); }

  ScalarField& comp(int c) { return comps_[c]; }
  const ScalarField& comp(int c) const { return comps_[c]; }

  // Full matrix at one node, row-major d x d, reconstructed so that the
  // result is symmetric and traceless by construction.
  std::array<double, 9> matrix(std::size_t i) const {
    std::array<double, 9> m{};
    if (grid_.d == 2) {
      const double q11 = comps_[0][i], q12 = comps_[1][i];
      m = {q11, q12, q12, -q11, 0, 0, 0, 0, 0};
    } else {
      const double q11 = comps_[0][i], q12 = comps_[1][i], q13 = comps_[2][i];
      const double q22 = comps_[3][i], q23 = comps_[4][i];
      m = {q11, q12, q13, q12, q22, q23, q13, q23, -q11 - q22};
    }
    return m;
  }

 private:
  PeriodicGrid grid_;
  std::size_t n_ = 0;
  std::vector<ScalarField> comps_;
};

// --- pointwise algebra -------------------------------------------------------

// Q = n n^T - I/d for a pointwise-unit director n (one ScalarField per axis).
// Rejects directors whose length deviates from 1 by more than 1e-12.
QTensorField q_from_director(const PeriodicGrid& grid,
                             const std::vector<ScalarField>& n);

// Per-node Frobenius norm of the reconstructed full matrix (all d^2 entries).
ScalarField frobenius_pointwise(const QTensorField& Q);

// T - (tr(T)/d) I, returned in traceless component storage.
QTensorField deviatoric(const SymTensorField& T);

// M = Q/s_plus + I/d (tr M = 1 pointwise). Requires s_plus > 0.
SymTensorField m_tensor(const QTensorField& Q, double s_plus);

}  // namespace smectic
