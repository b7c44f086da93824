#include "smectic/field.hpp"

#include <cmath>
#include <string>

namespace smectic {

QTensorField q_from_director(const PeriodicGrid& grid,
                             const std::vector<ScalarField>& n) {
  if (static_cast<int>(n.size()) != grid.d)
    throw std::invalid_argument("q_from_director: director needs d components");
  for (const auto& c : n) require_same_grid(grid, c.grid());

  const std::size_t N = grid.size();
  for (std::size_t i = 0; i < N; ++i) {
    double len2 = 0.0;
    for (int k = 0; k < grid.d; ++k) len2 += n[k][i] * n[k][i];
    if (std::abs(std::sqrt(len2) - 1.0) > 1e-12)
      throw std::invalid_argument(
          "q_from_director: director is not unit length at node " +
          std::to_string(i));
  }

  QTensorField Q(grid);
  const double inv_d = 1.0 / grid.d;
  if (grid.d == 2) {
    for (std::size_t i = 0; i < N; ++i) {
      Q.comp(0)[i] = n[0][i] * n[0][i] - inv_d;
      Q.comp(1)[i] = n[0][i] * n[1][i];
    }
  } else {
    for (std::size_t i = 0; i < N; ++i) {
      Q.comp(0)[i] = n[0][i] * n[0][i] - inv_d;
      Q.comp(1)[i] = n[0][i] * n[1][i];
      Q.comp(2)[i] = n[0][i] * n[2][i];
      Q.comp(3)[i] = n[1][i] * n[1][i] - inv_d;
      Q.comp(4)[i] = n[1][i] * n[2][i];
    }
  }
  return Q;
}

ScalarField frobenius_pointwise(const QTensorField& Q) {
  const PeriodicGrid& g = Q.grid();
  ScalarField out(g);
  const int d = g.d;
  for (std::size_t i = 0; i < Q.nodes(); ++i) {
    const auto m = Q.matrix(i);
    double s = 0.0;
    // matrix(i) packs row-major with stride d, not a padded 3x3
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) s += m[d * r + c] * m[d * r + c];
    out[i] = std::sqrt(s);
  }
  return out;
}

QTensorField deviatoric(const SymTensorField& T) {
  const PeriodicGrid& g = T.grid();
  QTensorField Q(g);
  const double inv_d = 1.0 / g.d;
  if (g.d == 2) {
    for (std::size_t i = 0; i < T.nodes(); ++i) {
      const double tr = T.trace(i);
      Q.comp(0)[i] = T.comp(0)[i] - tr * inv_d;
      Q.comp(1)[i] = T.comp(1)[i];
    }
  } else {
    for (std::size_t i = 0; i < T.nodes(); ++i) {
      const double tr = T.trace(i);
      Q.comp(0)[i] = T.comp(0)[i] - tr * inv_d;  // 11
      Q.comp(1)[i] = T.comp(1)[i];               // 12
      Q.comp(2)[i] = T.comp(2)[i];               // 13
      Q.comp(3)[i] = T.comp(3)[i] - tr * inv_d;  // 22
      Q.comp(4)[i] = T.comp(4)[i];               // 23
    }
  }
  return Q;
}

SymTensorField m_tensor(const QTensorField& Q, double s_plus) {
  if (!(s_plus > 0.0))
    throw std::invalid_argument("m_tensor: s_plus must be positive");
  const PeriodicGrid& g = Q.grid();
  SymTensorField M(g);
  const double inv_s = 1.0 / s_plus;
  const double inv_d = 1.0 / g.d;
  if (g.d == 2) {
    for (std::size_t i = 0; i < Q.nodes(); ++i) {
      M.comp(0)[i] = Q.comp(0)[i] * inv_s + inv_d;
      M.comp(1)[i] = Q.comp(1)[i] * inv_s;
      M.comp(2)[i] = -Q.comp(0)[i] * inv_s + inv_d;
    }
  } else {
    for (std::size_t i = 0; i < Q.nodes(); ++i) {
      M.comp(0)[i] = Q.comp(0)[i] * inv_s + inv_d;
      M.comp(1)[i] = Q.comp(1)[i] * inv_s;
      M.comp(2)[i] = Q.comp(2)[i] * inv_s;
      M.comp(3)[i] = Q.comp(3)[i] * inv_s + inv_d;
      M.comp(4)[i] = Q.comp(4)[i] * inv_s;
      M.comp(5)[i] = (-Q.comp(0)[i] - Q.comp(3)[i]) * inv_s + inv_d;
    }
  }
  return M;
}

}  // namespace smectic
