#pragma once

// Shared helpers for the unit-test suites: deterministic random fields,
// embeddings between tensor containers, lattice shifts, and error measures.

#include <cmath>
#include <random>
#include <vector>

#include "smectic/field.hpp"
#include "smectic/grid.hpp"
#include "smectic/io.hpp"
#include "smectic/operators.hpp"

namespace testutil {

using namespace smectic;

inline double rel_err(double got, double want) {
  const double scale = std::max(1.0, std::abs(want));
  return std::abs(got - want) / scale;
}

// max over nodes of |a - b| for scalar fields.
inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const ScalarField& a) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

// max over nodes and stored components of |A - B|.
inline double max_abs_diff(const QTensorField& a, const QTensorField& b) {
  double m = 0;
  for (int c = 0; c < a.components(); ++c)
    m = std::max(m, max_abs_diff(a.comp(c), b.comp(c)));
  return m;
}

// Embed a traceless tensor into general symmetric storage.
inline SymTensorField sym_from_q(const QTensorField& Q) {
  SymTensorField T(Q.grid());
  if (Q.grid().d == 2) {
    T.comp(0) = Q.comp(0);
    T.comp(1) = Q.comp(1);
    for (std::size_t i = 0; i < Q.nodes(); ++i) T.comp(2)[i] = -Q.comp(0)[i];
  } else {
    T.comp(0) = Q.comp(0);
    T.comp(1) = Q.comp(1);
    T.comp(2) = Q.comp(2);
    T.comp(3) = Q.comp(3);
    T.comp(4) = Q.comp(4);
    for (std::size_t i = 0; i < Q.nodes(); ++i)
      T.comp(5)[i] = -Q.comp(0)[i] - Q.comp(3)[i];
  }
  return T;
}

// Cyclic lattice shift: out(i) = f(i + shift) with periodic wrap.
inline ScalarField shifted(const ScalarField& f, int sx, int sy, int sz = 0) {
  const PeriodicGrid& g = f.grid();
  ScalarField out(g);
  const int KZ = (g.d == 3) ? g.J : 1;
  for (int ix = 0; ix < g.J; ++ix)
    for (int iy = 0; iy < g.J; ++iy)
      for (int iz = 0; iz < KZ; ++iz)
        out[g.index(ix, iy, iz)] = f.at_wrapped(ix + sx, iy + sy, iz + sz);
  return out;
}

inline QTensorField shifted(const QTensorField& Q, int sx, int sy, int sz = 0) {
  QTensorField out(Q.grid());
  for (int c = 0; c < Q.components(); ++c)
    out.comp(c) = shifted(Q.comp(c), sx, sy, sz);
  return out;
}

// f(x, y[, z]) evaluated at the grid nodes.
template <class F>
inline ScalarField sampled(const PeriodicGrid& g, F&& f) {
  ScalarField out(g);
  const int KZ = (g.d == 3) ? g.J : 1;
  for (int ix = 0; ix < g.J; ++ix)
    for (int iy = 0; iy < g.J; ++iy)
      for (int iz = 0; iz < KZ; ++iz)
        out[g.index(ix, iy, iz)] =
            f(g.coord(ix), g.coord(iy), g.coord(iz));
  return out;
}

// Forward-difference cross inner product [grad u, grad v].
inline double grad_inner(const ScalarField& u, const ScalarField& v) {
  double acc = 0;
  for (int k = 0; k < u.grid().d; ++k)
    acc += inner(diff(u, k, DiffMode::forward), diff(v, k, DiffMode::forward));
  return acc;
}

}  // namespace testutil
