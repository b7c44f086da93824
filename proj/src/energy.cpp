#include "smectic/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace smectic {

void ModelParams::validate() const {
  if (d != 2 && d != 3) throw std::invalid_argument("model.d: must be 2 or 3");
  if (!(C > 0.0)) throw std::invalid_argument("model.C: must be positive");
  if (!(c > 0.0)) throw std::invalid_argument("model.c: must be positive");
  if (!(B0 > 0.0)) throw std::invalid_argument("model.B0: must be positive");
  if (!(s_plus > 0.0))
    throw std::invalid_argument("model.s_plus: must be positive");
  if (!(kappa1 > 0.0))
    throw std::invalid_argument("model.kappa1: must be positive");
  if (!(kappa2 > 0.0))
    throw std::invalid_argument("model.kappa2: must be positive");
  if (!(eta0 >= 0.0 && eta0 <= 1.0))
    throw std::invalid_argument("model.eta0: must be in [0,1]");
  if (d == 2 && B != 0.0)
    throw std::invalid_argument("model.B: must be 0 in 2D");
  if (!(K > 0.0)) throw std::invalid_argument("model.K: must be positive");
  if (coupled && d == 2) {
    // M = Q/s_plus + I/2 normalizes by the equilibrium order parameter,
    // which in the coupled planar model is sqrt(-2A/C) (needs A < 0).
    if (!(A < 0.0))
      throw std::invalid_argument(
          "model.A: must be negative in the coupled 2D model");
    const double sp = std::sqrt(-2.0 * A / C);
    if (std::abs(s_plus - sp) > 1e-12 * std::max(1.0, sp))
      throw std::invalid_argument(
          "model.s_plus: must equal sqrt(-2A/C) in the coupled 2D model");
  }
}

ScalarField f_bn(const QTensorField& Q, const ModelParams& p) {
  const PeriodicGrid& g = Q.grid();
  ScalarField out(g);
  if (g.d == 2) {
    for (std::size_t i = 0; i < Q.nodes(); ++i) {
      const double q0 = Q.comp(0)[i], q1 = Q.comp(1)[i];
      const double tr2 = 2.0 * (q0 * q0 + q1 * q1);
      out[i] = 0.5 * p.A * tr2 + 0.25 * p.C * tr2 * tr2;
    }
  } else {
    for (std::size_t i = 0; i < Q.nodes(); ++i) {
      const auto m = Q.matrix(i);
      double tr2 = 0.0, tr3 = 0.0;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
          tr2 += m[3 * r + c] * m[3 * c + r];
          for (int k = 0; k < 3; ++k)
            tr3 += m[3 * r + c] * m[3 * c + k] * m[3 * k + r];
        }
      out[i] = 0.5 * p.A * tr2 - p.B / 3.0 * tr3 + 0.25 * p.C * tr2 * tr2;
    }
  }
  return out;
}

ScalarField f_s(const ScalarField& u, const ModelParams& p) {
  ScalarField out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = u[i];
    out[i] = (0.5 * p.a + (p.b / 3.0 + 0.25 * p.c * v) * v) * v * v;
  }
  return out;
}

namespace {

SymTensorField scale_by(const SymTensorField& T, const ScalarField& u) {
  SymTensorField out(T.grid());
  for (int c = 0; c < T.components(); ++c)
    for (std::size_t i = 0; i < u.size(); ++i)
      out.comp(c)[i] = T.comp(c)[i] * u[i];
  return out;
}

double nodal_sum(const ScalarField& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i];
  double meas = f.grid().h;
  for (int k = 1; k < f.grid().d; ++k) meas *= f.grid().h;
  return s * meas;
}

}  // namespace

double e1_discrete(const QTensorField& Q, const ScalarField& u,
                   const ModelParams& p, EnergyBreakdown* breakdown) {
  require_same_grid(Q.grid(), u.grid());
  EnergyBreakdown terms;
  terms.bulk_nematic = nodal_sum(f_bn(Q, p));
  terms.bulk_smectic = nodal_sum(f_s(u, p));
  if (p.coupled) {
    const SymTensorField M = m_tensor(Q, p.s_plus);
    const SymTensorField Mu = scale_by(M, u);
    const SymTensorField D2u = hessian(u);
    const double q2 = p.q * p.q;
    terms.coupling_cross = 2.0 * p.B0 * q2 * inner(D2u, Mu);
    terms.coupling_quad = p.B0 * q2 * q2 * inner(Mu, Mu);
  }
  const double total = terms.bulk_nematic + terms.bulk_smectic +
                       terms.coupling_cross + terms.coupling_quad;
  if (breakdown) {
    breakdown->bulk_nematic = terms.bulk_nematic;
    breakdown->bulk_smectic = terms.bulk_smectic;
    breakdown->coupling_cross = terms.coupling_cross;
    breakdown->coupling_quad = terms.coupling_quad;
  }
  return total;
}

EnergyReport modified_energy(const QTensorField& Q, const ScalarField& u,
                             double s, const ModelParams& p) {
  EnergyReport r;
  r.s = s;
  const ScalarField lap_u = laplacian(u);
  r.terms.elastic = 0.5 * p.K * grad_norm_sq(Q) + p.B0 * inner(lap_u, lap_u);
  r.E0 = r.terms.elastic;
  r.E1 = e1_discrete(Q, u, p, &r.terms);
  r.modified = r.E0 + s;
  // Reporting stays total even for diverged states; the scheme path uses the
  // throwing g_factor instead.
  r.g = (s - r.E1 > 700.0) ? std::numeric_limits<double>::infinity()
                           : std::exp(s - r.E1);
  return r;
}

}  // namespace smectic
