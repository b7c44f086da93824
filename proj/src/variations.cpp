#include "smectic/variations.hpp"

#include <cmath>

#include "smectic/operators.hpp"

namespace smectic {

QTensorField mu_q(const QTensorField& Q, const ScalarField& u,
                  const ModelParams& p) {
  require_same_grid(Q.grid(), u.grid());
  const PeriodicGrid& g = Q.grid();
  QTensorField out(g);

  const double cq = p.coupled ? 2.0 * p.B0 * p.q * p.q / p.s_plus : 0.0;
  const double cu = p.coupled
                        ? 2.0 * p.B0 * std::pow(p.q, 4) / (p.s_plus * p.s_plus)
                        : 0.0;
  SymTensorField D2u = p.coupled ? hessian(u) : SymTensorField(g);

  if (g.d == 2) {
    // dev(Q^2) vanishes identically for 2D traceless Q.
    for (std::size_t i = 0; i < Q.nodes(); ++i) {
      const double q0 = Q.comp(0)[i], q1 = Q.comp(1)[i];
      const double tr2 = 2.0 * (q0 * q0 + q1 * q1);
      const double bulk = p.A + p.C * tr2;
      const double uu = u[i] * u[i];
      // dev(u D^2 u): subtract u * (lap u)/2 * I from u * D^2 u.
      const double half_tr = 0.5 * u[i] * (D2u.comp(0)[i] + D2u.comp(2)[i]);
      out.comp(0)[i] =
          bulk * q0 + cq * (u[i] * D2u.comp(0)[i] - half_tr) + cu * uu * q0;
      out.comp(1)[i] = bulk * q1 + cq * u[i] * D2u.comp(1)[i] + cu * uu * q1;
    }
  } else {
    for (std::size_t i = 0; i < Q.nodes(); ++i) {
      const auto m = Q.matrix(i);
      double tr2 = 0.0;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) tr2 += m[3 * r + c] * m[3 * r + c];
      // Q^2 and its deviatoric part.
      double sq[9];
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
          double v = 0.0;
          for (int k = 0; k < 3; ++k) v += m[3 * r + k] * m[3 * k + c];
          sq[3 * r + c] = v;
        }
      const double trsq = (sq[0] + sq[4] + sq[8]) / 3.0;
      const double bulk = p.A + p.C * tr2;
      const double uu = u[i] * u[i];
      const double trh =
          (D2u.comp(0)[i] + D2u.comp(3)[i] + D2u.comp(5)[i]) * u[i] / 3.0;
      auto dev_sq = [&](int r, int c) {
        return sq[3 * r + c] - (r == c ? trsq : 0.0);
      };
      auto coup = [&](int r, int c, int stored) {
        return cq * (u[i] * D2u.comp(stored)[i] - (r == c ? trh : 0.0));
      };
      out.comp(0)[i] = bulk * m[0] - p.B * dev_sq(0, 0) + coup(0, 0, 0) + cu * uu * m[0];
      out.comp(1)[i] = bulk * m[1] - p.B * dev_sq(0, 1) + coup(0, 1, 1) + cu * uu * m[1];
      out.comp(2)[i] = bulk * m[2] - p.B * dev_sq(0, 2) + coup(0, 2, 2) + cu * uu * m[2];
      out.comp(3)[i] = bulk * m[4] - p.B * dev_sq(1, 1) + coup(1, 1, 3) + cu * uu * m[4];
      out.comp(4)[i] = bulk * m[5] - p.B * dev_sq(1, 2) + coup(1, 2, 4) + cu * uu * m[5];
    }
  }
  return out;
}

ScalarField mu_u(const QTensorField& Q, const ScalarField& u,
                 const ModelParams& p) {
  require_same_grid(Q.grid(), u.grid());
  const PeriodicGrid& g = Q.grid();
  ScalarField out(g);

  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = u[i];
    out[i] = (p.a + (p.b + p.c * v) * v) * v;
  }
  if (!p.coupled) return out;

  const double q2 = p.q * p.q;
  const double c_cross = 2.0 * p.B0 * q2;
  const double c_quad = 2.0 * p.B0 * q2 * q2;

  const SymTensorField M = m_tensor(Q, p.s_plus);
  const SymTensorField D2u = hessian(u);

  // M : D^2 u and |M|_F^2 pointwise (all d^2 entries).
  SymTensorField Mu(g);
  for (int c = 0; c < M.components(); ++c)
    for (std::size_t i = 0; i < u.size(); ++i)
      Mu.comp(c)[i] = M.comp(c)[i] * u[i];
  const ScalarField dd = double_divergence(Mu);

  if (g.d == 2) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double m0 = M.comp(0)[i], m1 = M.comp(1)[i], m2 = M.comp(2)[i];
      const double contr = m0 * D2u.comp(0)[i] + 2.0 * m1 * D2u.comp(1)[i] +
                           m2 * D2u.comp(2)[i];
      const double mf2 = m0 * m0 + 2.0 * m1 * m1 + m2 * m2;
      out[i] += c_cross * (contr + dd[i]) + c_quad * mf2 * u[i];
    }
  } else {
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double m0 = M.comp(0)[i], m1 = M.comp(1)[i], m2 = M.comp(2)[i];
      const double m3 = M.comp(3)[i], m4 = M.comp(4)[i], m5 = M.comp(5)[i];
      const double contr = m0 * D2u.comp(0)[i] + m3 * D2u.comp(3)[i] +
                           m5 * D2u.comp(5)[i] +
                           2.0 * (m1 * D2u.comp(1)[i] + m2 * D2u.comp(2)[i] +
                                  m4 * D2u.comp(4)[i]);
      const double mf2 = m0 * m0 + m3 * m3 + m5 * m5 +
                         2.0 * (m1 * m1 + m2 * m2 + m4 * m4);
      out[i] += c_cross * (contr + dd[i]) + c_quad * mf2 * u[i];
    }
  }
  return out;
}

VariationPair variations(const QTensorField& Q, const ScalarField& u,
                         const ModelParams& p) {
  return {mu_q(Q, u, p), mu_u(Q, u, p)};
}

double g_factor(double s, double e1h) {
  const double diff = s - e1h;
  if (diff > 700.0)
    throw std::runtime_error(
        "g_factor: s - E_1h exceeds 700, auxiliary variable diverged");
  return std::exp(diff);
}

QTensorField n_q(const QTensorField& Q, const QTensorField& muQ, double g,
                 const ModelParams& p) {
  if (!(g > 0.0)) throw std::invalid_argument("n_q: g must be positive");
  QTensorField out(Q.grid());
  for (int c = 0; c < Q.components(); ++c)
    for (std::size_t i = 0; i < Q.nodes(); ++i)
      out.comp(c)[i] = g * (p.kappa1 * Q.comp(c)[i] - muQ.comp(c)[i]);
  return out;
}

ScalarField n_u(const ScalarField& u, const ScalarField& mu, double g,
                const ModelParams& p) {
  if (!(g > 0.0)) throw std::invalid_argument("n_u: g must be positive");
  ScalarField out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = g * (p.kappa2 * u[i] - mu[i]);
  return out;
}

QTensorField n_q(const QTensorField& Q, const ScalarField& u, double g,
                 const ModelParams& p) {
  return n_q(Q, mu_q(Q, u, p), g, p);
}

ScalarField n_u(const QTensorField& Q, const ScalarField& u, double g,
                const ModelParams& p) {
  return n_u(u, mu_u(Q, u, p), g, p);
}

double kappa0_bound(const ModelParams& p, double eta, double u_inf) {
  if (!(eta > 0.0)) throw std::invalid_argument("kappa0_bound: eta must be > 0");
  if (u_inf < 0.0)
    throw std::invalid_argument("kappa0_bound: u_inf must be >= 0");
  const double b_d = (p.d == 3) ? std::abs(p.B) / std::sqrt(6.0) : 0.0;
  const double a_tilde_sup =
      p.A + 2.0 * p.B0 * std::pow(p.q, 4) / (p.s_plus * p.s_plus) * u_inf * u_inf;
  const double branch1 = a_tilde_sup + p.C * eta * eta;
  // A - 2 b_d xi + 3 C xi^2 opens upward: max over [0, eta] at an endpoint.
  const double branch2 =
      std::max(p.A, p.A - 2.0 * b_d * eta + 3.0 * p.C * eta * eta);
  return std::max(branch1, branch2);
}

}  // namespace smectic
