#pragma once

#include "smectic/energy.hpp"
#include "smectic/field.hpp"

namespace smectic {

// Discrete variational derivatives of E_1h. With double_divergence the exact
// adjoint of hessian, these are the exact gradients of e1_discrete in the
// grid inner products.
struct VariationPair {
  QTensorField muQ;  // H-side variation (traceless symmetric)
  ScalarField mu_u;
};

// mu_Q = A Q - B dev(Q^2) + C tr(Q^2) Q
//        + (2 B0 q^2 / s_plus) dev(u D^2 u) + (2 B0 q^4 / s_plus^2) u^2 Q.
// Deviatoric projections use tr/d so the result is traceless in every d.
QTensorField mu_q(const QTensorField& Q, const ScalarField& u,
                  const ModelParams& p);

// mu_u = a u + b u^2 + c u^3 + 2 B0 q^2 (M : D^2 u)
//        + 2 B0 q^2 ddiv(M u) + 2 B0 q^4 |M|_F^2 u.
ScalarField mu_u(const QTensorField& Q, const ScalarField& u,
                 const ModelParams& p);

VariationPair variations(const QTensorField& Q, const ScalarField& u,
                         const ModelParams& p);

// g = exp(s - e1h), evaluated as one exponential of the difference.
// Throws std::runtime_error when s - e1h > 700 (impending overflow marks a
// diverged auxiliary variable).
double g_factor(double s, double e1h);

// Stabilized nonlinear right-hand sides N = g (kappa * state - mu).
QTensorField n_q(const QTensorField& Q, const ScalarField& u, double g,
                 const ModelParams& p);
ScalarField n_u(const QTensorField& Q, const ScalarField& u, double g,
                const ModelParams& p);
// Hot-path overloads with precomputed variations.
QTensorField n_q(const QTensorField& Q, const QTensorField& muQ, double g,
                 const ModelParams& p);
ScalarField n_u(const ScalarField& u, const ScalarField& mu, double g,
                const ModelParams& p);

// Stabilizer lower bound kappa_0 for the maximum-bound principle:
//   kappa_0 = max{ sup_x A + (2 B0 q^4/s_plus^2) u^2 + C eta^2,
//                  max_{xi in [0,eta]} (A - 2 b_d xi + 3 C xi^2) }
// with b_2 = 0, b_3 = |B|/sqrt(6); u_inf bounds ||u||_inf. The quadratic max
// is taken in closed form (upward parabola -> endpoint values).
double kappa0_bound(const ModelParams& p, double eta, double u_inf);

}  // namespace smectic
