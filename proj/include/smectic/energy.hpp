#pragma once

#include "smectic/field.hpp"
#include "smectic/operators.hpp"

namespace smectic {

// Physical and scheme constants. Defaults are the reference 2D setup:
// deep quench (A = -1, a = -5), C = 2, c = 5, b = 0, B = 0, K = 0.1,
// q = 5, B0 = 0.7e-4, kappa1 = kappa2 = 8, s_plus = sqrt(-2A/C) = 1.
struct ModelParams {
  double K = 0.1;
  double A = -1.0;
  double B = 0.0;  // must stay 0 in 2D (no cubic invariant)
  double C = 2.0;
  double a = -5.0;
  double b = 0.0;
  double c = 5.0;
  double B0 = 0.7e-4;
  double q = 5.0;
  double s_plus = 1.0;
  double kappa1 = 8.0;
  double kappa2 = 8.0;
  double eta0 = 0.95;
  int d = 2;
  bool coupled = true;

  // Throws std::invalid_argument with message "model.<field>: ..." on the
  // first violated constraint.
  void validate() const;
};

struct EnergyBreakdown {
  double elastic = 0;        // K/2 ||grad Q||^2 + B0 ||lap u||^2 (quadratic part)
  double bulk_nematic = 0;   // <f_bn(Q), 1>
  double bulk_smectic = 0;   // <f_s(u), 1>
  double coupling_cross = 0; // 2 B0 q^2 <D^2 u, M u>
  double coupling_quad = 0;  // B0 q^4 ||M u||^2
};

struct EnergyReport {
  double E0 = 0;        // quadratic part (== terms.elastic)
  double E1 = 0;        // nonlinear part E_1h
  double modified = 0;  // K/2 ||grad Q||^2 + B0 ||lap u||^2 + s
  double s = 0;
  double g = 0;         // exp(s - E1)
  EnergyBreakdown terms;
};

// Nematic bulk density: (A/2) tr(Q^2) + (C/4) (tr Q^2)^2, minus (B/3) tr(Q^3)
// in 3D (the cubic invariant vanishes identically in 2D).
ScalarField f_bn(const QTensorField& Q, const ModelParams& p);

// Smectic bulk density: (a/2) u^2 + (b/3) u^3 + (c/4) u^4.
ScalarField f_s(const ScalarField& u, const ModelParams& p);

// Nonlinear discrete energy
//   E_1h = 2 B0 q^2 <D^2 u, M u> + B0 q^4 ||M u||^2 + <f_bn, 1> + <f_s, 1>
// with M = Q/s_plus + I/d. In decoupled mode the two coupling terms are zero
// (the B0 |D^2 u|^2 contribution is then owned by the quadratic operator).
double e1_discrete(const QTensorField& Q, const ScalarField& u,
                   const ModelParams& p, EnergyBreakdown* breakdown = nullptr);

// Modified total energy K/2 ||grad_h Q||^2 + B0 ||lap_h u||^2 + s,
// with the full per-term report.
EnergyReport modified_energy(const QTensorField& Q, const ScalarField& u,
                             double s, const ModelParams& p);

}  // namespace smectic
