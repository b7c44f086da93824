#pragma once

#include <vector>

#include "smectic/fft.hpp"
#include "smectic/field.hpp"
#include "smectic/grid.hpp"

namespace smectic {

// --- finite-difference operators (periodic, collocated) ----------------------

enum class DiffMode { forward, backward, central };

// D+_axis, D-_axis, Dc_axis per the usual periodic-wrapped definitions.
ScalarField diff(const ScalarField& f, int axis, DiffMode mode);

// Delta_h = sum_k D+_k D-_k; componentwise on tensor fields.
ScalarField laplacian(const ScalarField& f);
QTensorField laplacian(const QTensorField& Q);

// Delta_h^2 = Delta_h(Delta_h .)
ScalarField biharmonic(const ScalarField& f);

// (k,k) entries D+_k D-_k f; (k,l) entries Dc_k Dc_l f for k != l.
// tr(hessian(f)) == laplacian(f) exactly.
SymTensorField hessian(const ScalarField& f);

// Exact discrete adjoint of hessian: <double_divergence(T), v> = <T, hessian(v)>
// for every v. Concretely sum_k D+_k D-_k T^{kk} + sum_{k!=l} Dc_{k,l} T^{kl}.
ScalarField double_divergence(const SymTensorField& T);

// --- inner products and norms ------------------------------------------------

// h^d-weighted nodal sums; tensor variants run over all d^2 reconstructed
// entries (stored off-diagonals count twice).
double inner(const ScalarField& f, const ScalarField& g);
double inner(const QTensorField& F, const QTensorField& G);
double inner(const SymTensorField& F, const SymTensorField& G);

struct Norms {
  double l2 = 0, linf = 0, h1 = 0, h2 = 0;
};
Norms norms(const ScalarField& f);
Norms norms(const QTensorField& Q);  // linf is max over nodes of |.|_F

double grad_norm_sq(const ScalarField& f);   // sum_k ||D+_k f||^2
double grad_norm_sq(const QTensorField& Q);  // all d^2 entries

// --- scalar generating functions (stable evaluation, y = tau*lambda >= 0) ----

double exp_neg(double y);   // e^{-y}
double phi1_neg(double y);  // phi_1(-y) = (1 - e^{-y}) / y, phi1_neg(0) = 1
double q_fun(double y);     // y / (e^y - 1) in (0, 1], q_fun(0) = 1
double q1_fun(double y);    // q_fun(y) + y/2 >= 1

// --- spectral kernels --------------------------------------------------------

enum class OpKind { l_q, d_u };  // L_Q = -K Lap + g k1 I;  D_u = 2 B0 Lap^2 + g k2 I
enum class KernelTable { exp, phi1 };
// Weights for weighted_norm: Q = Q(tau L), Q1 = Q1(tau L), QL = Q(tau L) * L,
// QQ = Q(tau L)^2, L = L itself (plain operator quadratic form).
enum class WeightKind { Q, Q1, QL, QQ, L };

// Per-Fourier-mode eigenvalues of one modified linear operator and the
// derived function tables. The g-independent exponential factor is cached so
// a g update only rescales exp and refills the phi1/Q/Q1 tables.
class SpectralKernel {
 public:
  SpectralKernel() = default;

  const PeriodicGrid& grid() const { return grid_; }
  OpKind kind() const { return kind_; }
  double tau() const { return tau_; }
  double g() const { return g_; }
  double kappa() const { return kappa_; }

  std::size_t nmodes() const { return eigen_.size(); }
  double lap_symbol(std::size_t m) const { return lap_[m]; }
  double eigenvalue(std::size_t m) const { return eigen_[m]; }
  double table_exp(std::size_t m) const { return exp_[m]; }
  double table_phi1(std::size_t m) const { return phi1_[m]; }
  double table_q(std::size_t m) const { return qt_[m]; }
  double table_q1(std::size_t m) const { return q1t_[m]; }

  // Rescales the exponential table through the cached g-independent part
  // (the g kappa I shift commutes with everything) and refills the
  // phi1/Q/Q1 tables, which do not factor.
  void set_g(double g_new);

  friend SpectralKernel build_kernel(const PeriodicGrid&, OpKind, double,
                                     double, double, double);

 private:
  PeriodicGrid grid_;
  OpKind kind_ = OpKind::l_q;
  double coeff_ = 0, g_ = 1, kappa_ = 0, tau_ = 0;
  std::vector<double> lap_, eigen0_, eigen_, exp0_, exp_, phi1_, qt_, q1t_;
  void fill_tables();
};

// coeff is K for op l_q, B0 for op d_u. Requires coeff, kappa, tau, g > 0.
SpectralKernel build_kernel(const PeriodicGrid& grid, OpKind kind, double coeff,
                            double g, double kappa, double tau);

// inverse-DFT( table (x) DFT(f) ). The phi1 table is phi_1(-tau*lambda); the
// scheme's tau factor in tau*phi_1(-tau L)N is left to the caller.
ScalarField apply_kernel(const SpectralKernel& k, KernelTable which,
                         const ScalarField& f);
QTensorField apply_kernel(const SpectralKernel& k, KernelTable which,
                          const QTensorField& f);

// Plancherel-space weighted quadratic form <w(tau L) f, f>_h >= 0.
double weighted_norm(const SpectralKernel& k, WeightKind which,
                     const ScalarField& f);
double weighted_norm(const SpectralKernel& k, WeightKind which,
                     const QTensorField& f);

}  // namespace smectic
