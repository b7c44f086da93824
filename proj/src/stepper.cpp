#include "smectic/stepper.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace smectic {

namespace {

void check_kernels(const SimState& state, double tau, const KernelPair& k) {
  require_same_grid(state.Q.grid(), state.u.grid());
  require_same_grid(state.Q.grid(), k.LQ.grid());
  require_same_grid(state.Q.grid(), k.Du.grid());
  if (k.LQ.kind() != OpKind::l_q || k.Du.kind() != OpKind::d_u)
    throw std::invalid_argument("stepper: kernel pair has swapped operators");
  if (k.LQ.tau() != tau || k.Du.tau() != tau)
    throw std::invalid_argument("stepper: kernel tau does not match step tau");
}

// Per-mode solve of (Q(tau lam)/tau + lam) x = (Q(tau lam)/tau) x_old + n.
void implicit_solve_component(const SpectralKernel& k, double tau,
                              const ScalarField& x_old, const ScalarField& n,
                              ScalarField& out) {
  const Transform& tr = transform_for(k.grid());
  std::vector<std::complex<double>> xs(tr.nmodes()), ns(tr.nmodes());
  tr.forward(x_old.data(), xs.data());
  tr.forward(n.data(), ns.data());
  for (std::size_t m = 0; m < xs.size(); ++m) {
    const double qt = k.table_q(m) / tau;  // Q(tau lam)/tau
    xs[m] = (qt * xs[m] + ns[m]) / (qt + k.eigenvalue(m));
  }
  tr.inverse(xs.data(), out.data());
}

ScalarField implicit_update(const SpectralKernel& k, double tau,
                            const ScalarField& x_old, const ScalarField& n) {
  ScalarField out(x_old.grid());
  implicit_solve_component(k, tau, x_old, n, out);
  return out;
}

QTensorField implicit_update(const SpectralKernel& k, double tau,
                             const QTensorField& x_old, const QTensorField& n) {
  QTensorField out(x_old.grid());
  for (int c = 0; c < x_old.components(); ++c)
    implicit_solve_component(k, tau, x_old.comp(c), n.comp(c), out.comp(c));
  return out;
}

// x = e^{-tau L} x_old + tau phi1(-tau L) n.
ScalarField etd_update(const SpectralKernel& k, double tau,
                       const ScalarField& x_old, const ScalarField& n) {
  ScalarField out = apply_kernel(k, KernelTable::exp, x_old);
  ScalarField fn = apply_kernel(k, KernelTable::phi1, n);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += tau * fn[i];
  return out;
}

QTensorField etd_update(const SpectralKernel& k, double tau,
                        const QTensorField& x_old, const QTensorField& n) {
  QTensorField out = apply_kernel(k, KernelTable::exp, x_old);
  QTensorField fn = apply_kernel(k, KernelTable::phi1, n);
  for (int c = 0; c < out.components(); ++c)
    for (std::size_t i = 0; i < out.comp(c).size(); ++i)
      out.comp(c)[i] += tau * fn.comp(c)[i];
  return out;
}

double max_abs(const ScalarField& f) {
  double m = 0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
  return m;
}

double max_frobenius(const QTensorField& Q) {
  const ScalarField fro = frobenius_pointwise(Q);
  return max_abs(fro);
}

std::pair<SimState, StepReport> advance(const SimState& state, double tau,
                                        const ModelParams& p,
                                        KernelPair& kernels, bool use_etd) {
  p.validate();
  if (!(tau > 0)) throw std::invalid_argument("stepper: tau must be positive");
  check_kernels(state, tau, kernels);

  // 1. Energy level and SAV factor at t_n.
  const double e1n = e1_discrete(state.Q, state.u, p);
  double g = 0;
  try {
    g = g_factor(state.s, e1n);
  } catch (const std::runtime_error&) {
    throw DivergenceError(state.step + 1,
                          "auxiliary variable overflow: s - E_1h > 700");
  }
  if (!std::isfinite(g) || g <= 0)
    throw DivergenceError(state.step + 1, "nonfinite SAV factor");

  // 2. Variations and stabilized right-hand sides.
  const VariationPair var = variations(state.Q, state.u, p);
  const QTensorField NQ = n_q(state.Q, var.muQ, g, p);
  const ScalarField Nu = n_u(state.u, var.mu_u, g, p);

  // 3. Linear-propagator update with the current factor g.
  kernels.LQ.set_g(g);
  kernels.Du.set_g(g);
  QTensorField Q1 = use_etd ? etd_update(kernels.LQ, tau, state.Q, NQ)
                            : implicit_update(kernels.LQ, tau, state.Q, NQ);
  ScalarField u1 = use_etd ? etd_update(kernels.Du, tau, state.u, Nu)
                           : implicit_update(kernels.Du, tau, state.u, Nu);

  // 4. Auxiliary update along the discrete chain rule.
  QTensorField dQ(state.Q.grid());
  ScalarField du(state.u.grid());
  for (int c = 0; c < dQ.components(); ++c)
    for (std::size_t i = 0; i < dQ.comp(c).size(); ++i)
      dQ.comp(c)[i] = Q1.comp(c)[i] - state.Q.comp(c)[i];
  for (std::size_t i = 0; i < du.size(); ++i) du[i] = u1[i] - state.u[i];
  const double s_tilde =
      state.s + g * (inner(var.muQ, dQ) + inner(var.mu_u, du));

  // 5. Relaxation toward the true energy level.
  const double e1n1 = e1_discrete(Q1, u1, p);
  const double R = dissipation_rate(dQ, du, tau, kernels);
  const double xi = xi_optimal(s_tilde, e1n1, R, tau, p.eta0);
  const double s_new = xi * s_tilde + (1.0 - xi) * e1n1;

  // 6. Diagnostics and divergence checks.
  StepReport rep;
  rep.xi = xi;
  rep.s_tilde = s_tilde;
  rep.R = R;
  rep.g = g;
  rep.e1h_before = e1n;
  rep.e1h_after = e1n1;
  rep.energy_before = modified_energy(state.Q, state.u, state.s, p).modified;
  rep.mbp = max_frobenius(Q1);
  rep.max_abs_u = max_abs(u1);
  if (!std::isfinite(rep.mbp) || !std::isfinite(rep.max_abs_u) ||
      !std::isfinite(s_new) || !std::isfinite(e1n1) || !std::isfinite(s_tilde))
    throw DivergenceError(state.step + 1, "nonfinite state after step");

  SimState next;
  next.Q = std::move(Q1);
  next.u = std::move(u1);
  next.s = s_new;
  next.t = state.t + tau;
  next.step = state.step + 1;
  rep.energy_after = modified_energy(next.Q, next.u, next.s, p).modified;
  return {std::move(next), rep};
}

}  // namespace

KernelPair build_kernels(const PeriodicGrid& grid, const ModelParams& p,
                         double tau, double g) {
  p.validate();
  return KernelPair{
      build_kernel(grid, OpKind::l_q, p.K, g, p.kappa1, tau),
      build_kernel(grid, OpKind::d_u, p.B0, g, p.kappa2, tau)};
}

double dissipation_rate(const QTensorField& deltaQ, const ScalarField& delta_u,
                        double tau, const KernelPair& kernels) {
  if (!(tau > 0))
    throw std::invalid_argument("dissipation_rate: tau must be positive");
  const double nQ = weighted_norm(kernels.LQ, WeightKind::Q1, deltaQ);
  const double nu = weighted_norm(kernels.Du, WeightKind::Q1, delta_u);
  return (nQ + nu) / tau;
}

double xi_optimal(double s_tilde, double e1h_next, double R, double tau,
                  double eta0) {
  if (!(tau > 0))
    throw std::invalid_argument("xi_optimal: tau must be positive");
  if (!(eta0 >= 0.0 && eta0 <= 1.0))
    throw std::invalid_argument("xi_optimal: eta0 must lie in [0, 1]");
  if (R < 0) {
    if (R < -1e-12) throw std::invalid_argument("xi_optimal: negative rate");
    R = 0;  // roundoff shield; the rate is a sum of nonnegative terms
  }
  const double gap = e1h_next - s_tilde;
  if (gap <= 0) return 0.0;
  if (gap < 1e-14 * (1.0 + std::abs(s_tilde))) return 0.0;
  const double xi = 1.0 - eta0 * tau * R / gap;
  return xi > 0.0 ? xi : 0.0;
}

std::pair<SimState, StepReport> etd_step(const SimState& state, double tau,
                                         const ModelParams& p,
                                         KernelPair& kernels) {
  return advance(state, tau, p, kernels, /*use_etd=*/true);
}

std::pair<SimState, StepReport> implicit_step(const SimState& state, double tau,
                                              const ModelParams& p,
                                              KernelPair& kernels) {
  return advance(state, tau, p, kernels, /*use_etd=*/false);
}

SimState run(SimState state, double tau, long n_steps, const ModelParams& p,
             SchemeForm form, const StepCallback& on_step, bool reset_s) {
  p.validate();
  if (!(tau > 0)) throw std::invalid_argument("run: tau must be positive");
  if (n_steps < 0) throw std::invalid_argument("run: negative step count");
  require_same_grid(state.Q.grid(), state.u.grid());
  if (reset_s) state.s = e1_discrete(state.Q, state.u, p);

  KernelPair kernels = build_kernels(state.Q.grid(), p, tau);
  const double t0 = state.t;
  const long step0 = state.step;
  for (long i = 0; i < n_steps; ++i) {
    auto [next, rep] = (form == SchemeForm::etd)
                           ? etd_step(state, tau, p, kernels)
                           : implicit_step(state, tau, p, kernels);
    state = std::move(next);
    state.t = t0 + static_cast<double>(i + 1) * tau;  // avoid drift
    state.step = step0 + i + 1;
    if (on_step) on_step(state, rep);
  }
  return state;
}

}  // namespace smectic
