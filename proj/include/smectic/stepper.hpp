#pragma once

#include <functional>
#include <stdexcept>
#include <utility>

#include "smectic/energy.hpp"
#include "smectic/field.hpp"
#include "smectic/operators.hpp"
#include "smectic/variations.hpp"

namespace smectic {

struct SimState {
  QTensorField Q;
  ScalarField u;
  double s = 0.0;
  double t = 0.0;
  long step = 0;
};

struct StepReport {
  double xi = 0;
  double s_tilde = 0;
  double R = 0;        // dissipation rate (1/tau)(||dQ||^2_Q1L + ||du||^2_Q1D)
  double g = 0;        // factor used for this step
  double e1h_before = 0;
  double e1h_after = 0;
  double energy_before = 0;  // modified energy at t_n
  double energy_after = 0;   // modified energy at t_{n+1}
  double mbp = 0;            // max over nodes of |Q^{n+1}|_F
  double max_abs_u = 0;      // max |u^{n+1}|
};

struct DivergenceError : std::runtime_error {
  long step;
  DivergenceError(long step_, const std::string& what_)
      : std::runtime_error(what_), step(step_) {}
};

// The pair of modified-operator kernels for one (grid, params, tau); set_g
// rescales them per step without a full rebuild.
struct KernelPair {
  SpectralKernel LQ;  // -K Lap + g kappa1 I
  SpectralKernel Du;  // 2 B0 Lap^2 + g kappa2 I
};

KernelPair build_kernels(const PeriodicGrid& grid, const ModelParams& p,
                         double tau, double g = 1.0);

enum class SchemeForm { etd, implicit };

// R^{n+1} = (1/tau)(||dQ||^2_{Q1,LQ} + ||du||^2_{Q1,Du}).
double dissipation_rate(const QTensorField& deltaQ, const ScalarField& delta_u,
                        double tau, const KernelPair& kernels);

// Optimal relaxation parameter (explicit two-branch formula):
//   xi = 0                                      if e1h_next <= s_tilde
//   xi = max(0, 1 - eta0 tau R/(e1h_next - s_tilde))   otherwise,
// with a division guard returning 0 when the gap is below roundoff.
double xi_optimal(double s_tilde, double e1h_next, double R, double tau,
                  double eta0);

// One step of the EOP-GSAV-EI scheme in exponential form:
//   X^{n+1} = e^{-tau L} X^n + tau phi1(-tau L) N^n, then the s update.
std::pair<SimState, StepReport> etd_step(const SimState& state, double tau,
                                         const ModelParams& p,
                                         KernelPair& kernels);

// Algebraically equivalent implicit form, solved per Fourier mode:
//   (Q(tau lam)/tau + lam) X^{n+1} = (Q(tau lam)/tau) X^n + N^n.
std::pair<SimState, StepReport> implicit_step(const SimState& state, double tau,
                                              const ModelParams& p,
                                              KernelPair& kernels);

using StepCallback = std::function<void(const SimState&, const StepReport&)>;

// Iterates the chosen step form; s is initialized to E_1h^0 when
// reset_s is true (so g^0 = 1). Throws DivergenceError with the step index
// when fields or s stop being finite.
SimState run(SimState state, double tau, long n_steps, const ModelParams& p,
             SchemeForm form = SchemeForm::etd,
             const StepCallback& on_step = nullptr, bool reset_s = true);

}  // namespace smectic
