#pragma once

#include <string>
#include <vector>

#include "smectic/stepper.hpp"

namespace smectic {

// One row of a temporal-convergence table: errors against the benchmark
// solution at final time, plus observed log2 rates versus the previous row.
// Rate entries are NaN (rendered blank) on the first row or when a ratio is
// undefined (a zero error).
struct ConvergenceRow {
  double tau = 0;
  long n_steps = 0;
  double err_q_linf = 0, err_q_l2 = 0, err_q_h1 = 0;
  double err_u_linf = 0, err_u_l2 = 0, err_u_h2 = 0;
  double err_s = 0;
  double rate_q_linf = 0, rate_q_l2 = 0, rate_q_h1 = 0;
  double rate_u_linf = 0, rate_u_l2 = 0, rate_u_h2 = 0;
  double rate_s = 0;
};

struct StudyConfig {
  double T = 0.5;
  std::vector<double> taus;    // coarse steps, any order; sorted descending
  double tau_bench = 0;        // strictly smaller than every coarse tau
  SchemeForm form = SchemeForm::etd;
  int n_threads = 1;           // coarse runs are independent; results are
                               // identical for any thread count
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;  // descending tau
  double T = 0;
  double tau_bench = 0;
};

// Runs the benchmark once, then each coarse run from the same initial state;
// errors use the shared discrete norms. Every tau (and the benchmark tau)
// must divide T exactly so end times align; violations throw
// std::invalid_argument.
ConvergenceStudy convergence_study(const SimState& init, const ModelParams& p,
                                   const StudyConfig& cfg);

// CSV serialization of the study table (deterministic byte-for-byte for a
// given study: fixed scientific formatting). human=true switches to an
// aligned 3-significant-digit table with rates in parentheses.
std::string study_to_csv(const ConvergenceStudy& study, bool human = false);

struct SweepCell {
  double tau = 0;
  double kappa1 = 0;
  long steps_completed = 0;
  long energy_violations = 0;  // steps with E^{n+1} - E^n > tol * |E^n|
  double max_energy_jump = 0;  // largest positive E^{n+1} - E^n observed
  double max_mbp = 0;          // max over steps of max node |Q|_F
  double min_g = 0;
  double max_xi = 0;
  bool diverged = false;
};

struct SweepConfig {
  std::vector<double> taus{0.01, 0.1, 1.0, 10.0};
  std::vector<double> kappa1s;  // defaults to {base kappa1} when empty
  long n_steps = 100;
  double energy_tol = 1e-10;  // relative violation threshold
  SchemeForm form = SchemeForm::etd;
  int n_threads = 1;
};

// Runs the configured grid of (tau, kappa1) cells from the same initial
// state. Violations and excursions are recorded, never thrown; a divergent
// cell is marked and its partial statistics kept.
std::vector<SweepCell> stability_sweep(const SimState& init,
                                       const ModelParams& p,
                                       const SweepConfig& cfg);

std::string sweep_to_csv(const std::vector<SweepCell>& cells,
                         bool human = false);

// Forward-Euler integration of the unmodified gradient flow
//   dQ/dt = K Lap Q - mu_Q,   du/dt = -2 B0 Lap^2 u - mu_u
// using stencil operators only — an independent code path from the spectral
// stepper, used as a slow reference. Requires tau_micro <= 1e-4 * T and
// tau_micro dividing T. Explicit-integrator blow-up raises DivergenceError
// (choose a smaller tau_micro).
SimState brute_force_reference(const SimState& state0, double tau_micro,
                               double T, const ModelParams& p);

}  // namespace smectic
