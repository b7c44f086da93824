#include "smectic/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace smectic {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs fn(0..n-1), possibly on a small worker pool. Work items must be
// independent; the first exception is rethrown on the caller thread.
void parallel_for(std::size_t n, int n_threads,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, n_threads < 1 ? 1 : n_threads);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (std::thread& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

// Number of steps n with n * tau == T up to relative roundoff; -1 if tau does
// not divide T.
long aligned_steps(double T, double tau) {
  if (!(tau > 0) || !(T > 0)) return -1;
  const double n_real = T / tau;
  const double n = std::round(n_real);
  if (n < 1) return -1;
  if (std::abs(n * tau - T) > 1e-9 * T) return -1;
  return static_cast<long>(n);
}

double rate_of(double err_prev, double err_cur) {
  if (!(err_prev > 0) || !(err_cur > 0)) return kNaN;
  return std::log2(err_prev / err_cur);
}

void diff_fields(const SimState& a, const SimState& b, QTensorField& dQ,
                 ScalarField& du) {
  for (int c = 0; c < dQ.components(); ++c)
    for (std::size_t i = 0; i < dQ.comp(c).size(); ++i)
      dQ.comp(c)[i] = a.Q.comp(c)[i] - b.Q.comp(c)[i];
  for (std::size_t i = 0; i < du.size(); ++i) du[i] = a.u[i] - b.u[i];
}

std::string format_sci(double v, int sig) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*e", sig - 1, v);
  return buf;
}

}  // namespace

ConvergenceStudy convergence_study(const SimState& init, const ModelParams& p,
                                   const StudyConfig& cfg) {
  p.validate();
  if (cfg.taus.empty())
    throw std::invalid_argument("convergence_study: empty tau ladder");
  if (!(cfg.T > 0))
    throw std::invalid_argument("convergence_study: T must be positive");

  std::vector<double> taus = cfg.taus;
  std::sort(taus.begin(), taus.end(), std::greater<double>());

  const long n_bench = aligned_steps(cfg.T, cfg.tau_bench);
  if (n_bench < 0)
    throw std::invalid_argument(
        "convergence_study: benchmark tau does not divide T");
  for (double tau : taus) {
    if (aligned_steps(cfg.T, tau) < 0)
      throw std::invalid_argument(
          "convergence_study: tau ladder end times misaligned with T");
    if (!(cfg.tau_bench < tau))
      throw std::invalid_argument(
          "convergence_study: benchmark tau must be strictly smaller than "
          "every study tau");
  }

  // The benchmark run completes before any error evaluation begins.
  const SimState bench = run(init, cfg.tau_bench, n_bench, p, cfg.form);

  ConvergenceStudy study;
  study.T = cfg.T;
  study.tau_bench = cfg.tau_bench;

  // Coarse runs are mutually independent.
  std::vector<SimState> sols(taus.size());
  parallel_for(taus.size(), cfg.n_threads, [&](std::size_t k) {
    sols[k] = run(init, taus[k], aligned_steps(cfg.T, taus[k]), p, cfg.form);
  });

  for (std::size_t k = 0; k < taus.size(); ++k) {
    const double tau = taus[k];
    const SimState& sol = sols[k];

    QTensorField dQ(init.Q.grid());
    ScalarField du(init.u.grid());
    diff_fields(sol, bench, dQ, du);
    const Norms nq = norms(dQ);
    const Norms nu = norms(du);

    ConvergenceRow row;
    row.tau = tau;
    row.n_steps = aligned_steps(cfg.T, tau);
    row.err_q_linf = nq.linf;
    row.err_q_l2 = nq.l2;
    row.err_q_h1 = nq.h1;
    row.err_u_linf = nu.linf;
    row.err_u_l2 = nu.l2;
    row.err_u_h2 = nu.h2;
    row.err_s = std::abs(sol.s - bench.s);
    if (study.rows.empty()) {
      row.rate_q_linf = row.rate_q_l2 = row.rate_q_h1 = kNaN;
      row.rate_u_linf = row.rate_u_l2 = row.rate_u_h2 = kNaN;
      row.rate_s = kNaN;
    } else {
      const ConvergenceRow& prev = study.rows.back();
      row.rate_q_linf = rate_of(prev.err_q_linf, row.err_q_linf);
      row.rate_q_l2 = rate_of(prev.err_q_l2, row.err_q_l2);
      row.rate_q_h1 = rate_of(prev.err_q_h1, row.err_q_h1);
      row.rate_u_linf = rate_of(prev.err_u_linf, row.err_u_linf);
      row.rate_u_l2 = rate_of(prev.err_u_l2, row.err_u_l2);
      row.rate_u_h2 = rate_of(prev.err_u_h2, row.err_u_h2);
      row.rate_s = rate_of(prev.err_s, row.err_s);
    }
    study.rows.push_back(row);
  }
  return study;
}

std::string study_to_csv(const ConvergenceStudy& study, bool human) {
  const int sig = human ? 3 : 17;
  std::string out;
  out +=
      "tau,n_steps,err_q_linf,rate_q_linf,err_q_l2,rate_q_l2,err_q_h1,"
      "rate_q_h1,err_u_linf,rate_u_linf,err_u_l2,rate_u_l2,err_u_h2,"
      "rate_u_h2,err_s,rate_s\n";
  for (const ConvergenceRow& r : study.rows) {
    const double errs[] = {r.err_q_linf, r.err_q_l2, r.err_q_h1, r.err_u_linf,
                           r.err_u_l2,   r.err_u_h2, r.err_s};
    const double rates[] = {r.rate_q_linf, r.rate_q_l2, r.rate_q_h1,
                            r.rate_u_linf, r.rate_u_l2, r.rate_u_h2, r.rate_s};
    out += format_sci(r.tau, sig);
    out += "," + std::to_string(r.n_steps);
    for (int k = 0; k < 7; ++k) {
      out += ",";
      out += format_sci(errs[k], sig);
      out += ",";
      if (human) {
        out += std::isnan(rates[k]) ? "(--)"
                                    : "(" + format_sci(rates[k], 3) + ")";
      } else {
        out += format_sci(rates[k], sig);
      }
    }
    out += "\n";
  }
  return out;
}

std::vector<SweepCell> stability_sweep(const SimState& init,
                                       const ModelParams& p,
                                       const SweepConfig& cfg) {
  p.validate();
  if (cfg.n_steps < 1)
    throw std::invalid_argument("stability_sweep: n_steps must be >= 1");
  std::vector<double> kappas = cfg.kappa1s;
  if (kappas.empty()) kappas.push_back(p.kappa1);
  for (double kappa1 : kappas) {
    ModelParams pk = p;
    pk.kappa1 = kappa1;
    pk.validate();
  }

  std::vector<SweepCell> cells(kappas.size() * cfg.taus.size());
  parallel_for(cells.size(), cfg.n_threads, [&](std::size_t idx) {
    const double kappa1 = kappas[idx / cfg.taus.size()];
    const double tau = cfg.taus[idx % cfg.taus.size()];
    ModelParams pk = p;
    pk.kappa1 = kappa1;

    SweepCell cell;
    cell.tau = tau;
    cell.kappa1 = kappa1;
    cell.min_g = std::numeric_limits<double>::infinity();
    double prev_energy =
        modified_energy(init.Q, init.u, e1_discrete(init.Q, init.u, pk), pk)
            .modified;
    try {
      run(init, tau, cfg.n_steps, pk, cfg.form,
          [&](const SimState&, const StepReport& rep) {
            ++cell.steps_completed;
            const double jump = rep.energy_after - prev_energy;
            if (jump > cfg.energy_tol * std::abs(prev_energy)) {
              ++cell.energy_violations;
              cell.max_energy_jump = std::max(cell.max_energy_jump, jump);
            }
            prev_energy = rep.energy_after;
            cell.max_mbp = std::max(cell.max_mbp, rep.mbp);
            cell.min_g = std::min(cell.min_g, rep.g);
            cell.max_xi = std::max(cell.max_xi, rep.xi);
          });
    } catch (const DivergenceError&) {
      cell.diverged = true;
    }
    if (cell.steps_completed == 0) cell.min_g = 0;
    cells[idx] = cell;
  });
  return cells;
}

std::string sweep_to_csv(const std::vector<SweepCell>& cells, bool human) {
  const int sig = human ? 3 : 17;
  std::string out =
      "tau,kappa1,steps_completed,energy_violations,max_energy_jump,max_mbp,"
      "min_g,max_xi,diverged\n";
  for (const SweepCell& c : cells) {
    out += format_sci(c.tau, sig) + "," + format_sci(c.kappa1, sig) + "," +
           std::to_string(c.steps_completed) + "," +
           std::to_string(c.energy_violations) + "," +
           format_sci(c.max_energy_jump, sig) + "," +
           format_sci(c.max_mbp, sig) + "," + format_sci(c.min_g, sig) + "," +
           format_sci(c.max_xi, sig) + "," + (c.diverged ? "1" : "0") + "\n";
  }
  return out;
}

SimState brute_force_reference(const SimState& state0, double tau_micro,
                               double T, const ModelParams& p) {
  p.validate();
  if (!(T > 0))
    throw std::invalid_argument("brute_force_reference: T must be positive");
  if (!(tau_micro > 0) || tau_micro > 1e-4 * T)
    throw std::invalid_argument(
        "brute_force_reference: tau_micro must satisfy 0 < tau_micro <= "
        "1e-4 * T");
  const long n = aligned_steps(T, tau_micro);
  if (n < 0)
    throw std::invalid_argument(
        "brute_force_reference: tau_micro does not divide T");
  require_same_grid(state0.Q.grid(), state0.u.grid());

  SimState st = state0;
  for (long k = 0; k < n; ++k) {
    const VariationPair var = variations(st.Q, st.u, p);
    const QTensorField lapQ = laplacian(st.Q);
    const ScalarField bihu = biharmonic(st.u);
    for (int c = 0; c < st.Q.components(); ++c) {
      ScalarField& qc = st.Q.comp(c);
      const ScalarField& lc = lapQ.comp(c);
      const ScalarField& mc = var.muQ.comp(c);
      for (std::size_t i = 0; i < qc.size(); ++i)
        qc[i] += tau_micro * (p.K * lc[i] - mc[i]);
    }
    for (std::size_t i = 0; i < st.u.size(); ++i)
      st.u[i] += tau_micro * (-2.0 * p.B0 * bihu[i] - var.mu_u[i]);

    if ((k & 0xFF) == 0xFF || k + 1 == n) {
      double m = 0;
      for (int c = 0; c < st.Q.components(); ++c)
        for (std::size_t i = 0; i < st.Q.comp(c).size(); ++i)
          m = std::max(m, std::abs(st.Q.comp(c)[i]));
      for (std::size_t i = 0; i < st.u.size(); ++i)
        m = std::max(m, std::abs(st.u[i]));
      if (!std::isfinite(m))
        throw DivergenceError(
            k + 1,
            "explicit reference integrator blew up; reduce tau_micro");
    }
  }
  st.t = state0.t + T;
  st.step = state0.step + n;
  st.s = e1_discrete(st.Q, st.u, p);
  return st;
}

}  // namespace smectic
