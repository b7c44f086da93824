#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smectic/harness.hpp"
#include "smectic/io.hpp"

namespace fs = std::filesystem;
using namespace smectic;

namespace {

// ---------------------------------------------------------------- overrides

struct Overrides {
  CLI::Option* tau = nullptr;
  CLI::Option* T = nullptr;
  CLI::Option* n_steps = nullptr;
  CLI::Option* J = nullptr;
  CLI::Option* d = nullptr;
  CLI::Option* L = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* out_dir = nullptr;
  CLI::Option* snapshot_every = nullptr;
  CLI::Option* form = nullptr;
  CLI::Option* eta0 = nullptr;
  CLI::Option* kappa1 = nullptr;
  CLI::Option* kappa2 = nullptr;
  CLI::Option* u_amplitude = nullptr;

  double v_tau = 0, v_T = 0, v_L = 0, v_eta0 = 0, v_kappa1 = 0, v_kappa2 = 0,
         v_u_amplitude = 0;
  long v_n_steps = 0, v_J = 0, v_snapshot_every = 0;
  int v_d = 0;
  std::uint64_t v_seed = 0;
  std::string v_out_dir, v_form;

  void attach(CLI::App* sub) {
    tau = sub->add_option("--tau", v_tau, "time step");
    T = sub->add_option("--T", v_T, "final time (excludes --n-steps)");
    n_steps = sub->add_option("--n-steps", v_n_steps, "step count");
    J = sub->add_option("--J", v_J, "nodes per direction");
    d = sub->add_option("--d", v_d, "dimension (2 or 3)");
    L = sub->add_option("--L", v_L, "domain edge length");
    seed = sub->add_option("--seed", v_seed, "RNG seed");
    out_dir = sub->add_option("--output-dir", v_out_dir, "output directory");
    snapshot_every =
        sub->add_option("--snapshot-every", v_snapshot_every,
                        "write a snapshot every N steps (0 = ends only)");
    form = sub->add_option("--form", v_form, "stepper form: etd | implicit");
    eta0 = sub->add_option("--eta0", v_eta0, "relaxation reserve in [0,1]");
    kappa1 = sub->add_option("--kappa1", v_kappa1, "Q stabilization");
    kappa2 = sub->add_option("--kappa2", v_kappa2, "u stabilization");
    u_amplitude =
        sub->add_option("--u-amplitude", v_u_amplitude, "initial u amplitude");
  }

  void apply(RunConfig& cfg) const {
    if (tau && tau->count()) cfg.tau = v_tau;
    if (T && T->count()) {
      cfg.has_T = true;
      cfg.T = v_T;
    }
    if (n_steps && n_steps->count()) {
      if (T && T->count())
        throw ConfigError("time", "specify --T or --n-steps, not both");
      cfg.has_T = false;
      cfg.n_steps = v_n_steps;
    }
    if (J && J->count()) cfg.J = v_J;
    if (d && d->count()) {
      cfg.d = v_d;
      cfg.model.d = v_d;
    }
    if (L && L->count()) cfg.L = v_L;
    if (seed && seed->count()) cfg.seed = v_seed;
    if (out_dir && out_dir->count()) cfg.output.directory = v_out_dir;
    if (snapshot_every && snapshot_every->count())
      cfg.output.snapshot_every = v_snapshot_every;
    if (form && form->count()) {
      if (v_form == "etd")
        cfg.form = SchemeForm::etd;
      else if (v_form == "implicit")
        cfg.form = SchemeForm::implicit;
      else
        throw ConfigError("scheme.form", "must be \"etd\" or \"implicit\"");
    }
    if (eta0 && eta0->count()) cfg.model.eta0 = v_eta0;
    if (kappa1 && kappa1->count()) cfg.model.kappa1 = v_kappa1;
    if (kappa2 && kappa2->count()) cfg.model.kappa2 = v_kappa2;
    if (u_amplitude && u_amplitude->count())
      cfg.init.u_amplitude = v_u_amplitude;
    cfg.validate();
  }
};

void warn_pow2(long J) {
  if (J > 0 && (J & (J - 1)) != 0)
    std::fprintf(stderr,
                 "warning: grid.J=%ld is not a power of two; transforms will "
                 "be slower\n",
                 J);
}

std::string snap_base(const std::string& dir, long step) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "snapshot_%06ld", step);
  return dir + "/" + buf;
}

void echo_config(const RunConfig& cfg, const std::string& dir) {
  std::ofstream out(dir + "/config.effective.json", std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + dir + "/config.effective.json");
  out << effective_config_json(cfg);
}

// --------------------------------------------------------------------- run

int cmd_run(const RunConfig& cfg) {
  warn_pow2(cfg.J);
  const std::string dir = resolve_output_dir(cfg.output);
  fs::create_directories(dir);
  echo_config(cfg, dir);

  SimState st = initial_state(cfg);
  const long n = cfg.steps();
  write_snapshot(snap_base(dir, st.step), st);
  if (n == 0) return 0;

  DiagnosticsWriter diag(dir + "/" + cfg.output.diagnostics, cfg.tau,
                         cfg.seed);
  const long every = cfg.output.snapshot_every;
  const long last = st.step + n;
  SimState fin = run(st, cfg.tau, n, cfg.model, cfg.form,
                     [&](const SimState& s, const StepReport& rep) {
                       diag.write_row(s, rep);
                       if (every > 0 && s.step % every == 0 && s.step != last)
                         write_snapshot(snap_base(dir, s.step), s);
                     });
  write_snapshot(snap_base(dir, fin.step), fin);
  return 0;
}

// ---------------------------------------------------------------- converge

int cmd_converge(const RunConfig& cfg) {
  warn_pow2(cfg.J);
  const std::string dir = resolve_output_dir(cfg.output);
  fs::create_directories(dir);
  echo_config(cfg, dir);

  StudyConfig sc;
  sc.T = cfg.study.T;
  sc.taus = cfg.study.taus;
  sc.tau_bench = cfg.study.tau_bench;
  sc.form = cfg.form;
  sc.n_threads = thread_budget();

  const SimState init = initial_state(cfg);
  const ConvergenceStudy study = convergence_study(init, cfg.model, sc);

  {
    std::ofstream out(dir + "/convergence.csv", std::ios::binary);
    if (!out)
      throw std::runtime_error("cannot write " + dir + "/convergence.csv");
    out << "# seed=" << cfg.seed << "\n" << study_to_csv(study, false);
  }
  std::fputs(study_to_csv(study, true).c_str(), stdout);
  return 0;
}

// ------------------------------------------------------------------- check

struct Battery {
  bool all_pass = true;
  int checked = 0;

  void line(const char* name, bool pass, double worst) {
    all_pass = all_pass && pass;
    ++checked;
    std::printf("%s %s worst=%.3e\n", pass ? "PASS" : "FAIL", name, worst);
  }
};

// lhs <= rhs within an absolute-relative slack.
bool leq(double lhs, double rhs, double tol) {
  return lhs <= rhs + tol * std::max(1.0, std::abs(rhs));
}

// Positive when the inequality is violated; the battery tracks the max.
double excess(double lhs, double rhs) {
  return (lhs - rhs) / std::max(1.0, std::abs(rhs));
}

int cmd_check(const RunConfig& cfg) {
  warn_pow2(cfg.J);
  const PeriodicGrid grid = cfg.grid();
  const ModelParams& p = cfg.model;
  std::mt19937_64 rng(cfg.seed);
  Battery bat;

  std::printf("# seed=%" PRIu64 " d=%d J=%ld\n", cfg.seed, cfg.d, cfg.J);

  // --- adjointness of the double divergence against the Hessian
  {
    double worst = 0;
    for (int k = 0; k < 20; ++k) {
      SymTensorField T(grid);
      for (int c = 0; c < T.components(); ++c)
        T.comp(c) = random_scalar(grid, rng, 1.0);
      const ScalarField v = random_scalar(grid, rng, 1.0);
      const double a = inner(double_divergence(T), v);
      const double b = inner(T, hessian(v));
      worst = std::max(worst,
                       std::abs(a - b) / std::max(1.0, std::abs(b)));
    }
    bat.line("adjoint_double_divergence", worst <= 1e-12, worst);
  }

  // --- trace of the Hessian equals the Laplacian (shared stencils)
  {
    double worst = 0;
    for (int k = 0; k < 10; ++k) {
      const ScalarField f = random_scalar(grid, rng, 1.0);
      const SymTensorField H = hessian(f);
      const ScalarField lap = laplacian(f);
      for (std::size_t i = 0; i < f.size(); ++i) {
        const auto m = H.matrix(i);
        double tr = 0;
        for (int r = 0; r < grid.d; ++r) tr += m[r * grid.d + r];
        worst = std::max(worst, std::abs(tr - lap[i]));
      }
    }
    bat.line("hessian_trace_laplacian", worst <= 1e-13, worst);
  }

  // --- summation by parts: <-Lap f, f> = ||D+ f||^2
  {
    double worst = 0;
    for (int k = 0; k < 20; ++k) {
      const ScalarField f = random_scalar(grid, rng, 1.0);
      ScalarField nl = laplacian(f);
      for (std::size_t i = 0; i < nl.size(); ++i) nl[i] = -nl[i];
      const double a = inner(nl, f);
      const double b = grad_norm_sq(f);
      worst = std::max(worst,
                       std::abs(a - b) / std::max(1.0, std::abs(b)));
    }
    bat.line("summation_by_parts", worst <= 1e-12, worst);
  }

  // --- stencil Laplacian matches its transform symbol
  {
    const Transform& tr = transform_for(grid);
    double worst = 0;
    for (int k = 0; k < 5; ++k) {
      const ScalarField f = random_scalar(grid, rng, 1.0);
      std::vector<std::complex<double>> spec(tr.nmodes());
      tr.forward(f.data(), spec.data());
      for (std::size_t m = 0; m < spec.size(); ++m)
        spec[m] *= tr.lap_symbol(m);
      ScalarField spectral(grid);
      tr.inverse(spec.data(), spectral.data());
      const ScalarField stencil = laplacian(f);
      double scale = 0;
      for (std::size_t i = 0; i < f.size(); ++i)
        scale = std::max(scale, std::abs(stencil[i]));
      for (std::size_t i = 0; i < f.size(); ++i)
        worst = std::max(worst, std::abs(spectral[i] - stencil[i]) /
                                    std::max(1.0, scale));
    }
    bat.line("spectral_stencil_match", worst <= 1e-11, worst);
  }

  // --- the six modified-norm inequality chains
  {
    double worst = 0;
    const double taus[] = {1.0 / 256, 0.1, 0.5, 1.0};
    const double gs[] = {0.3, 1.0, 3.0};
    for (double tau : taus)
      for (double g : gs) {
        KernelPair kp = build_kernels(grid, p, tau, g);
        for (int k = 0; k < 4; ++k) {
          const QTensorField U = random_q(grid, rng, 1.0);
          const ScalarField V = random_scalar(grid, rng, 1.0);
          const struct {
            double qq, q, l2sq, q1, ql, l;
          } t = {weighted_norm(kp.LQ, WeightKind::QQ, U),
                 weighted_norm(kp.LQ, WeightKind::Q, U),
                 norms(U).l2 * norms(U).l2,
                 weighted_norm(kp.LQ, WeightKind::Q1, U),
                 weighted_norm(kp.LQ, WeightKind::QL, U),
                 weighted_norm(kp.LQ, WeightKind::L, U)},
            s = {weighted_norm(kp.Du, WeightKind::QQ, V),
                 weighted_norm(kp.Du, WeightKind::Q, V),
                 norms(V).l2 * norms(V).l2,
                 weighted_norm(kp.Du, WeightKind::Q1, V),
                 weighted_norm(kp.Du, WeightKind::QL, V),
                 weighted_norm(kp.Du, WeightKind::L, V)};
          for (const auto& x : {t, s}) {
            worst = std::max({worst, excess(x.qq, x.q), excess(x.q, x.l2sq),
                              excess(x.l2sq, x.q1), excess(0.0, x.ql),
                              excess(x.ql, x.l), excess(x.q1, x.l)});
          }
        }
      }
    bat.line("modified_norm_chains", worst <= 1e-12, worst);
  }

  // --- variations are the exact gradient of the nonlinear energy
  {
    double worst = 0;
    for (int k = 0; k < 10; ++k) {
      const QTensorField Q = random_q(grid, rng, 0.5);
      const ScalarField u = random_scalar(grid, rng, 0.5);
      const QTensorField dQ = random_q(grid, rng, 1.0);
      const ScalarField du = random_scalar(grid, rng, 1.0);
      const VariationPair var = variations(Q, u, p);
      const double predicted = inner(var.muQ, dQ) + inner(var.mu_u, du);

      const double eps = 1e-5;
      QTensorField Qp(grid), Qm(grid);
      ScalarField up(grid), um(grid);
      for (int c = 0; c < Q.components(); ++c)
        for (std::size_t i = 0; i < Q.comp(c).size(); ++i) {
          Qp.comp(c)[i] = Q.comp(c)[i] + eps * dQ.comp(c)[i];
          Qm.comp(c)[i] = Q.comp(c)[i] - eps * dQ.comp(c)[i];
        }
      for (std::size_t i = 0; i < u.size(); ++i) {
        up[i] = u[i] + eps * du[i];
        um[i] = u[i] - eps * du[i];
      }
      const double fd =
          (e1_discrete(Qp, up, p) - e1_discrete(Qm, um, p)) / (2 * eps);
      worst = std::max(worst, std::abs(fd - predicted) /
                                  std::max(1.0, std::abs(predicted)));
    }
    bat.line("gradient_of_e1", worst <= 1e-6, worst);
  }

  // --- exponential and per-mode implicit forms agree
  {
    double worst = 0;
    const double taus[] = {1e-3, 1e-1, 10.0};
    std::uniform_real_distribution<double> ds(-0.5, 0.5);
    for (double tau : taus) {
      KernelPair k1 = build_kernels(grid, p, tau);
      KernelPair k2 = build_kernels(grid, p, tau);
      for (int k = 0; k < 5; ++k) {
        SimState st;
        st.Q = random_q(grid, rng, 0.4);
        st.u = random_scalar(grid, rng, 0.3);
        st.s = e1_discrete(st.Q, st.u, p) + ds(rng);
        const auto [se, re] = etd_step(st, tau, p, k1);
        const auto [si, ri] = implicit_step(st, tau, p, k2);
        (void)re;
        (void)ri;
        double dq = 0, qs = 0, duv = 0, us = 0;
        for (int c = 0; c < se.Q.components(); ++c)
          for (std::size_t i = 0; i < se.Q.comp(c).size(); ++i) {
            dq = std::max(dq,
                          std::abs(se.Q.comp(c)[i] - si.Q.comp(c)[i]));
            qs = std::max(qs, std::abs(se.Q.comp(c)[i]));
          }
        for (std::size_t i = 0; i < se.u.size(); ++i) {
          duv = std::max(duv, std::abs(se.u[i] - si.u[i]));
          us = std::max(us, std::abs(se.u[i]));
        }
        worst = std::max({worst, dq / std::max(1e-12, qs),
                          duv / std::max(1e-12, us),
                          std::abs(se.s - si.s) / std::max(1.0, std::abs(se.s))});
      }
    }
    bat.line("etd_implicit_equivalence", worst <= 1e-10, worst);
  }

  // --- relaxation feasibility and the per-step energy identity
  {
    double worst_xi = 0, worst_budget = 0, worst_ident = 0;
    const double taus[] = {1.0 / 256, 0.1, 1.0, 10.0};
    std::uniform_real_distribution<double> ds(-0.5, 0.5);
    for (double tau : taus) {
      KernelPair kp = build_kernels(grid, p, tau);
      for (int k = 0; k < 5; ++k) {
        SimState st;
        st.Q = random_q(grid, rng, 0.4);
        st.u = random_scalar(grid, rng, 0.3);
        st.s = e1_discrete(st.Q, st.u, p) + ds(rng);
        const auto [next, rep] = etd_step(st, tau, p, kp);

        worst_xi = std::max({worst_xi, -rep.xi, rep.xi - 1.0});
        worst_budget =
            std::max(worst_budget, (next.s - rep.s_tilde) -
                                       p.eta0 * tau * rep.R);

        QTensorField dQ(grid);
        ScalarField du(grid);
        for (int c = 0; c < dQ.components(); ++c)
          for (std::size_t i = 0; i < dQ.comp(c).size(); ++i)
            dQ.comp(c)[i] = next.Q.comp(c)[i] - st.Q.comp(c)[i];
        for (std::size_t i = 0; i < du.size(); ++i)
          du[i] = next.u[i] - st.u[i];
        const double nq2 = inner(dQ, dQ), nu2 = inner(du, du);
        const double predicted = -rep.R -
                                 0.5 * rep.g * p.kappa1 * nq2 -
                                 0.5 * rep.g * p.kappa2 * nu2 +
                                 (next.s - rep.s_tilde);
        const double actual = rep.energy_after - rep.energy_before;
        worst_ident =
            std::max(worst_ident, std::abs(actual - predicted) /
                                      std::max(1.0, std::abs(actual)));
      }
    }
    bat.line("xi_in_unit_interval", worst_xi <= 0.0, worst_xi);
    bat.line("relaxation_budget", worst_budget <= 1e-12, worst_budget);
    bat.line("energy_identity", worst_ident <= 1e-11, worst_ident);
  }

  std::printf("%s (%d checks)\n", bat.all_pass ? "ALL PASS" : "FAILURES",
              bat.checked);
  return bat.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Relaxed-SAV exponential integrator for the coupled Q-tensor / "
      "smectic-density gradient flow"};
  app.require_subcommand(1);

  std::string cfg_run, cfg_conv, cfg_check;
  Overrides o_run, o_conv, o_check;

  CLI::App* sub_run =
      app.add_subcommand("run", "integrate and write diagnostics/snapshots");
  sub_run->add_option("config", cfg_run, "JSON config file");
  o_run.attach(sub_run);

  CLI::App* sub_conv =
      app.add_subcommand("converge", "temporal-convergence study");
  sub_conv->add_option("config", cfg_conv, "JSON config file");
  o_conv.attach(sub_conv);

  CLI::App* sub_check =
      app.add_subcommand("check", "invariant battery on random states");
  sub_check->add_option("config", cfg_check, "JSON config file");
  o_check.attach(sub_check);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sub_run->parsed()) {
      RunConfig cfg = cfg_run.empty() ? RunConfig{} : load_config(cfg_run);
      o_run.apply(cfg);
      return cmd_run(cfg);
    }
    if (sub_conv->parsed()) {
      RunConfig cfg = cfg_conv.empty() ? RunConfig{} : load_config(cfg_conv);
      o_conv.apply(cfg);
      return cmd_converge(cfg);
    }
    RunConfig cfg = cfg_check.empty() ? RunConfig{} : load_config(cfg_check);
    o_check.apply(cfg);
    return cmd_check(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "divergence:step=%ld %s\n", e.step, e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config:%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
