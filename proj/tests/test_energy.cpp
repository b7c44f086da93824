#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "helpers.hpp"
#include "smectic/energy.hpp"
#include "smectic/io.hpp"

using namespace smectic;
using namespace testutil;

TEST_CASE("model parameter validation") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());

  auto expect_reject = [](ModelParams bad) {
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  };
  {
    ModelParams q = p;
    q.C = 0;
    expect_reject(q);
  }
  {
    ModelParams q = p;
    q.c = -1;
    expect_reject(q);
  }
  {
    ModelParams q = p;
    q.B0 = 0;
    expect_reject(q);
  }
  {
    ModelParams q = p;
    q.kappa1 = 0;
    expect_reject(q);
  }
  {
    ModelParams q = p;
    q.kappa2 = -2;
    expect_reject(q);
  }
  {
    ModelParams q = p;
    q.s_plus = 0;
    expect_reject(q);
  }
  {
    ModelParams q = p;
    q.eta0 = 1.5;
    expect_reject(q);
  }
  {
    ModelParams q = p;
    q.B = 0.5;  // no cubic invariant in 2d
    expect_reject(q);
  }
  {
    // coupled 2d ties s_plus to sqrt(-2A/C)
    ModelParams q = p;
    q.A = 1.0;
    expect_reject(q);
    q = p;
    q.s_plus = 2.0;
    expect_reject(q);
  }
  {
    // 3d with a cubic term and a free s_plus is legal
    ModelParams q = p;
    q.d = 3;
    q.B = 1.5;
    q.s_plus = 2.0;
    CHECK_NOTHROW(q.validate());
  }
}

TEST_CASE("f_bn: zero state, planar diagonal, 3d uniaxial") {
  ModelParams p;  // A = -1, B = 0, C = 2

  SUBCASE("zero tensor") {
    PeriodicGrid g(2, 4);
    CHECK(max_abs(f_bn(QTensorField(g), p)) == 0.0);
  }

  SUBCASE("Q = diag(t, -t): A t^2 + C t^4") {
    PeriodicGrid g(2, 8);
    QTensorField Q(g);
    ScalarField t = sampled(g, [](double x, double y, double) {
      return 0.3 + 0.1 * std::sin(x) * std::cos(y);
    });
    Q.comp(0) = t;
    ScalarField f = f_bn(Q, p);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double want = p.A * t[i] * t[i] + p.C * std::pow(t[i], 4);
      CHECK(f[i] == doctest::Approx(want).epsilon(1e-14));
    }
  }

  SUBCASE("3d uniaxial: (A/3)s^2 - (2B/27)s^3 + (C/9)s^4") {
    ModelParams p3 = p;
    p3.d = 3;
    p3.B = 1.5;
    PeriodicGrid g(3, 4);
    const double s = 0.8;
    QTensorField Q(g);  // s (n n^T - I/3) with n = e_z
    for (std::size_t i = 0; i < Q.nodes(); ++i) {
      Q.comp(0)[i] = -s / 3;
      Q.comp(3)[i] = -s / 3;
    }
    ScalarField f = f_bn(Q, p3);
    const double want = (p3.A / 3) * s * s - (2 * p3.B / 27) * s * s * s +
                        (p3.C / 9) * std::pow(s, 4);
    for (std::size_t i = 0; i < f.size(); ++i)
      CHECK(f[i] == doctest::Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("f_s: zero state, reference point, odd-term asymmetry") {
  ModelParams p;  // a = -5, b = 0, c = 5
  PeriodicGrid g(2, 4);

  CHECK(max_abs(f_s(ScalarField(g), p)) == 0.0);

  ScalarField one(g, 1.0);
  ScalarField f1 = f_s(one, p);
  for (std::size_t i = 0; i < f1.size(); ++i)
    CHECK(f1[i] == doctest::Approx(-1.25).epsilon(1e-15));

  ModelParams pb = p;
  pb.b = 3.0;
  ScalarField fm = f_s(ScalarField(g, -1.0), pb);
  ScalarField fp = f_s(ScalarField(g, 1.0), pb);
  for (std::size_t i = 0; i < fm.size(); ++i)
    CHECK(fm[i] - fp[i] ==
          doctest::Approx(-2 * pb.b / 3).epsilon(1e-14));
}

TEST_CASE("e1_discrete: closed-form and frozen reference values") {
  ModelParams p;

  SUBCASE("zero state") {
    PeriodicGrid g(2, 8);
    CHECK(e1_discrete(QTensorField(g), ScalarField(g), p) == 0.0);
  }

  SUBCASE("constant density against zero tensor") {
    PeriodicGrid g(2, 8);
    const double c0 = 0.4;
    QTensorField Q(g);
    ScalarField u(g, c0);
    EnergyBreakdown br{};
    const double e1 = e1_discrete(Q, u, p, &br);
    const double vol = g.L * g.L;
    CHECK(br.coupling_cross == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(br.coupling_quad ==
          doctest::Approx(p.B0 * std::pow(p.q, 4) * 0.5 * c0 * c0 * vol)
              .epsilon(1e-13));
    CHECK(br.bulk_nematic == 0.0);
    const double fs_val =
        0.5 * p.a * c0 * c0 + (p.b / 3) * std::pow(c0, 3) +
        0.25 * p.c * std::pow(c0, 4);
    CHECK(br.bulk_smectic == doctest::Approx(fs_val * vol).epsilon(1e-13));
    CHECK(e1 == doctest::Approx(br.coupling_cross + br.coupling_quad +
                                br.bulk_nematic + br.bulk_smectic)
                    .epsilon(1e-14));
  }

  SUBCASE("frozen reference values on the default initial data") {
    // Independent numpy stencil oracle (tools/oracles/e1_reference.py):
    //   J = 16: -7.93150717131332605e+00
    //   J = 64: -7.94569130877904151e+00
    for (auto [J, want] : {std::pair<long, double>{16, -7.93150717131332605},
                           std::pair<long, double>{64, -7.94569130877904151}}) {
      RunConfig cfg;
      cfg.J = J;
      SimState st = initial_state(cfg);
      CHECK(rel_err(e1_discrete(st.Q, st.u, cfg.model), want) <= 1e-12);
    }
  }

  SUBCASE("decoupled branch zeroes the coupling terms") {
    ModelParams pd = p;
    pd.coupled = false;
    PeriodicGrid g(2, 8);
    std::mt19937_64 rng(31);
    QTensorField Q = random_q(g, rng, 0.5);
    ScalarField u = random_scalar(g, rng, 0.5);
    EnergyBreakdown br{};
    const double e1 = e1_discrete(Q, u, pd, &br);
    CHECK(br.coupling_cross == 0.0);
    CHECK(br.coupling_quad == 0.0);
    CHECK(rel_err(e1, br.bulk_nematic + br.bulk_smectic) <= 1e-14);
  }
}

TEST_CASE("e1_discrete: breakdown consistency and translation invariance") {
  ModelParams p;
  PeriodicGrid g(2, 16);
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    QTensorField Q = random_q(g, rng, 0.8);
    ScalarField u = random_scalar(g, rng, 0.8);
    EnergyBreakdown br{};
    const double e1 = e1_discrete(Q, u, p, &br);
    const double sum = br.coupling_cross + br.coupling_quad +
                       br.bulk_nematic + br.bulk_smectic;
    CHECK(std::abs(e1 - sum) <= 1e-13 * std::max(1.0, std::abs(e1)));

    const double e1s =
        e1_discrete(shifted(Q, 3, 5), shifted(u, 3, 5), p);
    CHECK(std::abs(e1s - e1) <= 1e-12 * std::max(1.0, std::abs(e1)));
  }
}

TEST_CASE("e1_discrete: bounded on normalized random states") {
  // With |Q|_F <= 1 pointwise and ||u||_H2 <= 1 the nonlinear energy stays
  // inside a fixed finite bracket (crude bound: bulk terms dominate).
  ModelParams p;
  PeriodicGrid g(2, 8);
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 1000; ++trial) {
    QTensorField Q = random_q(g, rng, 1.0);
    ScalarField fro = frobenius_pointwise(Q);
    const double fmax = max_abs(fro);
    if (fmax > 0)
      for (int c = 0; c < Q.components(); ++c)
        for (std::size_t i = 0; i < Q.nodes(); ++i) Q.comp(c)[i] /= fmax;
    ScalarField u = random_scalar(g, rng, 1.0);
    const double h2 = norms(u).h2;
    if (h2 > 0)
      for (std::size_t i = 0; i < u.size(); ++i) u[i] /= h2;
    const double e1 = e1_discrete(Q, u, p);
    CHECK(std::isfinite(e1));
    CHECK(std::abs(e1) <= 400.0);
  }
}

TEST_CASE("modified_energy: linearity in s and compositional identity") {
  ModelParams p;
  PeriodicGrid g(2, 16);

  SUBCASE("zero state") {
    EnergyReport r = modified_energy(QTensorField(g), ScalarField(g), 0.0, p);
    CHECK(r.modified == 0.0);
    CHECK(r.E0 == 0.0);
    CHECK(r.E1 == 0.0);
    CHECK(r.g == 1.0);
  }

  std::mt19937_64 rng(34);
  QTensorField Q = random_q(g, rng, 0.7);
  ScalarField u = random_scalar(g, rng, 0.7);

  SUBCASE("s shift moves the total by exactly the shift") {
    const double s0 = -1.3, delta = 0.77;
    EnergyReport r0 = modified_energy(Q, u, s0, p);
    EnergyReport r1 = modified_energy(Q, u, s0 + delta, p);
    CHECK(r1.modified - r0.modified ==
          doctest::Approx(delta).epsilon(1e-14));
    CHECK(r1.E0 == r0.E0);
    CHECK(r1.E1 == r0.E1);
  }

  SUBCASE("quadratic part recomputed from shared norms") {
    EnergyReport r = modified_energy(Q, u, 0.25, p);
    ScalarField lap = laplacian(u);
    const double e0 =
        0.5 * p.K * grad_norm_sq(Q) + p.B0 * inner(lap, lap);
    CHECK(rel_err(r.E0, e0) <= 1e-13);
    CHECK(rel_err(r.modified, e0 + 0.25) <= 1e-13);
    CHECK(r.E0 == r.terms.elastic);
    CHECK(rel_err(r.g, std::exp(r.s - r.E1)) <= 1e-14);
  }

  SUBCASE("overflowing auxiliary variable reported as infinite g") {
    EnergyReport r = modified_energy(Q, u, 1000.0, p);
    CHECK(std::isinf(r.g));
    CHECK(r.modified == doctest::Approx(r.E0 + 1000.0).epsilon(1e-14));
  }
}
