#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "helpers.hpp"
#include "smectic/field.hpp"
#include "smectic/grid.hpp"
#include "smectic/io.hpp"

using namespace smectic;
using namespace testutil;

namespace {

std::vector<ScalarField> director_wave_2d(const PeriodicGrid& g) {
  std::vector<ScalarField> n;
  n.push_back(sampled(g, [](double x, double y, double) {
    return std::cos(x + y);
  }));
  n.push_back(sampled(g, [](double x, double y, double) {
    return std::sin(x + y);
  }));
  return n;
}

}  // namespace

TEST_CASE("grid: spacing, wrap, and row-major indexing") {
  PeriodicGrid g(2, 8);
  CHECK(g.h == doctest::Approx(g.L / 8).epsilon(1e-15));
  CHECK(g.size() == 64);
  CHECK(g.index(2, 3) == 2 * 8 + 3);
  CHECK(g.wrap(-1) == 7);
  CHECK(g.wrap(8) == 0);
  CHECK(g.index_wrapped(-1, 9) == g.index(7, 1));

  PeriodicGrid g3(3, 4);
  CHECK(g3.size() == 64);
  CHECK(g3.index(1, 2, 3) == (1 * 4 + 2) * 4 + 3);

  ScalarField f(g);
  f[g.index(7, 0)] = 5.0;
  CHECK(f.at_wrapped(-1, 0) == 5.0);
  CHECK(f.at_wrapped(15, 8) == 5.0);
}

TEST_CASE("q_from_director: analytic wave components") {
  PeriodicGrid g(2, 16);
  QTensorField Q = q_from_director(g, director_wave_2d(g));
  for (int ix = 0; ix < g.J; ++ix)
    for (int iy = 0; iy < g.J; ++iy) {
      const double th = g.coord(ix) + g.coord(iy);
      const std::size_t i = g.index(ix, iy);
      CHECK(Q.comp(0)[i] ==
            doctest::Approx(std::cos(th) * std::cos(th) - 0.5).epsilon(1e-14));
      CHECK(Q.comp(1)[i] ==
            doctest::Approx(std::cos(th) * std::sin(th)).epsilon(1e-14));
    }
}

TEST_CASE("q_from_director: axis-aligned directors") {
  SUBCASE("2d, n = (1, 0)") {
    PeriodicGrid g(2, 4);
    std::vector<ScalarField> n{ScalarField(g, 1.0), ScalarField(g, 0.0)};
    QTensorField Q = q_from_director(g, n);
    for (std::size_t i = 0; i < Q.nodes(); ++i) {
      auto m = Q.matrix(i);
      CHECK(m[0] == doctest::Approx(0.5).epsilon(1e-15));
      CHECK(m[1] == doctest::Approx(0.0).epsilon(1e-15));
      CHECK(m[3] == doctest::Approx(-0.5).epsilon(1e-15));
    }
  }
  SUBCASE("3d, n = (0, 0, 1)") {
    PeriodicGrid g(3, 4);
    std::vector<ScalarField> n{ScalarField(g, 0.0), ScalarField(g, 0.0),
                               ScalarField(g, 1.0)};
    QTensorField Q = q_from_director(g, n);
    for (std::size_t i = 0; i < Q.nodes(); ++i) {
      auto m = Q.matrix(i);
      CHECK(m[0] == doctest::Approx(-1.0 / 3).epsilon(1e-15));
      CHECK(m[4] == doctest::Approx(-1.0 / 3).epsilon(1e-15));
      CHECK(m[8] == doctest::Approx(2.0 / 3).epsilon(1e-15));
      CHECK(m[1] == 0.0);
      CHECK(m[2] == 0.0);
      CHECK(m[5] == 0.0);
    }
  }
}

TEST_CASE("q_from_director: non-unit director is rejected") {
  PeriodicGrid g(2, 4);
  std::vector<ScalarField> n{ScalarField(g, 1.0), ScalarField(g, 1.0)};
  CHECK_THROWS_AS(q_from_director(g, n), std::invalid_argument);
  // mismatched component count
  std::vector<ScalarField> n1{ScalarField(g, 1.0)};
  CHECK_THROWS_AS(q_from_director(g, n1), std::invalid_argument);
  // a 1e-12 deviation is still accepted
  std::vector<ScalarField> n2{ScalarField(g, std::sqrt(1.0 + 9e-13)),
                              ScalarField(g, 0.0)};
  CHECK_NOTHROW(q_from_director(g, n2));
}

TEST_CASE("frobenius_pointwise: closed-form values") {
  PeriodicGrid g(2, 4);
  SUBCASE("diag(1/2, -1/2)") {
    QTensorField Q(g);
    for (std::size_t i = 0; i < Q.nodes(); ++i) Q.comp(0)[i] = 0.5;
    ScalarField f = frobenius_pointwise(Q);
    for (std::size_t i = 0; i < f.size(); ++i)
      CHECK(f[i] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  }
  SUBCASE("zero field") {
    QTensorField Q(g);
    ScalarField f = frobenius_pointwise(Q);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(f[i] == 0.0);
  }
  SUBCASE("pure off-diagonal, both entries count") {
    QTensorField Q(g);
    for (std::size_t i = 0; i < Q.nodes(); ++i) Q.comp(1)[i] = 1.0;
    ScalarField f = frobenius_pointwise(Q);
    for (std::size_t i = 0; i < f.size(); ++i)
      CHECK(f[i] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  }
}

TEST_CASE("deviatoric: trace removal in both dimensions") {
  SUBCASE("identity maps to zero (2d)") {
    PeriodicGrid g(2, 4);
    SymTensorField T(g);
    for (std::size_t i = 0; i < T.nodes(); ++i) {
      T.comp(0)[i] = 1.0;
      T.comp(2)[i] = 1.0;
    }
    QTensorField Q = deviatoric(T);
    CHECK(max_abs(Q.comp(0)) == 0.0);
    CHECK(max_abs(Q.comp(1)) == 0.0);
  }
  SUBCASE("diag(2, 0) -> diag(1, -1)") {
    PeriodicGrid g(2, 4);
    SymTensorField T(g);
    for (std::size_t i = 0; i < T.nodes(); ++i) T.comp(0)[i] = 2.0;
    QTensorField Q = deviatoric(T);
    for (std::size_t i = 0; i < Q.nodes(); ++i) {
      auto m = Q.matrix(i);
      CHECK(m[0] == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(m[3] == doctest::Approx(-1.0).epsilon(1e-15));
      CHECK(m[1] == 0.0);
    }
  }
  SUBCASE("diag(1, 2, 3) -> diag(-1, 0, 1)") {
    PeriodicGrid g(3, 4);
    SymTensorField T(g);
    for (std::size_t i = 0; i < T.nodes(); ++i) {
      T.comp(0)[i] = 1.0;
      T.comp(3)[i] = 2.0;
      T.comp(5)[i] = 3.0;
    }
    QTensorField Q = deviatoric(T);
    for (std::size_t i = 0; i < Q.nodes(); ++i) {
      auto m = Q.matrix(i);
      CHECK(m[0] == doctest::Approx(-1.0).epsilon(1e-15));
      CHECK(m[4] == doctest::Approx(0.0).epsilon(1e-15));
      CHECK(m[8] == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("deviatoric: idempotence on random symmetric tensors") {
  for (int d : {2, 3}) {
    PeriodicGrid g(d, 6);
    std::mt19937_64 rng(99);
    SymTensorField T(g);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int c = 0; c < T.components(); ++c)
      for (std::size_t i = 0; i < T.nodes(); ++i) T.comp(c)[i] = dist(rng);
    QTensorField once = deviatoric(T);
    QTensorField twice = deviatoric(sym_from_q(once));
    CHECK(max_abs_diff(once, twice) <= 1e-15);
  }
}

TEST_CASE("m_tensor: closed-form cases and unit trace") {
  PeriodicGrid g(2, 4);
  SUBCASE("Q = 0 gives M = I/2 with |M|_F^2 = 1/2") {
    QTensorField Q(g);
    SymTensorField M = m_tensor(Q, 1.0);
    for (std::size_t i = 0; i < M.nodes(); ++i) {
      auto m = M.matrix(i);
      CHECK(m[0] == doctest::Approx(0.5).epsilon(1e-15));
      CHECK(m[3] == doctest::Approx(0.5).epsilon(1e-15));
      CHECK(m[1] == 0.0);
      const double f2 = m[0] * m[0] + 2 * m[1] * m[1] + m[3] * m[3];
      CHECK(f2 == doctest::Approx(0.5).epsilon(1e-15));
    }
  }
  SUBCASE("saturated uniaxial Q = diag(s+/2, -s+/2) gives M = diag(1, 0)") {
    const double sp = 0.7;
    QTensorField Q(g);
    for (std::size_t i = 0; i < Q.nodes(); ++i) Q.comp(0)[i] = sp / 2;
    SymTensorField M = m_tensor(Q, sp);
    for (std::size_t i = 0; i < M.nodes(); ++i) {
      auto m = M.matrix(i);
      CHECK(m[0] == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(m[3] == doctest::Approx(0.0).epsilon(1e-15));
    }
  }
  SUBCASE("off-diagonal passes through: Q12 = s+ gives M12 = 1") {
    const double sp = 1.3;
    QTensorField Q(g);
    for (std::size_t i = 0; i < Q.nodes(); ++i) Q.comp(1)[i] = sp;
    SymTensorField M = m_tensor(Q, sp);
    for (std::size_t i = 0; i < M.nodes(); ++i)
      CHECK(M.comp(1)[i] == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("trace is one pointwise for random Q") {
    std::mt19937_64 rng(7);
    QTensorField Q = random_q(g, rng, 1.5);
    SymTensorField M = m_tensor(Q, 0.9);
    for (std::size_t i = 0; i < M.nodes(); ++i)
      CHECK(M.trace(i) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("non-positive s_plus rejected") {
    QTensorField Q(g);
    CHECK_THROWS_AS(m_tensor(Q, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(m_tensor(Q, -1.0), std::invalid_argument);
  }
}

TEST_CASE("tracelessness is structural for reconstructed matrices") {
  for (int d : {2, 3}) {
    PeriodicGrid g(d, 6);
    std::mt19937_64 rng(2024);
    QTensorField Q = random_q(g, rng, 3.0);
    double max_tr = 0, max_f = 0;
    for (std::size_t i = 0; i < Q.nodes(); ++i) {
      auto m = Q.matrix(i);  // row-major, stride d
      double tr = 0, f2 = 0;
      for (int r = 0; r < d; ++r) tr += m[d * r + r];
      for (double e : m) f2 += e * e;
      max_tr = std::max(max_tr, std::abs(tr));
      max_f = std::max(max_f, std::sqrt(f2));
    }
    CHECK(max_tr <= 1e-13 * max_f);
  }
}

TEST_CASE("director wave has constant Frobenius norm sqrt((d-1)/d)") {
  SUBCASE("2d") {
    PeriodicGrid g(2, 12);
    QTensorField Q = q_from_director(g, director_wave_2d(g));
    ScalarField f = frobenius_pointwise(Q);
    for (std::size_t i = 0; i < f.size(); ++i)
      CHECK(f[i] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-13));
  }
  SUBCASE("3d spherical-angle director") {
    PeriodicGrid g(3, 6);
    auto th = [](double x, double y, double) { return x + y; };
    auto ph = [](double, double y, double z) { return y + z; };
    std::vector<ScalarField> n;
    n.push_back(sampled(g, [&](double x, double y, double z) {
      return std::cos(th(x, y, z)) * std::sin(ph(x, y, z));
    }));
    n.push_back(sampled(g, [&](double x, double y, double z) {
      return std::sin(th(x, y, z)) * std::sin(ph(x, y, z));
    }));
    n.push_back(sampled(g, [&](double x, double y, double z) {
      return std::cos(ph(x, y, z));
    }));
    QTensorField Q = q_from_director(g, n);
    ScalarField f = frobenius_pointwise(Q);
    for (std::size_t i = 0; i < f.size(); ++i)
      CHECK(f[i] == doctest::Approx(std::sqrt(2.0 / 3)).epsilon(1e-13));
  }
}
