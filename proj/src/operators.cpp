#include "smectic/operators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace smectic {

// --- stencil operators -------------------------------------------------------

ScalarField diff(const ScalarField& f, int axis, DiffMode mode) {
  const PeriodicGrid& g = f.grid();
  if (axis < 0 || axis >= g.d)
    throw std::out_of_range("diff: axis out of range for dimension");
  ScalarField out(g);
  const int J = g.J;
  const int KZ = (g.d == 3) ? J : 1;
  const double inv_h = 1.0 / g.h;
  const double inv_2h = 0.5 / g.h;
  for (int ix = 0; ix < J; ++ix)
    for (int iy = 0; iy < J; ++iy)
      for (int iz = 0; iz < KZ; ++iz) {
        int px = ix, py = iy, pz = iz;  // +1 neighbor
        int mx = ix, my = iy, mz = iz;  // -1 neighbor
        switch (axis) {
          case 0: px = g.wrap(ix + 1); mx = g.wrap(ix - 1); break;
          case 1: py = g.wrap(iy + 1); my = g.wrap(iy - 1); break;
          default: pz = g.wrap(iz + 1); mz = g.wrap(iz - 1); break;
        }
        const std::size_t i = g.index(ix, iy, iz);
        const double fp = f[g.index(px, py, pz)];
        const double fm = f[g.index(mx, my, mz)];
        const double fc = f[i];
        switch (mode) {
          case DiffMode::forward: out[i] = (fp - fc) * inv_h; break;
          case DiffMode::backward: out[i] = (fc - fm) * inv_h; break;
          case DiffMode::central: out[i] = (fp - fm) * inv_2h; break;
        }
      }
  return out;
}

namespace {

// D+_k D-_k f, evaluated as the literal composition so that the hessian
// diagonal and the laplacian share values bit-for-bit.
ScalarField second_diff(const ScalarField& f, int axis) {
  return diff(diff(f, axis, DiffMode::backward), axis, DiffMode::forward);
}

ScalarField mixed_diff(const ScalarField& f, int k, int l) {
  return diff(diff(f, l, DiffMode::central), k, DiffMode::central);
}

}  // namespace

ScalarField laplacian(const ScalarField& f) {
  const PeriodicGrid& g = f.grid();
  ScalarField out = second_diff(f, 0);
  for (int k = 1; k < g.d; ++k) {
    ScalarField t = second_diff(f, k);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += t[i];
  }
  return out;
}

QTensorField laplacian(const QTensorField& Q) {
  QTensorField out(Q.grid());
  for (int c = 0; c < Q.components(); ++c) out.comp(c) = laplacian(Q.comp(c));
  return out;
}

ScalarField biharmonic(const ScalarField& f) { return laplacian(laplacian(f)); }

SymTensorField hessian(const ScalarField& f) {
  const PeriodicGrid& g = f.grid();
  SymTensorField T(g);
  if (g.d == 2) {
    T.comp(0) = second_diff(f, 0);
    T.comp(1) = mixed_diff(f, 0, 1);
    T.comp(2) = second_diff(f, 1);
  } else {
    T.comp(0) = second_diff(f, 0);
    T.comp(1) = mixed_diff(f, 0, 1);
    T.comp(2) = mixed_diff(f, 0, 2);
    T.comp(3) = second_diff(f, 1);
    T.comp(4) = mixed_diff(f, 1, 2);
    T.comp(5) = second_diff(f, 2);
  }
  return T;
}

ScalarField double_divergence(const SymTensorField& T) {
  const PeriodicGrid& g = T.grid();
  ScalarField out(g);
  auto add = [&out](const ScalarField& t, double w) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * t[i];
  };
  if (g.d == 2) {
    add(second_diff(T.comp(0), 0), 1.0);
    add(mixed_diff(T.comp(1), 0, 1), 2.0);
    add(second_diff(T.comp(2), 1), 1.0);
  } else {
    add(second_diff(T.comp(0), 0), 1.0);
    add(mixed_diff(T.comp(1), 0, 1), 2.0);
    add(mixed_diff(T.comp(2), 0, 2), 2.0);
    add(second_diff(T.comp(3), 1), 1.0);
    add(mixed_diff(T.comp(4), 1, 2), 2.0);
    add(second_diff(T.comp(5), 2), 1.0);
  }
  return out;
}

// --- inner products and norms ------------------------------------------------

namespace {

double cell_measure(const PeriodicGrid& g) {
  double m = g.h;
  for (int k = 1; k < g.d; ++k) m *= g.h;
  return m;
}

// Full d^2-entry dot of two traceless symmetric tensors from stored components.
inline double qdot(int d, const QTensorField& F, const QTensorField& G,
                   std::size_t i) {
  if (d == 2)
    return 2.0 * (F.comp(0)[i] * G.comp(0)[i] + F.comp(1)[i] * G.comp(1)[i]);
  const double f0 = F.comp(0)[i], f3 = F.comp(3)[i];
  const double g0 = G.comp(0)[i], g3 = G.comp(3)[i];
  return f0 * g0 + f3 * g3 + (f0 + f3) * (g0 + g3) +
         2.0 * (F.comp(1)[i] * G.comp(1)[i] + F.comp(2)[i] * G.comp(2)[i] +
                F.comp(4)[i] * G.comp(4)[i]);
}

inline double sdot(int d, const SymTensorField& F, const SymTensorField& G,
                   std::size_t i) {
  if (d == 2)
    return F.comp(0)[i] * G.comp(0)[i] + 2.0 * F.comp(1)[i] * G.comp(1)[i] +
           F.comp(2)[i] * G.comp(2)[i];
  return F.comp(0)[i] * G.comp(0)[i] + F.comp(3)[i] * G.comp(3)[i] +
         F.comp(5)[i] * G.comp(5)[i] +
         2.0 * (F.comp(1)[i] * G.comp(1)[i] + F.comp(2)[i] * G.comp(2)[i] +
                F.comp(4)[i] * G.comp(4)[i]);
}

}  // namespace

double inner(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid());
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s * cell_measure(f.grid());
}

double inner(const QTensorField& F, const QTensorField& G) {
  require_same_grid(F.grid(), G.grid());
  const int d = F.grid().d;
  double s = 0.0;
  for (std::size_t i = 0; i < F.nodes(); ++i) s += qdot(d, F, G, i);
  return s * cell_measure(F.grid());
}

double inner(const SymTensorField& F, const SymTensorField& G) {
  require_same_grid(F.grid(), G.grid());
  const int d = F.grid().d;
  double s = 0.0;
  for (std::size_t i = 0; i < F.nodes(); ++i) s += sdot(d, F, G, i);
  return s * cell_measure(F.grid());
}

double grad_norm_sq(const ScalarField& f) {
  double s = 0.0;
  for (int k = 0; k < f.grid().d; ++k) {
    ScalarField dk = diff(f, k, DiffMode::forward);
    s += inner(dk, dk);
  }
  return s;
}

double grad_norm_sq(const QTensorField& Q) {
  double s = 0.0;
  for (int k = 0; k < Q.grid().d; ++k) {
    QTensorField dk(Q.grid());
    for (int c = 0; c < Q.components(); ++c)
      dk.comp(c) = diff(Q.comp(c), k, DiffMode::forward);
    s += inner(dk, dk);
  }
  return s;
}

Norms norms(const ScalarField& f) {
  Norms n;
  n.l2 = std::sqrt(inner(f, f));
  for (std::size_t i = 0; i < f.size(); ++i)
    n.linf = std::max(n.linf, std::abs(f[i]));
  const double gsq = grad_norm_sq(f);
  n.h1 = std::sqrt(n.l2 * n.l2 + gsq);
  ScalarField lap = laplacian(f);
  n.h2 = std::sqrt(n.h1 * n.h1 + inner(lap, lap));
  return n;
}

Norms norms(const QTensorField& Q) {
  Norms n;
  n.l2 = std::sqrt(inner(Q, Q));
  ScalarField fro = frobenius_pointwise(Q);
  for (std::size_t i = 0; i < fro.size(); ++i)
    n.linf = std::max(n.linf, fro[i]);
  n.h1 = std::sqrt(n.l2 * n.l2 + grad_norm_sq(Q));
  QTensorField lap = laplacian(Q);
  n.h2 = std::sqrt(n.h1 * n.h1 + inner(lap, lap));
  return n;
}

// --- scalar generating functions ---------------------------------------------

double exp_neg(double y) { return std::exp(-y); }

double phi1_neg(double y) {
  if (y < 1e-5) return 1.0 - 0.5 * y + y * y / 6.0;
  return -std::expm1(-y) / y;
}

double q_fun(double y) {
  if (y < 1e-5) return 1.0 - 0.5 * y + y * y / 12.0;
  return y * std::exp(-y) / (-std::expm1(-y));
}

double q1_fun(double y) { return q_fun(y) + 0.5 * y; }

// --- spectral kernels --------------------------------------------------------

SpectralKernel build_kernel(const PeriodicGrid& grid, OpKind kind, double coeff,
                            double g, double kappa, double tau) {
  if (!(coeff > 0.0))
    throw std::invalid_argument("kernel: operator coefficient must be positive");
  if (!(kappa > 0.0))
    throw std::invalid_argument("kernel: non-positive stabilizer");
  if (!(tau > 0.0)) throw std::invalid_argument("kernel: tau must be positive");
  if (!(g > 0.0)) throw std::invalid_argument("kernel: g must be positive");

  SpectralKernel k;
  k.grid_ = grid;
  k.kind_ = kind;
  k.coeff_ = coeff;
  k.kappa_ = kappa;
  k.tau_ = tau;
  k.g_ = g;

  const Transform& tr = transform_for(grid);
  const std::size_t nm = tr.nmodes();
  k.lap_.resize(nm);
  k.eigen0_.resize(nm);
  k.exp0_.resize(nm);
  for (std::size_t m = 0; m < nm; ++m) {
    const double lam = tr.lap_symbol(m);
    k.lap_[m] = lam;
    k.eigen0_[m] =
        (kind == OpKind::l_q) ? coeff * (-lam) : 2.0 * coeff * lam * lam;
    k.exp0_[m] = std::exp(-tau * k.eigen0_[m]);
  }
  k.eigen_.resize(nm);
  k.exp_.resize(nm);
  k.phi1_.resize(nm);
  k.qt_.resize(nm);
  k.q1t_.resize(nm);
  k.fill_tables();
  return k;
}

void SpectralKernel::fill_tables() {
  const double shift = g_ * kappa_;
  const double exp_shift = std::exp(-tau_ * shift);
  for (std::size_t m = 0; m < eigen_.size(); ++m) {
    const double lam = eigen0_[m] + shift;
    const double y = tau_ * lam;
    eigen_[m] = lam;
    exp_[m] = exp_shift * exp0_[m];
    phi1_[m] = phi1_neg(y);
    qt_[m] = q_fun(y);
    q1t_[m] = q1_fun(y);
  }
}

void SpectralKernel::set_g(double g_new) {
  if (!(g_new > 0.0)) throw std::invalid_argument("kernel: g must be positive");
  g_ = g_new;
  fill_tables();
}

namespace {

double weight_of(const SpectralKernel& k, WeightKind which, std::size_t m) {
  switch (which) {
    case WeightKind::Q: return k.table_q(m);
    case WeightKind::Q1: return k.table_q1(m);
    case WeightKind::QL: return k.table_q(m) * k.eigenvalue(m);
    case WeightKind::QQ: return k.table_q(m) * k.table_q(m);
    case WeightKind::L: return k.eigenvalue(m);
  }
  return 0.0;
}

}  // namespace

ScalarField apply_kernel(const SpectralKernel& k, KernelTable which,
                         const ScalarField& f) {
  require_same_grid(k.grid(), f.grid());
  const Transform& tr = transform_for(k.grid());
  std::vector<std::complex<double>> spec(tr.nmodes());
  tr.forward(f.data(), spec.data());
  for (std::size_t m = 0; m < spec.size(); ++m)
    spec[m] *= (which == KernelTable::exp) ? k.table_exp(m) : k.table_phi1(m);
  ScalarField out(f.grid());
  tr.inverse(spec.data(), out.data());
  return out;
}

QTensorField apply_kernel(const SpectralKernel& k, KernelTable which,
                          const QTensorField& f) {
  require_same_grid(k.grid(), f.grid());
  QTensorField out(f.grid());
  for (int c = 0; c < f.components(); ++c)
    out.comp(c) = apply_kernel(k, which, f.comp(c));
  return out;
}

double weighted_norm(const SpectralKernel& k, WeightKind which,
                     const ScalarField& f) {
  require_same_grid(k.grid(), f.grid());
  const Transform& tr = transform_for(k.grid());
  std::vector<std::complex<double>> spec(tr.nmodes());
  tr.forward(f.data(), spec.data());
  double s = 0.0;
  for (std::size_t m = 0; m < spec.size(); ++m)
    s += tr.multiplicity(m) * weight_of(k, which, m) * std::norm(spec[m]);
  const double h = f.grid().h;
  double meas = h;
  for (int a = 1; a < f.grid().d; ++a) meas *= h;
  return s * meas / static_cast<double>(f.grid().size());
}

double weighted_norm(const SpectralKernel& k, WeightKind which,
                     const QTensorField& f) {
  require_same_grid(k.grid(), f.grid());
  const Transform& tr = transform_for(k.grid());
  const int nc = f.components();
  std::vector<std::vector<std::complex<double>>> spec(nc);
  for (int c = 0; c < nc; ++c) {
    spec[c].resize(tr.nmodes());
    tr.forward(f.comp(c).data(), spec[c].data());
  }
  const int d = f.grid().d;
  double s = 0.0;
  for (std::size_t m = 0; m < tr.nmodes(); ++m) {
    double dot;
    if (d == 2) {
      dot = 2.0 * (std::norm(spec[0][m]) + std::norm(spec[1][m]));
    } else {
      const std::complex<double> q0 = spec[0][m], q3 = spec[3][m];
      dot = std::norm(q0) + std::norm(q3) + std::norm(q0 + q3) +
            2.0 * (std::norm(spec[1][m]) + std::norm(spec[2][m]) +
                   std::norm(spec[4][m]));
    }
    s += tr.multiplicity(m) * weight_of(k, which, m) * dot;
  }
  const double h = f.grid().h;
  double meas = h;
  for (int a = 1; a < d; ++a) meas *= h;
  return s * meas / static_cast<double>(f.grid().size());
}

}  // namespace smectic
