#include "oplab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "oplab/error.hpp"

namespace oplab {
namespace {

const simd::KernelTable& kernels_of(const EigOptions& opts) {
  return opts.kernels != nullptr ? *opts.kernels : simd::active_kernels();
}

double off_diagonal_mass(const ComplexMatrix& a) {
  double s = 0.0;
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * std::norm(a(i, j));
  return std::sqrt(s);
}

bool is_integer(double s) { return std::nearbyint(s) == s; }

}  // namespace

EigenDecomposition eig_hermitian(const HermitianMatrix& h, const EigOptions& opts) {
  const auto& k = kernels_of(opts);
  const std::size_t n = h.dim();
  ComplexMatrix a = h.matrix();
  // Rows of w are the eigenvectors (w = V^T), so every update is a row update.
  ComplexMatrix w = ComplexMatrix::identity(n);

  const double norm_f = a.frobenius_norm();
  const double target = opts.rel_tol * norm_f;
  int sweep = 0;
  double off = off_diagonal_mass(a);

  while (off > target && norm_f > 0.0) {
    if (sweep >= opts.max_sweeps) {
      throw ConvergenceError("Jacobi eigensolver did not converge after " +
                                 std::to_string(sweep) + " sweeps (off-diagonal mass " +
                                 std::to_string(off) + ")",
                             off, sweep);
    }
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex b = a(p, q);
        const double abs_b = std::abs(b);
        if (abs_b == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        if (sweep > 4 && std::abs(app) + 100.0 * abs_b == std::abs(app) &&
            std::abs(aqq) + 100.0 * abs_b == std::abs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const Complex u = b / abs_b;
        const double tau = (aqq - app) / (2.0 * abs_b);
        const double t = std::abs(tau) > 1e150
                             ? 0.5 / tau
                             : std::copysign(1.0, tau) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // Rows p, q of G* A with G = [[c, s u], [-s conj(u), c]].
        k.crot(n, c, -s * u, s * std::conj(u), c, a.row(p).data(), a.row(q).data());
        // Columns follow from Hermiticity of G* A G.
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          a(r, p) = std::conj(a(p, r));
          a(r, q) = std::conj(a(q, r));
        }
        a(p, p) = app - t * abs_b;
        a(q, q) = aqq + t * abs_b;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        // V <- V G, on the transposed storage.
        k.crot(n, c, -s * std::conj(u), s * u, c, w.row(p).data(), w.row(q).data());
      }
    }
    off = off_diagonal_mass(a);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() < a(j, j).real();
  });

  EigenDecomposition out;
  out.dim = n;
  out.sweeps = sweep;
  out.off_diagonal = off;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = a(order[j], order[j]).real();
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = w(order[j], i);
  }
  return out;
}

HermitianMatrix spectral_apply(const EigenDecomposition& eig,
                               const std::function<double(double)>& f) {
  const auto& k = simd::active_kernels();
  const std::size_t n = eig.dim;
  const ComplexMatrix& v = eig.eigenvectors;
  const ComplexMatrix vh = v.adjoint();
  std::vector<double> fl(n);
  for (std::size_t l = 0; l < n; ++l) fl[l] = f(eig.eigenvalues[l]);

  ComplexMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex* out = r.row(i).data() + i;
    for (std::size_t l = 0; l < n; ++l) {
      if (fl[l] == 0.0) continue;
      k.caxpy(n - i, v(i, l) * fl[l], vh.row(l).data() + i, out);
    }
  }
  return HermitianMatrix::from_upper(std::move(r));
}

double pd_floor(double lambda_max) { return 1e-12 * std::max(1.0, lambda_max); }

HermitianMatrix matrix_power(const EigenDecomposition& eig, double s) {
  if (!std::isfinite(s)) throw DomainError("matrix power exponent must be finite");
  if (s == 0.0) return HermitianMatrix::identity(eig.dim);
  if (s == 1.0) return spectral_apply(eig, [](double x) { return x; });
  if (s < 0.0 || !is_integer(s)) {
    const double floor = pd_floor(eig.max());
    if (!(eig.min() > floor)) {
      throw DomainError("matrix power " + std::to_string(s) +
                        " needs a positive definite matrix; min eigenvalue is " +
                        std::to_string(eig.min()));
    }
  }
  if (s == -1.0) return spectral_apply(eig, [](double x) { return 1.0 / x; });
  if (s == 0.5) return spectral_apply(eig, [](double x) { return std::sqrt(x); });
  if (s == -0.5) return spectral_apply(eig, [](double x) { return 1.0 / std::sqrt(x); });
  return spectral_apply(eig, [s](double x) { return std::pow(x, s); });
}

HermitianMatrix matrix_power(const HermitianMatrix& a, double s, const EigOptions& opts) {
  if (s == 0.0) return HermitianMatrix::identity(a.dim());
  return matrix_power(eig_hermitian(a, opts), s);
}

HermitianMatrix psd_power(const HermitianMatrix& a, double s, const EigOptions& opts) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw DomainError("psd_power requires a positive finite exponent");
  }
  const EigenDecomposition eig = eig_hermitian(a, opts);
  const double floor = pd_floor(std::abs(eig.max()));
  if (eig.min() < -floor) {
    throw DomainError("psd_power needs a positive semidefinite matrix; min eigenvalue is " +
                      std::to_string(eig.min()));
  }
  return spectral_apply(eig, [s](double x) { return x <= 0.0 ? 0.0 : std::pow(x, s); });
}

double operator_norm(const ComplexMatrix& x) {
  if (x.empty()) return 0.0;
  const double top = lambda_max(gram(x));
  return std::sqrt(std::max(top, 0.0));
}

double operator_norm(const HermitianMatrix& a) {
  if (a.dim() == 0) return 0.0;
  const EigenDecomposition eig = eig_hermitian(a);
  return std::max(std::abs(eig.min()), std::abs(eig.max()));
}

HermitianMatrix abs_value(const ComplexMatrix& x) {
  if (!x.is_square()) throw DimensionError("abs_value needs a square matrix");
  const EigenDecomposition eig = eig_hermitian(gram(x));
  return spectral_apply(eig, [](double l) { return l <= 0.0 ? 0.0 : std::sqrt(l); });
}

double lambda_min(const HermitianMatrix& a, const EigOptions& opts) {
  return eig_hermitian(a, opts).min();
}

double lambda_max(const HermitianMatrix& a, const EigOptions& opts) {
  return eig_hermitian(a, opts).max();
}

LoewnerResult loewner_leq(const HermitianMatrix& a, const HermitianMatrix& b, const TolPolicy& tol) {
  if (a.dim() != b.dim()) {
    throw DimensionError("loewner_leq dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
  }
  tol.validate();
  LoewnerResult out;
  out.margin = lambda_min(b - a);
  out.tol = tol.tolerance(std::max(operator_norm(a), operator_norm(b)));
  out.holds = out.margin >= -out.tol;
  return out;
}

bool spectrum_in_bounds(const HermitianMatrix& a, const SpectralBounds& bounds, const TolPolicy& tol) {
  tol.validate();
  const EigenDecomposition eig = eig_hermitian(a);
  const double t = tol.tolerance(std::max(std::abs(eig.min()), std::abs(eig.max())));
  return eig.min() >= bounds.m() - t && eig.max() <= bounds.M() + t;
}

HermitianMatrix gram(const ComplexMatrix& x) {
  const auto& k = simd::active_kernels();
  const std::size_t n = x.cols();
  const ComplexMatrix xh = x.adjoint();
  ComplexMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex* out = r.row(i).data() + i;
    for (std::size_t l = 0; l < x.rows(); ++l) {
      k.caxpy(n - i, xh(i, l), x.row(l).data() + i, out);
    }
  }
  return HermitianMatrix::from_upper(std::move(r));
}

HermitianMatrix congruence(const ComplexMatrix& w, const HermitianMatrix& c) {
  if (w.rows() != c.dim()) throw DimensionError("congruence shape mismatch");
  const auto& k = simd::active_kernels();
  const ComplexMatrix t = c.matrix() * w;
  const ComplexMatrix wh = w.adjoint();
  const std::size_t n = w.cols();
  ComplexMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex* out = r.row(i).data() + i;
    for (std::size_t l = 0; l < w.rows(); ++l) {
      k.caxpy(n - i, wh(i, l), t.row(l).data() + i, out);
    }
  }
  return HermitianMatrix::from_upper(std::move(r));
}

HermitianMatrix hermitian_sum(const ComplexMatrix& g) {
  if (!g.is_square()) throw DimensionError("hermitian_sum needs a square matrix");
  const std::size_t n = g.rows();
  ComplexMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) r(i, j) = g(i, j) + std::conj(g(j, i));
  return HermitianMatrix::from_upper(std::move(r));
}

ComplexMatrix orthonormalize_columns(const ComplexMatrix& x) {
  const auto& k = simd::active_kernels();
  ComplexMatrix rows = x.transpose();  // row j holds column j of x
  const std::size_t len = rows.cols();
  for (std::size_t j = 0; j < rows.rows(); ++j) {
    Complex* rj = rows.row(j).data();
    const double initial = std::sqrt(k.cnorm2(len, rj));
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        const Complex* ri = rows.row(i).data();
        k.caxpy(len, -k.cdotc(len, ri, rj), ri, rj);
      }
    }
    const double norm = std::sqrt(k.cnorm2(len, rj));
    if (!(norm > 1e-12 * std::max(initial, 1e-300))) {
      throw DomainError("columns are numerically linearly dependent");
    }
    for (std::size_t l = 0; l < len; ++l) rj[l] /= norm;
  }
  return rows.transpose();
}

}  // namespace oplab
