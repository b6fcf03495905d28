#include <cmath>

#include "oplab/error.hpp"
#include "oplab/inequalities.hpp"
#include "oplab/linalg.hpp"
#include "report.hpp"

namespace oplab {

using detail::norm_report;
using detail::order_report;
using detail::ReportContext;

namespace {

CheckParams params_with(const TolPolicy& tol) {
  tol.validate();
  CheckParams p;
  p.tol = tol;
  return p;
}

void same_dim(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("operands differ in dimension");
}

}  // namespace

InequalityReport check_norm_product_lemma(const HermitianMatrix& a, const HermitianMatrix& b,
                                          const TolPolicy& tol) {
  same_dim(a, b);
  const CheckParams params = params_with(tol);
  const InstanceFingerprint fp{};
  const double s = operator_norm(a + b);
  return norm_report("lemma/norm_product", operator_norm(a * b), 0.25 * s * s, ReportContext{params, fp});
}

InequalityReport check_norm_power_lemma(const HermitianMatrix& a, const HermitianMatrix& b, double r,
                                        const TolPolicy& tol) {
  same_dim(a, b);
  if (!(r >= 1.0)) throw ConfigError("norm power lemma needs r >= 1");
  const CheckParams params = params_with(tol);
  const InstanceFingerprint fp{};
  return norm_report("lemma/norm_power", operator_norm(psd_power(a, r) + psd_power(b, r)),
                     operator_norm(psd_power(a + b, r)), ReportContext{params, fp});
}

Reports check_abs_block_lemma(const ComplexMatrix& x, const TolPolicy& tol) {
  if (!x.is_square()) throw DimensionError("abs block lemma needs a square matrix");
  const CheckParams params = params_with(tol);
  const InstanceFingerprint fp{};
  const ReportContext ctx{params, fp};
  const std::size_t n = x.rows();
  const double t = operator_norm(x);

  ComplexMatrix block(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    block(i, i) = t;
    block(n + i, n + i) = t;
    for (std::size_t j = 0; j < n; ++j) {
      block(i, n + j) = x(i, j);
      block(n + j, i) = std::conj(x(i, j));
    }
  }
  Reports out;
  out.push_back(order_report("lemma/abs_bound", abs_value(x), HermitianMatrix::scalar(n, t),
                             std::nullopt, ctx));
  out.push_back(order_report("lemma/block_positive", HermitianMatrix::scalar(2 * n, 0.0),
                             HermitianMatrix(block), std::nullopt, ctx));
  return out;
}

InequalityReport check_key_bound(const HermitianMatrix& a, const SpectralBounds& bounds, double alpha,
                                 const TolPolicy& tol) {
  if (!(alpha >= 1.0 && alpha <= 2.0)) throw ConfigError("key bound needs alpha in [1, 2]");
  CheckParams params = params_with(tol);
  params.alpha = alpha;
  params.bounds = bounds;
  if (!spectrum_in_bounds(a, bounds, tol)) throw DomainError("spectrum of A lies outside [m, M]");
  const InstanceFingerprint fp{};
  const double ma = std::pow(bounds.m(), alpha), Ma = std::pow(bounds.M(), alpha);
  const EigenDecomposition e = eig_hermitian(a);
  const HermitianMatrix lhs = Ma * ma * matrix_power(e, -alpha) + matrix_power(e, alpha);
  return order_report("lemma/key_bound", lhs, HermitianMatrix::scalar(a.dim(), Ma + ma),
                      HermitianMatrix::scalar(a.dim(), 1.0 / std::sqrt(Ma + ma)), ReportContext{params, fp});
}

InequalityReport check_choi_inequality(const KrausMap& phi, const HermitianMatrix& t,
                                       const TolPolicy& tol) {
  const CheckParams params = params_with(tol);
  const InstanceFingerprint fp{};
  const HermitianMatrix rhs = apply(phi, matrix_power(t, -1.0));
  return order_report("lemma/choi", matrix_power(apply(phi, t), -1.0), rhs,
                      std::nullopt, ReportContext{params, fp});
}

InequalityReport check_map_power_inequality(const KrausMap& phi, const HermitianMatrix& t, double alpha,
                                            const TolPolicy& tol) {
  if (!(alpha >= 1.0 && alpha <= 2.0)) throw ConfigError("map power inequality needs alpha in [1, 2]");
  CheckParams params = params_with(tol);
  params.alpha = alpha;
  const InstanceFingerprint fp{};
  return order_report("lemma/map_power", matrix_power(apply(phi, t), alpha),
                      apply(phi, matrix_power(t, alpha)), std::nullopt, ReportContext{params, fp});
}

}  // namespace oplab
