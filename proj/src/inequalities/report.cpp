#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oplab::detail {
namespace {

InequalityReport base_report(std::string id, CheckMode mode, const ReportContext& ctx) {
  InequalityReport r;
  r.check_id = std::move(id);
  r.mode = mode;
  r.params = ctx.params;
  r.fingerprint = ctx.fingerprint;
  return r;
}

double safe_ratio(double value, double bound, double tol) {
  if (bound > 0.0) return value / bound;
  return value <= tol ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

InequalityReport order_report(std::string id, const HermitianMatrix& lhs, const HermitianMatrix& rhs,
                              const std::optional<HermitianMatrix>& whitening,
                              const ReportContext& ctx) {
  InequalityReport r = base_report(std::move(id), CheckMode::order, ctx);
  const EigenDecomposition el = eig_hermitian(lhs);
  const EigenDecomposition er = eig_hermitian(rhs);
  r.lhs_value = el.max();
  r.rhs_bound = er.max();
  r.margin = lambda_min(rhs - lhs);
  r.scale = std::max({1.0, std::abs(el.min()), std::abs(el.max()), std::abs(er.min()),
                      std::abs(er.max())});
  r.tol_used = ctx.params.tol.tolerance(r.scale);
  if (whitening) {
    r.ratio = lambda_max(congruence(whitening->matrix(), lhs));
  } else {
    r.ratio = safe_ratio(r.lhs_value, r.rhs_bound, r.tol_used);
  }
  r.passed = r.margin >= -r.tol_used;
  return r;
}

InequalityReport norm_report(std::string id, double value, double bound, const ReportContext& ctx) {
  InequalityReport r = base_report(std::move(id), CheckMode::norm, ctx);
  r.lhs_value = value;
  r.rhs_bound = bound;
  r.margin = bound - value;
  r.scale = std::max({1.0, std::abs(value), std::abs(bound)});
  r.tol_used = ctx.params.tol.tolerance(r.scale);
  r.ratio = safe_ratio(value, bound, r.tol_used);
  r.passed = r.margin >= -r.tol_used;
  return r;
}

InequalityReport ratio_report(std::string id, double value, double bound, const ReportContext& ctx) {
  InequalityReport r = norm_report(std::move(id), value, bound, ctx);
  r.mode = CheckMode::report_only;
  r.passed.reset();
  return r;
}

}  // namespace oplab::detail
