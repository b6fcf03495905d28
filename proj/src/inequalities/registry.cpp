#include <array>
#include <cmath>
#include <sstream>

#include "oplab/error.hpp"
#include "oplab/inequalities.hpp"
#include "oplab/linalg.hpp"

namespace oplab {

IsometryPair::IsometryPair(ComplexMatrix x, ComplexMatrix y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() != y_.rows() || x_.cols() != y_.cols()) {
    throw DimensionError("isometries X and Y must have the same shape");
  }
  if (x_.cols() == 0 || 2 * x_.cols() > x_.rows()) {
    throw DomainError("isometry pair needs 1 <= k and 2k <= n");
  }
  const auto k = x_.cols();
  const double rx = (gram(x_).matrix() - ComplexMatrix::identity(k)).frobenius_norm();
  const double ry = (gram(y_).matrix() - ComplexMatrix::identity(k)).frobenius_norm();
  const double rxy = (x_.adjoint() * y_).frobenius_norm();
  if (rx > 1e-10 || ry > 1e-10 || rxy > 1e-10) {
    std::ostringstream os;
    os << "not an isometry pair: ||X*X - I|| = " << rx << ", ||Y*Y - I|| = " << ry
       << ", ||X*Y|| = " << rxy;
    throw DomainError(os.str());
  }
}

std::string_view to_string(CheckMode mode) {
  switch (mode) {
    case CheckMode::order: return "order";
    case CheckMode::norm: return "norm";
    case CheckMode::report_only: return "report_only";
  }
  return "order";
}

namespace {

constexpr std::array kChecks{
    CheckInfo{"kantorovich_baseline", "Phi^p(A^-1) <= (m+M)^2p/(16 m^p M^p) Phi(A)^-p",
              false, false, true, false, false, false, false, &check_kantorovich_baseline},
    CheckInfo{"kantorovich_power", "Phi^p(A^-1) <= (m^a+M^a)^(2p/a)/(16 m^p M^p) Phi(A)^-p",
              false, false, true, true, false, false, false, &check_kantorovich_power},
    CheckInfo{"product_sum", "|Phi^p(A^-1)Phi^p(A) + Phi^p(A)Phi^p(A^-1)| <= (M^a+m^a)^(2p/a)/(2 M^p m^p)",
              false, false, true, true, false, false, false, &check_product_sum},
    CheckInfo{"hoa_baseline", "Phi^2(A sigma B) <= K(h)^2 Phi^2(A tau B)",
              true, false, false, false, false, true, false, &check_hoa_baseline},
    CheckInfo{"mean_power", "Phi^p(A sigma B) <= (k^(a/2)(M^a+m^a))^(2p/a)/(16 M^p m^p) Phi^p(A tau B)",
              true, false, true, true, false, true, false, &check_mean_power},
    CheckInfo{"bhatia_davis", "Phi(X*AY)Phi(Y*AY)^-1 Phi(Y*AX) <= ((M-m)/(M+m))^2 Phi(X*AX)",
              false, true, false, false, false, false, false, &check_bhatia_davis},
    CheckInfo{"lin_conjecture", "||Phi(X*AY)Phi(Y*AY)^-1 Phi(Y*AX)Phi(X*AX)^-1|| vs ((M-m)/(M+m))^2",
              false, true, false, false, false, false, true, &check_lin_conjecture},
    CheckInfo{"gumus", "||Phi(X*AY)Phi(Y*AY)^-1 Phi(Y*AX)Phi(X*AX)^-1|| <= (M-m)^2/(2(M+m)sqrt(Mm))",
              false, true, false, false, false, false, false, &check_gumus},
    CheckInfo{"zhang_wielandt", "||(Phi(X*AY)Phi(Y*AY)^-1 Phi(Y*AX))^(p/2) Phi(X*AX)^(-p/2)|| bounds",
              false, true, true, false, false, false, false, &check_zhang_wielandt},
    CheckInfo{"wielandt_power", "||Gamma|| <= (M-m)^p (M^a+m^a)^(p/a)/(2^(2+p/2) M^(3p/4) m^(3p/4) (M+m)^(p/2))",
              false, true, true, true, false, false, false, &check_wielandt_power},
    CheckInfo{"gamma_symmetrized", "|Gamma + Gamma*| <= 2 c I and Gamma + Gamma* <= 2 c I",
              false, true, true, true, false, false, false, &check_gamma_symmetrized},
    CheckInfo{"young", "A !_v B <= A #_v B <= A nabla_v B",
              true, false, false, false, true, false, false, &check_young},
    CheckInfo{"ando", "Phi(A #_v B) <= Phi(A) #_v Phi(B)",
              true, false, false, false, true, false, false, &check_ando},
    CheckInfo{"squared_young", "Phi^2(A nabla_v B) <= K(h)^2 Phi^2(A #_v B), and the harmonic forms",
              true, false, false, false, true, false, false, &check_squared_young},
    CheckInfo{"reverse_young", "A nabla_v B <= K(h)^R A #_v B and A nabla_v B <= S(h) A #_v B",
              true, false, false, false, true, false, false, &check_reverse_young},
    CheckInfo{"open_conjectures", "Phi^2(A nabla_v B) vs K(h)^2R Phi^2(A #_v B) and S(h)^2 Phi^2(A #_v B)",
              true, false, false, false, true, false, true, &check_open_conjectures},
};

bool alpha_closed(std::string_view id) {
  return id == "kantorovich_power" || id == "product_sum" || id == "wielandt_power" ||
         id == "gamma_symmetrized";
}

bool v_open(std::string_view id) { return id == "squared_young" || id == "open_conjectures"; }

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

std::span<const CheckInfo> all_checks() { return kChecks; }

const CheckInfo& find_check(std::string_view id) {
  for (const auto& c : kChecks) {
    if (c.id == id) return c;
  }
  throw ConfigError("unknown check '" + std::string(id) + "'");
}

double min_p(const CheckInfo& info, double alpha) {
  const std::string_view id = info.id;
  if (id == "kantorovich_baseline") return 2.0;
  if (id == "product_sum") return alpha;
  if (id == "zhang_wielandt") return 1.0;
  if (id == "kantorovich_power" || id == "mean_power" || id == "wielandt_power" ||
      id == "gamma_symmetrized") {
    return 2.0 * alpha;
  }
  return 0.0;
}

std::optional<std::string> constraint_violation(const CheckInfo& info, const CheckParams& params) {
  try {
    params.tol.validate();
  } catch (const ConfigError& e) {
    return std::string(e.what());
  }
  const std::string_view id = info.id;
  if (!std::isfinite(params.p) || !std::isfinite(params.alpha) || !std::isfinite(params.v)) {
    return std::string("p, alpha and v must be finite");
  }
  if (info.uses_alpha) {
    if (id == "mean_power") {
      if (!(params.alpha > 1.0 && params.alpha <= 2.0)) {
        return "alpha = " + fmt(params.alpha) + " outside (1, 2]";
      }
    } else if (alpha_closed(id) && !(params.alpha >= 1.0 && params.alpha <= 2.0)) {
      return "alpha = " + fmt(params.alpha) + " outside [1, 2]";
    }
  }
  if (info.uses_p) {
    const double lo = min_p(info, params.alpha);
    if (!(params.p >= lo)) return "p = " + fmt(params.p) + " below the minimum " + fmt(lo);
  }
  if (info.uses_v) {
    if (v_open(id)) {
      if (!(params.v > 0.0 && params.v < 1.0)) return "v = " + fmt(params.v) + " outside (0, 1)";
    } else if (!(params.v >= 0.0 && params.v <= 1.0)) {
      return "v = " + fmt(params.v) + " outside [0, 1]";
    }
  }
  if (info.uses_means) {
    try {
      params.sigma.validate();
      params.tau.validate();
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    if (params.sigma.v != params.tau.v) {
      return "sigma and tau must share the weight v (got " + params.sigma.to_string() + " and " +
             params.tau.to_string() + ")";
    }
  }
  return std::nullopt;
}

}  // namespace oplab
