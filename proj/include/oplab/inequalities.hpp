#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oplab/maps.hpp"
#include "oplab/matrix.hpp"
#include "oplab/means.hpp"

namespace oplab {

// Pair of n x k isometries with orthogonal ranges: X*X = Y*Y = I_k, X*Y = 0.
class IsometryPair {
 public:
  IsometryPair() = default;
  // DomainError when any residual exceeds 1e-10 or 2k > n.
  IsometryPair(ComplexMatrix x, ComplexMatrix y);

  std::size_t n() const noexcept { return x_.rows(); }
  std::size_t k() const noexcept { return x_.cols(); }
  const ComplexMatrix& x() const noexcept { return x_; }
  const ComplexMatrix& y() const noexcept { return y_; }

 private:
  ComplexMatrix x_;
  ComplexMatrix y_;
};

struct CheckParams {
  double p = 2.0;
  double alpha = 1.0;
  double v = 0.5;
  MeanSpec sigma{MeanKind::arithmetic, 0.5, 0.0};
  MeanSpec tau{MeanKind::harmonic, 0.5, 0.0};
  SpectralBounds bounds;
  TolPolicy tol;

  double R() const { return v > 0.5 ? v : 1.0 - v; }
};

// Where an instance came from; enough to regenerate it through the harness.
struct InstanceFingerprint {
  std::uint64_t seed = 0;
  std::int64_t grid_index = -1;
  std::int64_t trial_index = -1;
  std::size_t n = 0;
  std::size_t k = 0;
};

struct Instance {
  HermitianMatrix a;
  std::optional<HermitianMatrix> b;
  KrausMap phi;
  std::optional<IsometryPair> iso;
  SpectralBounds bounds;
  InstanceFingerprint fingerprint;
};

enum class CheckMode { order, norm, report_only };
std::string_view to_string(CheckMode mode);

// Outcome of one displayed inequality.
//
// order mode: lhs_value = lambda_max(LHS), rhs_bound = lambda_max(RHS),
//   margin = lambda_min(RHS - LHS), ratio = lambda_max(W* LHS W) with
//   W = RHS^{-1/2} whenever RHS is invertible.
// norm mode: lhs_value = ||LHS||, rhs_bound = the scalar bound,
//   margin = rhs_bound - lhs_value, ratio = lhs_value / rhs_bound.
// passed <=> margin >= -tol_used, absent for report_only.
struct InequalityReport {
  std::string check_id;
  CheckMode mode = CheckMode::order;
  double lhs_value = 0.0;
  double rhs_bound = 0.0;
  double margin = 0.0;
  double ratio = 0.0;
  double scale = 1.0;  // max(1, |lhs|, |rhs|)
  double tol_used = 0.0;
  std::optional<bool> passed;
  CheckParams params;
  InstanceFingerprint fingerprint;
};

using Reports = std::vector<InequalityReport>;

// --- constants -------------------------------------------------------------
namespace constants {

// (m^a + M^a)^{2p/a} / (16 m^p M^p)
double kantorovich_power(double m, double M, double alpha, double p);
// (m^a + M^a)^{p/a} / (4 m^{p/2} M^{p/2})
double kantorovich_product_norm(double m, double M, double alpha, double p);
// (M^a + m^a)^{2p/a} / (2 M^p m^p)
double product_sum(double m, double M, double alpha, double p);
// (K^{a/2} (M^a + m^a))^{2p/a} / (16 M^p m^p)
double mean_power(double m, double M, double alpha, double p);
// ((M - m)/(M + m))^2
double wielandt_factor(double m, double M);
// (M - m)^2 / (2 (M + m) sqrt(Mm))
double gumus_norm(double m, double M);
// (M - m)^4 / (4 (M + m)^2 M m)
double gumus_squared(double m, double M);
// (1/4) (((M - m)/(M + m))^2 M + 1/m)^p
double zhang_first(double m, double M, double p);
// ((M - m)/(M + m))^p (M/m)^{p/2}
double zhang_second(double m, double M, double p);
// (M - m)^p (M^a + m^a)^{p/a} / (2^{2 + p/2} M^{3p/4} m^{3p/4} (M + m)^{p/2})
double wielandt_power(double m, double M, double alpha, double p);

}  // namespace constants

// --- checks ----------------------------------------------------------------
// Every check validates its parameter constraints first (ConfigError) and the
// instance hypotheses (DomainError), then returns one report per display.

Reports check_kantorovich_baseline(const Instance& inst, const CheckParams& params);
Reports check_kantorovich_power(const Instance& inst, const CheckParams& params);
Reports check_product_sum(const Instance& inst, const CheckParams& params);
Reports check_hoa_baseline(const Instance& inst, const CheckParams& params);
Reports check_mean_power(const Instance& inst, const CheckParams& params);
Reports check_bhatia_davis(const Instance& inst, const CheckParams& params);
Reports check_lin_conjecture(const Instance& inst, const CheckParams& params);
Reports check_gumus(const Instance& inst, const CheckParams& params);
Reports check_zhang_wielandt(const Instance& inst, const CheckParams& params);
Reports check_wielandt_power(const Instance& inst, const CheckParams& params);
Reports check_gamma_symmetrized(const Instance& inst, const CheckParams& params);
Reports check_young(const Instance& inst, const CheckParams& params);
Reports check_ando(const Instance& inst, const CheckParams& params);
Reports check_squared_young(const Instance& inst, const CheckParams& params);
Reports check_reverse_young(const Instance& inst, const CheckParams& params);
Reports check_open_conjectures(const Instance& inst, const CheckParams& params);

// Lemma-level checks on explicit operands.
InequalityReport check_norm_product_lemma(const HermitianMatrix& a, const HermitianMatrix& b,
                                          const TolPolicy& tol = {});
InequalityReport check_norm_power_lemma(const HermitianMatrix& a, const HermitianMatrix& b,
                                        double r, const TolPolicy& tol = {});
// |X| <= ||X|| I and [[tI, X], [X*, tI]] >= 0 with t = ||X||.
Reports check_abs_block_lemma(const ComplexMatrix& x, const TolPolicy& tol = {});
// M^a m^a A^{-a} + A^a <= (M^a + m^a) I.
InequalityReport check_key_bound(const HermitianMatrix& a, const SpectralBounds& bounds,
                                 double alpha, const TolPolicy& tol = {});
// Phi(T)^{-1} <= Phi(T^{-1}).
InequalityReport check_choi_inequality(const KrausMap& phi, const HermitianMatrix& t,
                                       const TolPolicy& tol = {});
// Phi(T)^a <= Phi(T^a), 1 <= a <= 2.
InequalityReport check_map_power_inequality(const KrausMap& phi, const HermitianMatrix& t,
                                            double alpha, const TolPolicy& tol = {});

// --- registry --------------------------------------------------------------

struct CheckInfo {
  std::string_view id;
  std::string_view statement;
  bool needs_b = false;
  bool needs_iso = false;
  bool uses_p = false;
  bool uses_alpha = false;
  bool uses_v = false;
  bool uses_means = false;
  bool report_only = false;
  Reports (*run)(const Instance&, const CheckParams&) = nullptr;
};

std::span<const CheckInfo> all_checks();
const CheckInfo& find_check(std::string_view id);  // ConfigError for unknown ids

// Smallest admissible p for the check at the given alpha (0 when p is unused).
double min_p(const CheckInfo& info, double alpha);

// Reason the parameters violate the check's constraints, if they do.
std::optional<std::string> constraint_violation(const CheckInfo& info, const CheckParams& params);

}  // namespace oplab
