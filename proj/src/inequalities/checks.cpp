#include <cmath>
#include <string>

#include "oplab/error.hpp"
#include "oplab/inequalities.hpp"
#include "oplab/linalg.hpp"
#include "report.hpp"

namespace oplab {

using detail::norm_report;
using detail::order_report;
using detail::ratio_report;
using detail::ReportContext;

namespace {

void enforce(std::string_view id, const CheckParams& params) {
  if (auto why = constraint_violation(find_check(id), params)) throw ConfigError(*why);
}

void require_in_bounds(const HermitianMatrix& a, const CheckParams& params, const char* name) {
  if (!spectrum_in_bounds(a, params.bounds, params.tol)) {
    throw DomainError(std::string("spectrum of ") + name + " lies outside [m, M]");
  }
}

const HermitianMatrix& require_b(const Instance& inst, const CheckParams& params) {
  if (!inst.b) throw ConfigError("check needs a second operator B");
  if (inst.b->dim() != inst.a.dim()) throw DimensionError("A and B differ in dimension");
  require_in_bounds(*inst.b, params, "B");
  return *inst.b;
}

void require_map_on(const KrausMap& phi, std::size_t dim) {
  if (phi.in_dim() != dim) {
    throw DimensionError("map acts on dimension " + std::to_string(phi.in_dim()) + ", operands have " +
                         std::to_string(dim));
  }
}

// c * T^q and its inverse square root c^{-1/2} T^{-q/2}, from one decomposition of T.
struct ScaledPower {
  HermitianMatrix value;
  std::optional<HermitianMatrix> inv_sqrt;
};

ScaledPower scaled_power(const EigenDecomposition& t, double c, double q) {
  ScaledPower out{c * matrix_power(t, q), std::nullopt};
  if (c > 0.0 && t.min() > pd_floor(t.max())) out.inv_sqrt = (1.0 / std::sqrt(c)) * matrix_power(t, -q / 2.0);
  return out;
}

ScaledPower scaled_identity(std::size_t n, double c) {
  ScaledPower out{HermitianMatrix::scalar(n, c), std::nullopt};
  if (c > 0.0) out.inv_sqrt = HermitianMatrix::scalar(n, 1.0 / std::sqrt(c));
  return out;
}

InequalityReport order_vs(std::string id, const HermitianMatrix& lhs, const ScaledPower& rhs,
                          const ReportContext& ctx) {
  return order_report(std::move(id), lhs, rhs.value, rhs.inv_sqrt, ctx);
}

HermitianMatrix square(const HermitianMatrix& x) { return gram(x.matrix()); }

// Operands shared by every Wielandt-type check.
struct WielandtParts {
  ComplexMatrix p;   // Phi(X* A Y)
  HermitianMatrix q; // Phi(Y* A Y)
  HermitianMatrix r; // Phi(X* A X)
  HermitianMatrix l; // Phi(X*AY) Phi(Y*AY)^{-1} Phi(Y*AX)
};

WielandtParts wielandt_parts(const Instance& inst, const CheckParams& params) {
  if (!inst.iso) throw ConfigError("check needs an isometry pair (X, Y)");
  const IsometryPair& iso = *inst.iso;
  if (iso.n() != inst.a.dim()) throw DimensionError("isometry pair does not match A");
  require_map_on(inst.phi, iso.k());
  require_in_bounds(inst.a, params, "A");
  WielandtParts w;
  w.p = apply(inst.phi, iso.x().adjoint() * (inst.a * iso.y()));
  w.q = apply(inst.phi, congruence(iso.y(), inst.a));
  w.r = apply(inst.phi, congruence(iso.x(), inst.a));
  w.l = gram(matrix_power(w.q, -0.5) * w.p.adjoint());
  return w;
}

// (Phi(X*AY) Phi(Y*AY)^{-1} Phi(Y*AX))^{p/2} Phi(X*AX)^{-p/2}
ComplexMatrix wielandt_gamma(const WielandtParts& w, double p) {
  return psd_power(w.l, p / 2.0) * matrix_power(w.r, -p / 2.0);
}

}  // namespace

// Two-constant baseline: (m+M)^{2p}/(16 m^p M^p) for p >= 2 and
// (m^2+M^2)^p/(16 m^p M^p) for p >= 4.
Reports check_kantorovich_baseline(const Instance& inst, const CheckParams& params) {
  enforce("kantorovich_baseline", params);
  require_map_on(inst.phi, inst.a.dim());
  require_in_bounds(inst.a, params, "A");
  const ReportContext ctx{params, inst.fingerprint};
  const double m = params.bounds.m(), M = params.bounds.M(), p = params.p;

  const HermitianMatrix lhs = matrix_power(apply(inst.phi, matrix_power(inst.a, -1.0)), p);
  const EigenDecomposition phi_a = eig_hermitian(apply(inst.phi, inst.a));
  Reports out;
  const double c_sum = std::pow(m + M, 2.0 * p) / (16.0 * std::pow(m, p) * std::pow(M, p));
  out.push_back(order_vs("kantorovich_baseline/sum_form", lhs, scaled_power(phi_a, c_sum, -p), ctx));
  if (p >= 4.0) {
    const double c_sq = std::pow(m * m + M * M, p) / (16.0 * std::pow(m, p) * std::pow(M, p));
    out.push_back(
        order_vs("kantorovich_baseline/square_sum_form", lhs, scaled_power(phi_a, c_sq, -p), ctx));
  }
  return out;
}

Reports check_kantorovich_power(const Instance& inst, const CheckParams& params) {
  enforce("kantorovich_power", params);
  require_map_on(inst.phi, inst.a.dim());
  require_in_bounds(inst.a, params, "A");
  const ReportContext ctx{params, inst.fingerprint};
  const double m = params.bounds.m(), M = params.bounds.M();
  const double p = params.p, alpha = params.alpha;
  const std::size_t n_out = inst.phi.out_dim();

  const EigenDecomposition ea = eig_hermitian(inst.a);
  const HermitianMatrix phi_a = apply(inst.phi, inst.a);
  const HermitianMatrix phi_a_inv = apply(inst.phi, matrix_power(ea, -1.0));
  const EigenDecomposition e_phi_a = eig_hermitian(phi_a);
  const EigenDecomposition e_phi_a_inv = eig_hermitian(phi_a_inv);

  Reports out;
  const double c = constants::kantorovich_power(m, M, alpha, p);
  out.push_back(order_vs("kantorovich_power", matrix_power(e_phi_a_inv, p),
                         scaled_power(e_phi_a, c, -p), ctx));

  const ComplexMatrix product = matrix_power(e_phi_a_inv, p / 2.0) * matrix_power(e_phi_a, p / 2.0);
  out.push_back(norm_report("kantorovich_power/product_norm", operator_norm(product),
                            constants::kantorovich_product_norm(m, M, alpha, p), ctx));

  const double ma = std::pow(m, alpha), Ma = std::pow(M, alpha);
  const ScaledPower top = scaled_identity(inst.a.dim(), Ma + ma);
  const ScaledPower top_out = scaled_identity(n_out, Ma + ma);
  out.push_back(order_vs("kantorovich_power/key_bound",
                         Ma * ma * matrix_power(ea, -alpha) + matrix_power(ea, alpha), top, ctx));
  out.push_back(order_vs("kantorovich_power/mapped_bound",
                         Ma * ma * apply(inst.phi, matrix_power(ea, -alpha)) +
                             apply(inst.phi, matrix_power(ea, alpha)),
                         top_out, ctx));
  out.push_back(order_vs("kantorovich_power/power_bound",
                         Ma * ma * matrix_power(e_phi_a_inv, alpha) + matrix_power(e_phi_a, alpha),
                         top_out, ctx));
  return out;
}

Reports check_product_sum(const Instance& inst, const CheckParams& params) {
  enforce("product_sum", params);
  require_map_on(inst.phi, inst.a.dim());
  require_in_bounds(inst.a, params, "A");
  const ReportContext ctx{params, inst.fingerprint};
  const double p = params.p;

  const HermitianMatrix first = matrix_power(apply(inst.phi, matrix_power(inst.a, -1.0)), p);
  const HermitianMatrix second = matrix_power(apply(inst.phi, inst.a), p);
  const HermitianMatrix sum = hermitian_sum(first * second);
  const double c = constants::product_sum(params.bounds.m(), params.bounds.M(), params.alpha, p);
  const ScaledPower bound = scaled_identity(sum.dim(), c);

  Reports out;
  out.push_back(order_vs("product_sum/abs", abs_value(sum.matrix()), bound, ctx));
  out.push_back(order_vs("product_sum/plain", sum, bound, ctx));
  return out;
}

namespace {

struct MeanOperands {
  HermitianMatrix map_of_sigma;   // Phi(A sigma B)
  HermitianMatrix map_of_tau;     // Phi(A tau B)
  HermitianMatrix sigma_of_maps;  // Phi(A) sigma Phi(B)
  HermitianMatrix tau_of_maps;    // Phi(A) tau Phi(B)
};

MeanOperands mean_operands(const Instance& inst, const CheckParams& params) {
  require_map_on(inst.phi, inst.a.dim());
  require_in_bounds(inst.a, params, "A");
  const HermitianMatrix& b = require_b(inst, params);
  const HermitianMatrix phi_a = apply(inst.phi, inst.a);
  const HermitianMatrix phi_b = apply(inst.phi, b);
  return MeanOperands{apply(inst.phi, mean(params.sigma, inst.a, b)),
                      apply(inst.phi, mean(params.tau, inst.a, b)),
                      mean(params.sigma, phi_a, phi_b), mean(params.tau, phi_a, phi_b)};
}

}  // namespace

Reports check_hoa_baseline(const Instance& inst, const CheckParams& params) {
  enforce("hoa_baseline", params);
  const ReportContext ctx{params, inst.fingerprint};
  const MeanOperands ops = mean_operands(inst, params);
  const double k = kantorovich_constant(params.bounds.h());
  const double k2 = k * k;
  const EigenDecomposition map_tau = eig_hermitian(ops.map_of_tau);
  const EigenDecomposition tau_maps = eig_hermitian(ops.tau_of_maps);

  Reports out;
  out.push_back(order_vs("hoa_baseline/map_vs_map", square(ops.map_of_sigma),
                         scaled_power(map_tau, k2, 2.0), ctx));
  out.push_back(order_vs("hoa_baseline/map_vs_mean_of_maps", square(ops.map_of_sigma),
                         scaled_power(tau_maps, k2, 2.0), ctx));
  out.push_back(order_vs("hoa_baseline/mean_of_maps_vs_map", square(ops.sigma_of_maps),
                         scaled_power(map_tau, k2, 2.0), ctx));
  out.push_back(order_vs("hoa_baseline/mean_of_maps_vs_mean_of_maps", square(ops.sigma_of_maps),
                         scaled_power(tau_maps, k2, 2.0), ctx));
  return out;
}

Reports check_mean_power(const Instance& inst, const CheckParams& params) {
  enforce("mean_power", params);
  const ReportContext ctx{params, inst.fingerprint};
  const MeanOperands ops = mean_operands(inst, params);
  const double p = params.p;
  const double c = constants::mean_power(params.bounds.m(), params.bounds.M(), params.alpha, p);
  const EigenDecomposition map_tau = eig_hermitian(ops.map_of_tau);
  const EigenDecomposition tau_maps = eig_hermitian(ops.tau_of_maps);
  const HermitianMatrix lhs_map = matrix_power(ops.map_of_sigma, p);
  const HermitianMatrix lhs_mean = matrix_power(ops.sigma_of_maps, p);

  Reports out;
  out.push_back(order_vs("mean_power/map_vs_map", lhs_map, scaled_power(map_tau, c, p), ctx));
  out.push_back(
      order_vs("mean_power/map_vs_mean_of_maps", lhs_map, scaled_power(tau_maps, c, p), ctx));
  out.push_back(
      order_vs("mean_power/mean_of_maps_vs_map", lhs_mean, scaled_power(map_tau, c, p), ctx));
  out.push_back(order_vs("mean_power/mean_of_maps_vs_mean_of_maps", lhs_mean,
                         scaled_power(tau_maps, c, p), ctx));
  return out;
}

Reports check_bhatia_davis(const Instance& inst, const CheckParams& params) {
  enforce("bhatia_davis", params);
  const ReportContext ctx{params, inst.fingerprint};
  const WielandtParts w = wielandt_parts(inst, params);
  const double factor = constants::wielandt_factor(params.bounds.m(), params.bounds.M());
  return {order_vs("bhatia_davis", w.l, scaled_power(eig_hermitian(w.r), factor, 1.0), ctx)};
}

Reports check_lin_conjecture(const Instance& inst, const CheckParams& params) {
  enforce("lin_conjecture", params);
  const ReportContext ctx{params, inst.fingerprint};
  const WielandtParts w = wielandt_parts(inst, params);
  const double value = operator_norm(w.l * matrix_power(w.r, -1.0));
  return {ratio_report("lin_conjecture", value,
                       constants::wielandt_factor(params.bounds.m(), params.bounds.M()), ctx)};
}

Reports check_gumus(const Instance& inst, const CheckParams& params) {
  enforce("gumus", params);
  const ReportContext ctx{params, inst.fingerprint};
  const WielandtParts w = wielandt_parts(inst, params);
  const double m = params.bounds.m(), M = params.bounds.M();
  const EigenDecomposition er = eig_hermitian(w.r);

  Reports out;
  out.push_back(norm_report("gumus/norm", operator_norm(w.l * matrix_power(er, -1.0)),
                            constants::gumus_norm(m, M), ctx));
  out.push_back(
      order_vs("gumus/squared", square(w.l), scaled_power(er, constants::gumus_squared(m, M), 2.0), ctx));
  return out;
}

Reports check_zhang_wielandt(const Instance& inst, const CheckParams& params) {
  enforce("zhang_wielandt", params);
  const ReportContext ctx{params, inst.fingerprint};
  const WielandtParts w = wielandt_parts(inst, params);
  const double m = params.bounds.m(), M = params.bounds.M(), p = params.p;
  const double value = operator_norm(wielandt_gamma(w, p));

  Reports out;
  if (p >= 2.0) out.push_back(norm_report("zhang_wielandt/first", value, constants::zhang_first(m, M, p), ctx));
  out.push_back(norm_report("zhang_wielandt/second", value, constants::zhang_second(m, M, p), ctx));
  return out;
}

Reports check_wielandt_power(const Instance& inst, const CheckParams& params) {
  enforce("wielandt_power", params);
  const ReportContext ctx{params, inst.fingerprint};
  const WielandtParts w = wielandt_parts(inst, params);
  const double m = params.bounds.m(), M = params.bounds.M(), p = params.p;
  const double value = operator_norm(wielandt_gamma(w, p));

  Reports out;
  out.push_back(
      norm_report("wielandt_power", value, constants::wielandt_power(m, M, params.alpha, p), ctx));
  // The alpha = 1 and alpha = 2 forms, written out independently.
  const double denom = std::pow(2.0, 2.0 + p / 2.0) * std::pow(M, 0.75 * p) * std::pow(m, 0.75 * p);
  if (p >= 2.0) {
    const double bound1 = std::pow(M - m, p) * std::pow(M + m, p / 2.0) / denom;
    out.push_back(norm_report("wielandt_power/alpha1", value, bound1, ctx));
  }
  if (p >= 4.0) {
    const double bound2 =
        std::pow(M - m, p) * std::pow(M * M + m * m, p / 2.0) / (denom * std::pow(M + m, p / 2.0));
    out.push_back(norm_report("wielandt_power/alpha2", value, bound2, ctx));
  }
  return out;
}

Reports check_gamma_symmetrized(const Instance& inst, const CheckParams& params) {
  enforce("gamma_symmetrized", params);
  const ReportContext ctx{params, inst.fingerprint};
  const WielandtParts w = wielandt_parts(inst, params);
  const HermitianMatrix sym = hermitian_sum(wielandt_gamma(w, params.p));
  const double c =
      2.0 * constants::wielandt_power(params.bounds.m(), params.bounds.M(), params.alpha, params.p);
  const ScaledPower bound = scaled_identity(sym.dim(), c);

  Reports out;
  out.push_back(order_vs("gamma_symmetrized/abs", abs_value(sym.matrix()), bound, ctx));
  out.push_back(order_vs("gamma_symmetrized/plain", sym, bound, ctx));
  return out;
}

Reports check_young(const Instance& inst, const CheckParams& params) {
  enforce("young", params);
  require_in_bounds(inst.a, params, "A");
  const HermitianMatrix& b = require_b(inst, params);
  const ReportContext ctx{params, inst.fingerprint};
  const HermitianMatrix arith = arithmetic_mean(inst.a, b, params.v);
  const HermitianMatrix geo = geometric_mean(inst.a, b, params.v);
  const HermitianMatrix harm = harmonic_mean(inst.a, b, params.v);

  Reports out;
  out.push_back(order_vs("young/geometric_le_arithmetic", geo,
                         scaled_power(eig_hermitian(arith), 1.0, 1.0), ctx));
  out.push_back(order_vs("young/harmonic_le_geometric", harm,
                         scaled_power(eig_hermitian(geo), 1.0, 1.0), ctx));
  return out;
}

Reports check_ando(const Instance& inst, const CheckParams& params) {
  enforce("ando", params);
  require_map_on(inst.phi, inst.a.dim());
  require_in_bounds(inst.a, params, "A");
  const HermitianMatrix& b = require_b(inst, params);
  const ReportContext ctx{params, inst.fingerprint};
  const HermitianMatrix lhs = apply(inst.phi, geometric_mean(inst.a, b, params.v));
  const HermitianMatrix rhs =
      geometric_mean(apply(inst.phi, inst.a), apply(inst.phi, b), params.v);
  return {order_vs("ando", lhs, scaled_power(eig_hermitian(rhs), 1.0, 1.0), ctx)};
}

Reports check_squared_young(const Instance& inst, const CheckParams& params) {
  enforce("squared_young", params);
  require_map_on(inst.phi, inst.a.dim());
  require_in_bounds(inst.a, params, "A");
  const HermitianMatrix& b = require_b(inst, params);
  const ReportContext ctx{params, inst.fingerprint};
  const double m = params.bounds.m(), M = params.bounds.M(), v = params.v;
  const double k = kantorovich_constant(params.bounds.h());
  const KrausMap& phi = inst.phi;

  const HermitianMatrix phi_a = apply(phi, inst.a);
  const HermitianMatrix phi_b = apply(phi, b);
  const HermitianMatrix arith = apply(phi, arithmetic_mean(inst.a, b, v));
  const HermitianMatrix geo_matrix = geometric_mean(inst.a, b, v);
  const EigenDecomposition geo = eig_hermitian(apply(phi, geo_matrix));
  const EigenDecomposition geo_maps = eig_hermitian(geometric_mean(phi_a, phi_b, v));
  const EigenDecomposition harm = eig_hermitian(apply(phi, harmonic_mean(inst.a, b, v)));
  const EigenDecomposition harm_maps = eig_hermitian(harmonic_mean(phi_a, phi_b, v));
  const HermitianMatrix arith_sq = square(arith);

  Reports out;
  out.push_back(order_vs("squared_young/map_of_geometric", arith_sq, scaled_power(geo, k * k, 2.0), ctx));
  out.push_back(
      order_vs("squared_young/geometric_of_maps", arith_sq, scaled_power(geo_maps, k * k, 2.0), ctx));
  out.push_back(order_vs("squared_young/map_of_harmonic", arith_sq, scaled_power(harm, k * k, 2.0), ctx));
  out.push_back(
      order_vs("squared_young/harmonic_of_maps", arith_sq, scaled_power(harm_maps, k * k, 2.0), ctx));

  // Intermediate steps of the argument, in the order they are chained.
  const HermitianMatrix geo_inv = matrix_power(geo, -1.0);
  out.push_back(norm_report("squared_young/norm_step", operator_norm(arith * geo_inv), k, ctx));
  const ScaledPower top = scaled_identity(arith.dim(), M + m);
  out.push_back(order_vs("squared_young/sum_step", arith + (M * m) * geo_inv, top, ctx));
  out.push_back(order_vs("squared_young/choi_step",
                         arith + (M * m) * apply(phi, matrix_power(geo_matrix, -1.0)), top, ctx));
  const HermitianMatrix inverse_mix =
      (1.0 - v) * matrix_power(inst.a, -1.0) + v * matrix_power(b, -1.0);
  out.push_back(
      order_vs("squared_young/convex_step", arith + (M * m) * apply(phi, inverse_mix), top, ctx));
  return out;
}

Reports check_reverse_young(const Instance& inst, const CheckParams& params) {
  enforce("reverse_young", params);
  require_in_bounds(inst.a, params, "A");
  const HermitianMatrix& b = require_b(inst, params);
  const ReportContext ctx{params, inst.fingerprint};
  const ScalarConstants sc = ScalarConstants::at(params.bounds.h());
  const HermitianMatrix arith = arithmetic_mean(inst.a, b, params.v);
  const EigenDecomposition geo = eig_hermitian(geometric_mean(inst.a, b, params.v));

  Reports out;
  out.push_back(order_vs("reverse_young/kantorovich", arith,
                         scaled_power(geo, std::pow(sc.kantorovich, params.R()), 1.0), ctx));
  out.push_back(order_vs("reverse_young/specht", arith, scaled_power(geo, sc.specht, 1.0), ctx));
  return out;
}

Reports check_open_conjectures(const Instance& inst, const CheckParams& params) {
  enforce("open_conjectures", params);
  require_map_on(inst.phi, inst.a.dim());
  require_in_bounds(inst.a, params, "A");
  const HermitianMatrix& b = require_b(inst, params);
  const ReportContext ctx{params, inst.fingerprint};
  const ScalarConstants sc = ScalarConstants::at(params.bounds.h());

  // lambda_max(RHS^{-1/2} LHS RHS^{-1/2}) with RHS = c Phi(A#B)^2 equals
  // ||Phi(A nabla B) Phi(A#B)^{-1}||^2 / c.
  const HermitianMatrix arith = apply(inst.phi, arithmetic_mean(inst.a, b, params.v));
  const HermitianMatrix geo_inv =
      matrix_power(apply(inst.phi, geometric_mean(inst.a, b, params.v)), -1.0);
  const double root = operator_norm(arith * geo_inv);
  const double value = root * root;

  Reports out;
  out.push_back(ratio_report("open_conjectures/kantorovich_power_R", value,
                             std::pow(sc.kantorovich, 2.0 * params.R()), ctx));
  out.push_back(ratio_report("open_conjectures/specht_squared", value, sc.specht * sc.specht, ctx));
  return out;
}

}  // namespace oplab
