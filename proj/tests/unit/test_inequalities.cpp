#include <doctest.h>

#include <cmath>

#include "oplab/error.hpp"
#include "oplab/harness.hpp"
#include "oplab/inequalities.hpp"

using namespace oplab;
using doctest::Approx;

namespace {

constexpr double kEq = 1e-10;

const InequalityReport& find(const Reports& rs, std::string_view id) {
  for (const auto& r : rs) {
    if (r.check_id == id) return r;
  }
  FAIL("missing report " << id);
  return rs.front();
}

Instance single(HermitianMatrix a, KrausMap phi, SpectralBounds bounds) {
  return Instance{std::move(a), std::nullopt, std::move(phi), std::nullopt, bounds, {}};
}

Instance pair(HermitianMatrix a, HermitianMatrix b, KrausMap phi, SpectralBounds bounds) {
  return Instance{std::move(a), std::move(b), std::move(phi), std::nullopt, bounds, {}};
}

CheckParams with(SpectralBounds bounds, double alpha = 1.0, double p = 2.0, double v = 0.5) {
  CheckParams c;
  c.bounds = bounds;
  c.alpha = alpha;
  c.p = p;
  c.v = v;
  c.sigma.v = v;
  c.tau.v = v;
  return c;
}

// A = diag(1, 2) against X = (e1 + e2)/sqrt2, Y = (e1 - e2)/sqrt2: the
// Wielandt bound is attained.
Instance saturating() {
  const double s = 1.0 / std::sqrt(2.0);
  return Instance{HermitianMatrix::diagonal({1, 2}), std::nullopt, identity_map(1),
                  IsometryPair(ComplexMatrix{{s}, {s}}, ComplexMatrix{{s}, {-s}}), SpectralBounds(1, 2), {}};
}

// X = e1, Y = e2 with A diagonal: X*AY = 0.
Instance decoupled() {
  return Instance{HermitianMatrix::diagonal({1, 2, 1.5}), std::nullopt, identity_map(1),
                  IsometryPair(ComplexMatrix{{1}, {0}, {0}}, ComplexMatrix{{0}, {1}, {0}}), SpectralBounds(1, 2), {}};
}

const SpectralBounds b12(1, 2);

}  // namespace

TEST_CASE("constants at m = 1, M = 2") {
  CHECK(constants::kantorovich_power(1, 2, 1, 4) == Approx(6561.0 / 256));
  CHECK(constants::kantorovich_power(1, 2, 2, 4) == Approx(625.0 / 256));
  CHECK(constants::product_sum(1, 2, 2, 2) == Approx(3.125));
  CHECK(constants::mean_power(1, 2, 2, 4) == Approx(3.91066074371337890625));
  CHECK(constants::wielandt_factor(1, 2) == Approx(1.0 / 9));
  CHECK(constants::gumus_norm(1, 2) == Approx(0.117851130197757920733));
  CHECK(constants::gumus_squared(1, 2) == Approx(1.0 / 72));
  CHECK(constants::zhang_first(1, 2, 2) == Approx(0.373456790123456790123));
  CHECK(constants::zhang_second(1, 2, 2) == Approx(2.0 / 9));
  CHECK(constants::wielandt_power(1, 2, 1, 2) == Approx(0.132582521472477660825));
  CHECK(constants::kantorovich_power(3, 3, 1.5, 3) == Approx(1.0));
}

TEST_CASE("Kantorovich-type power inequality") {
  SUBCASE("degenerate spectrum at p = 2 alpha") {
    const auto rs = check_kantorovich_power(single(HermitianMatrix::identity(3), identity_map(3), SpectralBounds(1, 1)),
                                            with(SpectralBounds(1, 1), 2.0, 4.0));
    CHECK(std::abs(rs.front().margin) <= kEq);
    for (const auto& r : rs) CHECK(r.passed.value());
  }
  SUBCASE("trace map attains equality") {
    const auto rs = check_kantorovich_power(single(HermitianMatrix::diagonal({1, 2}), normalized_trace_map(2), b12),
                                            with(b12, 1.0, 2.0));
    const auto& r = find(rs, "kantorovich_power");
    CHECK(r.lhs_value == Approx(0.5625));
    CHECK(r.rhs_bound == Approx(0.5625));
    CHECK(std::abs(r.margin) <= kEq);
  }
  SUBCASE("p below 2 alpha is a configuration error") {
    CHECK_THROWS_AS(check_kantorovich_power(single(HermitianMatrix::identity(2), identity_map(2), b12), with(b12, 2.0, 3.0)),
                    ConfigError);
  }
}

TEST_CASE("baseline Kantorovich forms") {
  const auto rs = check_kantorovich_baseline(single(HermitianMatrix::diagonal({1, 2}), normalized_trace_map(2), b12),
                                             with(b12, 1.0, 4.0));
  CHECK(rs.size() == 2);
  for (const auto& r : rs) CHECK(r.passed.value());
}

TEST_CASE("product-sum inequality") {
  SUBCASE("unit instance") {
    const auto rs = check_product_sum(single(HermitianMatrix::identity(2), identity_map(2), SpectralBounds(1, 1)),
                                      with(SpectralBounds(1, 1), 1.0, 1.0));
    const auto& r = find(rs, "product_sum/plain");
    CHECK(r.lhs_value == Approx(2.0));
    CHECK(r.rhs_bound == Approx(2.0));
    CHECK(std::abs(r.margin) <= kEq);
  }
  SUBCASE("trace map at alpha = p = 1") {
    const auto rs = check_product_sum(single(HermitianMatrix::diagonal({1, 2}), normalized_trace_map(2), b12),
                                      with(b12, 1.0, 1.0));
    for (const auto& r : rs) {
      CHECK(r.lhs_value == Approx(2.25));
      CHECK(r.rhs_bound == Approx(2.25));
      CHECK(std::abs(r.margin) <= kEq);
    }
  }
  SUBCASE("commuting diagonals at alpha = p = 2") {
    const auto rs = check_product_sum(single(HermitianMatrix::diagonal({1, 2}), identity_map(2), b12),
                                      with(b12, 2.0, 2.0));
    const auto& r = find(rs, "product_sum/abs");
    CHECK(r.lhs_value == Approx(2.0));
    CHECK(r.rhs_bound == Approx(3.125));
    CHECK(r.passed.value());
  }
}

TEST_CASE("squared mean inequality") {
  CheckParams params = with(b12);
  params.sigma = {MeanKind::arithmetic, 0.5, 0.0};
  params.tau = {MeanKind::harmonic, 0.5, 0.0};
  SUBCASE("arithmetic against harmonic saturates") {
    const auto rs = check_hoa_baseline(
        pair(HermitianMatrix::diagonal({1, 2}), HermitianMatrix::diagonal({2, 1}), identity_map(2), b12), params);
    REQUIRE(rs.size() == 4);
    for (const auto& r : rs) {
      CHECK(r.lhs_value == Approx(2.25));
      CHECK(std::abs(r.margin) <= kEq);
    }
  }
  SUBCASE("arithmetic against itself leaves room") {
    params.tau = params.sigma;
    const auto rs = check_hoa_baseline(
        pair(HermitianMatrix::diagonal({1, 2}), HermitianMatrix::diagonal({2, 1}), identity_map(2), b12), params);
    CHECK(rs.front().margin == Approx((1.125 * 1.125 - 1.0) * 2.25));
  }
  SUBCASE("equal operands with unit spectrum") {
    params.bounds = SpectralBounds(1, 1);
    params.tau = params.sigma;
    const auto rs = check_hoa_baseline(
        pair(HermitianMatrix::identity(2), HermitianMatrix::identity(2), identity_map(2), SpectralBounds(1, 1)), params);
    for (const auto& r : rs) CHECK(std::abs(r.margin) <= kEq);
  }
  SUBCASE("different weights are rejected") {
    params.tau.v = 0.25;
    CHECK_THROWS_AS(check_hoa_baseline(pair(HermitianMatrix::diagonal({1, 2}), HermitianMatrix::diagonal({2, 1}),
                                            identity_map(2), b12),
                                       params),
                    ConfigError);
  }
}

TEST_CASE("power mean inequality") {
  CheckParams params = with(b12, 2.0, 4.0);
  params.sigma = {MeanKind::arithmetic, 0.5, 0.0};
  params.tau = {MeanKind::harmonic, 0.5, 0.0};
  const auto rs = check_mean_power(
      pair(HermitianMatrix::diagonal({1, 2}), HermitianMatrix::diagonal({2, 1}), identity_map(2), b12), params);
  const auto& r = find(rs, "mean_power/map_vs_map");
  CHECK(r.lhs_value == Approx(5.0625));
  CHECK(r.rhs_bound == Approx(12.359619140625));
  CHECK(r.passed.value());

  params.tau = params.sigma;
  const auto same = check_mean_power(
      pair(HermitianMatrix::diagonal({1, 2}), HermitianMatrix::diagonal({1, 2}), identity_map(2), b12), params);
  CHECK(find(same, "mean_power/map_vs_map").ratio == Approx(0.25571126352690138698));

  CHECK_THROWS_AS(check_mean_power(pair(HermitianMatrix::diagonal({1, 2}), HermitianMatrix::diagonal({2, 1}),
                                        identity_map(2), b12),
                                   with(b12, 1.0, 4.0)),
                  ConfigError);
}

TEST_CASE("Wielandt family on the saturating instance") {
  const Instance inst = saturating();
  const CheckParams params = with(b12, 1.0, 2.0);

  const auto& bd = check_bhatia_davis(inst, params).front();
  CHECK(bd.lhs_value == Approx(1.0 / 6));
  CHECK(bd.rhs_bound == Approx(1.0 / 6));
  CHECK(std::abs(bd.margin) <= kEq);

  const auto& lin = check_lin_conjecture(inst, params).front();
  CHECK(lin.ratio == Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(lin.passed.has_value());

  const auto gumus = check_gumus(inst, params);
  const auto& gn = find(gumus, "gumus/norm");
  CHECK(gn.lhs_value == Approx(1.0 / 9));
  CHECK(gn.rhs_bound == Approx(0.117851130197757920733));
  CHECK(gn.passed.value());
  const auto& gs = find(gumus, "gumus/squared");
  CHECK(gs.lhs_value == Approx(1.0 / 36));
  CHECK(gs.passed.value());

  const auto zhang = check_zhang_wielandt(inst, params);
  CHECK(find(zhang, "zhang_wielandt/first").rhs_bound == Approx(0.373456790123456790123));
  CHECK(find(zhang, "zhang_wielandt/second").rhs_bound == Approx(2.0 / 9));
  for (const auto& r : zhang) CHECK(r.lhs_value == Approx(1.0 / 9));

  const auto& wp = find(check_wielandt_power(inst, params), "wielandt_power");
  CHECK(wp.lhs_value == Approx(1.0 / 9));
  CHECK(wp.rhs_bound == Approx(0.132582521472477660825));
  CHECK(wp.passed.value());

  const auto gamma = check_gamma_symmetrized(inst, params);
  const auto& gp = find(gamma, "gamma_symmetrized/plain");
  CHECK(gp.lhs_value == Approx(2.0 / 9));
  CHECK(gp.rhs_bound == Approx(0.265165042944955321650));
}

TEST_CASE("Wielandt family on a decoupled instance") {
  const Instance inst = decoupled();
  const CheckParams params = with(b12, 1.0, 3.0);
  CHECK(check_bhatia_davis(inst, params).front().lhs_value == Approx(0.0));
  CHECK(check_lin_conjecture(inst, params).front().ratio == Approx(0.0));
  const auto& gn = find(check_gumus(inst, params), "gumus/norm");
  CHECK(gn.margin == Approx(gn.rhs_bound));
  for (const auto& r : check_zhang_wielandt(inst, params)) CHECK(r.lhs_value == Approx(0.0));
  CHECK(find(check_wielandt_power(inst, params), "wielandt_power").lhs_value == Approx(0.0));
  for (const auto& r : check_gamma_symmetrized(inst, params)) CHECK(r.lhs_value == Approx(0.0));
}

TEST_CASE("a small rotation away from saturation gives a strict margin") {
  const double t = 0.1;
  const double c0 = std::cos(t), s0 = std::sin(t);
  const ComplexMatrix x{{c0}, {s0}}, y{{-s0}, {c0}};
  const Instance inst{HermitianMatrix::diagonal({1, 2}), std::nullopt, identity_map(1), IsometryPair(x, y), b12, {}};
  const auto& r = check_bhatia_davis(inst, with(b12)).front();
  CHECK(r.margin > 1e-3);
}

TEST_CASE("isometry pairs are validated") {
  CHECK_THROWS_AS(IsometryPair(ComplexMatrix{{1}, {0}}, ComplexMatrix{{1}, {0}}), DomainError);
  CHECK_THROWS_AS(IsometryPair(ComplexMatrix{{2}, {0}}, ComplexMatrix{{0}, {1}}), DomainError);
  CHECK_THROWS_AS(IsometryPair(ComplexMatrix{{1, 0}, {0, 1}}, ComplexMatrix{{0, 0}, {0, 0}}), DomainError);
}

TEST_CASE("Young and Ando") {
  SUBCASE("Ando with the identity map is an equality") {
    const auto& r = check_ando(pair(HermitianMatrix{{2, 1}, {1, 3}}, HermitianMatrix::diagonal({1, 4}), identity_map(2),
                                    SpectralBounds(1, 4)),
                               with(SpectralBounds(1, 4), 1.0, 2.0, 0.3))
                        .front();
    CHECK(std::abs(r.margin) <= kEq);
  }
  SUBCASE("Ando with the trace map") {
    const auto& r = check_ando(pair(HermitianMatrix::diagonal({1, 4}), HermitianMatrix::diagonal({4, 1}),
                                    normalized_trace_map(2), SpectralBounds(1, 4)),
                               with(SpectralBounds(1, 4)))
                        .front();
    CHECK(r.lhs_value == Approx(2.0));
    CHECK(r.rhs_bound == Approx(2.5));
    CHECK(r.margin == Approx(0.5));
  }
  SUBCASE("Ando at v = 0") {
    const auto& r = check_ando(pair(HermitianMatrix::diagonal({1, 4}), HermitianMatrix::diagonal({4, 1}),
                                    normalized_trace_map(2), SpectralBounds(1, 4)),
                               with(SpectralBounds(1, 4), 1.0, 2.0, 0.0))
                        .front();
    CHECK(std::abs(r.margin) <= kEq);
  }
  SUBCASE("weighted Young") {
    for (const auto& r : check_young(pair(HermitianMatrix::diagonal({1, 4}), HermitianMatrix{{2, 1}, {1, 2}},
                                          identity_map(2), SpectralBounds(1, 4)),
                                     with(SpectralBounds(1, 4), 1.0, 2.0, 0.7))) {
      CHECK(r.passed.value());
    }
  }
}

TEST_CASE("squared and reverse Young") {
  SUBCASE("unit instance") {
    const auto rs = check_squared_young(
        pair(HermitianMatrix::identity(2), HermitianMatrix::identity(2), identity_map(2), SpectralBounds(1, 1)),
        with(SpectralBounds(1, 1)));
    CHECK(std::abs(find(rs, "squared_young/map_of_geometric").margin) <= kEq);
  }
  SUBCASE("m = 1, M = 2") {
    const auto rs = check_squared_young(
        pair(HermitianMatrix::diagonal({1, 2}), HermitianMatrix::diagonal({2, 1}), identity_map(2), b12), with(b12));
    const auto& r = find(rs, "squared_young/map_of_geometric");
    CHECK(r.lhs_value == Approx(2.25));
    CHECK(r.rhs_bound == Approx(2.53125));
    for (const auto& x : rs) CHECK(x.passed.value());
  }
  SUBCASE("reverse Young on the scalar slice") {
    const auto rs = check_reverse_young(
        pair(HermitianMatrix::diagonal({1}), HermitianMatrix::diagonal({2}), identity_map(1), b12), with(b12));
    const auto& k = find(rs, "reverse_young/kantorovich");
    CHECK(k.lhs_value == Approx(1.5));
    CHECK(k.rhs_bound == Approx(1.5));
    CHECK(std::abs(k.margin) <= kEq);
    const auto& s = find(rs, "reverse_young/specht");
    CHECK(s.rhs_bound == Approx(1.50115331812388536806));
    CHECK(s.passed.value());
  }
  SUBCASE("reverse Young at v = 0") {
    for (const auto& r : check_reverse_young(pair(HermitianMatrix::diagonal({1, 2}), HermitianMatrix::diagonal({2, 1}),
                                                  identity_map(2), b12),
                                             with(b12, 1.0, 2.0, 0.0))) {
      CHECK(r.passed.value());
    }
  }
}

TEST_CASE("open conjecture ratios") {
  const auto rs = check_open_conjectures(
      pair(HermitianMatrix::diagonal({1}), HermitianMatrix::diagonal({2}), identity_map(1), b12), with(b12));
  CHECK(find(rs, "open_conjectures/kantorovich_power_R").ratio == Approx(1.0).epsilon(1e-12));
  for (const auto& r : rs) CHECK_FALSE(r.passed.has_value());

  const HermitianMatrix a{{3, 1}, {1, 2}};
  for (double v : {0.2, 0.5, 0.9}) {
    for (const auto& r : check_open_conjectures(pair(a, a, identity_map(2), SpectralBounds(1, 4)),
                                                with(SpectralBounds(1, 4), 1.0, 2.0, v))) {
      CHECK(r.ratio <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("lemmas on random operands") {
  for (std::size_t i = 0; i < 30; ++i) {
    RngStream rng(derive_seed(31, "lemmas", {i}));
    const std::size_t n = 1 + rng.index(5);
    const SpectralBounds bounds(0.5, 0.5 * rng.log_uniform(1.0, 50.0));
    const auto a = random_hermitian_with_spectrum(n, bounds, rng);
    const auto b = random_hermitian_with_spectrum(n, bounds, rng);
    CHECK(check_norm_product_lemma(a, b).passed.value());
    CHECK(check_norm_power_lemma(a, b, 1.5).passed.value());
    for (const auto& r : check_abs_block_lemma(random_gaussian(n, n, rng))) CHECK(r.passed.value());
    CHECK(check_key_bound(a, bounds, rng.uniform(1.0, 2.0)).passed.value());
    const KrausMap phi = random_unital_cp_map(n, 2, rng);
    CHECK(check_choi_inequality(phi, a).passed.value());
    CHECK(check_map_power_inequality(phi, a, rng.uniform(1.0, 2.0)).passed.value());
  }
}

TEST_CASE("parameter constraints") {
  const Instance inst = single(HermitianMatrix::diagonal({1, 2}), identity_map(2), b12);
  CheckParams bad_tol = with(b12);
  bad_tol.tol.abs = -1.0;
  CHECK_THROWS_AS(check_kantorovich_baseline(inst, bad_tol), ConfigError);
  CHECK_THROWS_AS(check_kantorovich_power(inst, with(b12, 2.5, 6.0)), ConfigError);
  CHECK_THROWS_AS(check_product_sum(inst, with(b12, 1.5, 1.0)), ConfigError);
  CHECK_THROWS_AS(check_kantorovich_baseline(inst, with(b12, 1.0, 1.0)), ConfigError);
  CHECK_THROWS_AS(check_ando(inst, with(b12)), ConfigError);
  CHECK_THROWS_AS(check_bhatia_davis(inst, with(b12)), ConfigError);
  CHECK_THROWS_AS(check_kantorovich_power(single(HermitianMatrix::diagonal({1, 3}), identity_map(2), b12), with(b12)),
                  DomainError);
  CHECK_THROWS_AS(find_check("no_such_check"), ConfigError);
}

TEST_CASE("registry") {
  CHECK(all_checks().size() == 16);
  const auto& kp = find_check("kantorovich_power");
  CHECK(min_p(kp, 1.5) == Approx(3.0));
  CHECK(min_p(find_check("zhang_wielandt"), 2.0) == Approx(1.0));
  CHECK(find_check("lin_conjecture").report_only);
  CHECK(find_check("open_conjectures").report_only);
  CheckParams p = with(b12, 1.5, 2.0);
  CHECK(constraint_violation(kp, p).has_value());
  p.p = 3.0;
  CHECK_FALSE(constraint_violation(kp, p).has_value());
  CHECK(constraint_violation(find_check("mean_power"), with(b12, 1.0, 4.0)).has_value());
}

TEST_CASE("every check holds on random instances") {
  for (const auto& info : all_checks()) {
    CAPTURE(info.id);
    TrialConfig cfg;
    cfg.check_id = std::string(info.id);
    cfg.dims = {1, 2, 3, 4};
    cfg.k_values = {1, 2};
    cfg.trials = 25;
    cfg.p_values = {AxisValue::parse("random")};
    cfg.alpha_values = {AxisValue::parse(info.id == "mean_power" ? "2" : "random")};
    cfg.v_values = {AxisValue::parse("random")};
    cfg.mean_pairs = {MeanPair::parse("random")};
    cfg.master_seed = 99;
    const ReportEnvelope env = run_trials(cfg);
    CHECK(env.errors.empty());
    CHECK(env.ok);
    CHECK(env.aggregate.min_relative_margin >= -1e-8);
  }
}

TEST_CASE("norm form of the Wielandt bound fails for two-dimensional isometries") {
  // X = [e1 e2], Y = [e3 e4]. The order form holds while the norm of the
  // non-normal product exceeds the factor; 40-digit reference ratio.
  const HermitianMatrix a{{1, 1, -1, 1}, {1, 6, -1, 2}, {-1, -1, 5, 0}, {1, 2, 0, 2}};
  const ComplexMatrix x{{1, 0}, {0, 1}, {0, 0}, {0, 0}};
  const ComplexMatrix y{{0, 0}, {0, 0}, {1, 0}, {0, 1}};
  const auto e = eig_hermitian(a);
  const SpectralBounds tight(e.min(), e.max());
  const Instance inst{a, std::nullopt, identity_map(2), IsometryPair(x, y), tight, {}};
  const CheckParams params = with(tight);
  CHECK(e.min() == Approx(0.2038846986211740055926));
  CHECK(e.max() == Approx(7.600961471721727043038));
  CHECK(check_lin_conjecture(inst, params).front().ratio == Approx(1.321826020566487043525).epsilon(1e-10));
  CHECK(check_bhatia_davis(inst, params).front().passed.value());
}
