#include <doctest.h>

#include <cmath>

#include "oplab/error.hpp"
#include "oplab/harness.hpp"

using namespace oplab;
using doctest::Approx;

namespace {

double dist(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).frobenius_norm(); }

TrialConfig small_config(const std::string& id) {
  TrialConfig cfg;
  cfg.check_id = id;
  cfg.dims = {2, 3, 4};
  cfg.k_values = {1, 2};
  cfg.trials = 12;
  cfg.p_values = {AxisValue::parse("min"), AxisValue::parse("random")};
  cfg.alpha_values = {AxisValue::parse("1"), AxisValue::parse("2")};
  cfg.v_values = {AxisValue::parse("random")};
  cfg.mean_pairs = {MeanPair::parse("random")};
  cfg.master_seed = 4242;
  return cfg;
}

}  // namespace

TEST_CASE("random streams") {
  SUBCASE("engine matches the standard reference") {
    RngStream rng(5489);
    for (int i = 0; i < 9999; ++i) (void)rng.bits();
    CHECK(rng.bits() == 9981545732273789042ULL);
  }
  SUBCASE("uniform takes the top 53 bits") {
    RngStream a(5489);
    CHECK(a.uniform() == static_cast<double>(14514284786278117030ULL >> 11) * 0x1.0p-53);
  }
  SUBCASE("same seed, same draws") {
    RngStream a(77), b(77);
    for (int i = 0; i < 100; ++i) {
      CHECK(a.normal() == b.normal());
      CHECK(a.index(7) == b.index(7));
    }
  }
  SUBCASE("draw ranges") {
    RngStream rng(8);
    for (int i = 0; i < 1000; ++i) {
      const double u = rng.log_uniform(0.5, 4.0);
      CHECK((u >= 0.5 && u <= 4.0));
      CHECK(rng.index(3) < 3);
    }
  }
  SUBCASE("normal moments") {
    RngStream rng(9);
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double x = rng.normal();
      s += x;
      s2 += x * x;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(s2 / n - 1.0) < 0.01);
  }
  SUBCASE("derived seeds separate names and indices") {
    CHECK(derive_seed(1, "a", {0}) != derive_seed(1, "b", {0}));
    CHECK(derive_seed(1, "a", {0, 1}) != derive_seed(1, "a", {1, 0}));
    CHECK(derive_seed(1, "a", {3}) == derive_seed(1, "a", {3}));
    CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
  }
}

TEST_CASE("spectrum-pinned generator") {
  SUBCASE("n = 1 gives [m]") {
    RngStream rng(1);
    const auto a = random_hermitian_with_spectrum(1, SpectralBounds(1.5, 4.0), rng);
    CHECK(a(0, 0).real() == 1.5);
  }
  SUBCASE("n = 2 hits both ends") {
    RngStream rng(2);
    const auto e = eig_hermitian(random_hermitian_with_spectrum(2, SpectralBounds(1, 2), rng));
    CHECK(e.min() == Approx(1.0).epsilon(1e-14));
    CHECK(e.max() == Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("larger n stays inside and pins the ends") {
    for (std::size_t i = 0; i < 20; ++i) {
      RngStream rng(derive_seed(3, "pin", {i}));
      const std::size_t n = 2 + rng.index(8);
      const SpectralBounds b(0.3, 0.3 * rng.log_uniform(1.0, 100.0));
      const auto e = eig_hermitian(random_hermitian_with_spectrum(n, b, rng));
      CHECK(e.min() == Approx(b.m()).epsilon(1e-12));
      CHECK(e.max() == Approx(b.M()).epsilon(1e-12));
    }
  }
  SUBCASE("same seed twice") {
    RngStream a(5), b(5);
    CHECK(random_hermitian_with_spectrum(4, SpectralBounds(1, 3), a) ==
          random_hermitian_with_spectrum(4, SpectralBounds(1, 3), b));
  }
}

TEST_CASE("isometry pairs and unitaries") {
  for (std::size_t i = 0; i < 20; ++i) {
    RngStream rng(derive_seed(4, "iso", {i}));
    const std::size_t k = 1 + rng.index(3), n = 2 * k + rng.index(3);
    const IsometryPair p = random_isometry_pair(n, k, rng);
    const ComplexMatrix id = ComplexMatrix::identity(k);
    CHECK(dist(p.x().adjoint() * p.x(), id) <= 1e-12);
    CHECK(dist(p.y().adjoint() * p.y(), id) <= 1e-12);
    CHECK((p.x().adjoint() * p.y()).frobenius_norm() <= 1e-12);
    const ComplexMatrix u = random_unitary(n, rng);
    CHECK(dist(u.adjoint() * u, ComplexMatrix::identity(n)) <= 1e-12);
  }
  RngStream rng(6);
  CHECK_THROWS_AS(random_isometry_pair(3, 2, rng), DomainError);
  const ComplexMatrix e = unitary_exp(HermitianMatrix::diagonal({0.0, M_PI}));
  CHECK(dist(e, ComplexMatrix{{1, 0}, {0, -1}}) <= 1e-14);
}

TEST_CASE("axis and mean pair parsing") {
  CHECK(AxisValue::parse("min").kind == AxisValue::Kind::min_offset);
  CHECK(AxisValue::parse("min+1.5").value == 1.5);
  CHECK(AxisValue::parse("random").kind == AxisValue::Kind::random);
  CHECK(AxisValue::parse("3").value == 3.0);
  CHECK_THROWS_AS(AxisValue::parse("lots"), ConfigError);
  const MeanPair mp = MeanPair::parse("blend:0.3/geometric");
  CHECK(mp.sigma == MeanKind::blend);
  CHECK(mp.sigma_t == 0.3);
  CHECK(mp.tau == MeanKind::geometric);
  CHECK(MeanPair::parse(mp.to_string()).to_string() == mp.to_string());
  CHECK(MeanPair::parse("random").random);
  CHECK_THROWS_AS(MeanPair::parse("arithmetic"), ConfigError);
  CHECK(parse_map_family("trace") == MapFamily::trace);
  CHECK_THROWS_AS(parse_map_family("transpose"), ConfigError);
}

TEST_CASE("grid construction") {
  SUBCASE("unused axes collapse") {
    TrialConfig cfg = small_config("ando");
    const Grid g = build_grid(cfg);
    CHECK(g.points.size() == 1);
    CHECK(g.skipped.empty());
  }
  SUBCASE("infeasible fixed points are skipped") {
    TrialConfig cfg = small_config("kantorovich_power");
    cfg.p_values = {AxisValue::fixed_at(3.0)};
    const Grid g = build_grid(cfg);
    CHECK(g.points.size() == 1);
    REQUIRE(g.skipped.size() == 1);
    CHECK(g.skipped.front().reason.find("p") != std::string::npos);
  }
  SUBCASE("bad configuration") {
    TrialConfig cfg = small_config("nope");
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config("ando");
    cfg.trials = 0;
    CHECK_THROWS_AS(run_trials(cfg), ConfigError);
    cfg = small_config("ando");
    cfg.dims = {0};
    CHECK_THROWS_AS(run_trials(cfg), ConfigError);
  }
}

TEST_CASE("trials are reproducible") {
  const TrialConfig cfg = small_config("wielandt_power");
  const ReportEnvelope a = run_trials(cfg);
  const ReportEnvelope b = run_trials(cfg);
  CHECK(canonical_dump(a) == canonical_dump(b));
  CHECK(a.ok);

  TrialConfig threaded = cfg;
  threaded.threads = 3;
  const ReportEnvelope c = run_trials(threaded);
  auto ja = to_json(a), jc = to_json(c);
  for (auto* j : {&ja, &jc}) {
    j->erase("timing");
    j->erase("timestamp");
    j->at("grid").erase("threads");
  }
  CHECK(ja.dump() == jc.dump());

  TrialConfig other = cfg;
  other.master_seed += 1;
  CHECK(canonical_dump(run_trials(other)) != canonical_dump(a));
}

TEST_CASE("regenerating a trial from its fingerprint") {
  const TrialConfig cfg = small_config("gamma_symmetrized");
  const Grid g = build_grid(cfg);
  REQUIRE_FALSE(g.points.empty());
  const Trial t = make_trial(cfg, g.points.back(), 5);
  const Trial r = regenerate(cfg, t.instance.fingerprint);
  CHECK(r.instance.a == t.instance.a);
  CHECK(r.instance.iso->x() == t.instance.iso->x());
  CHECK(r.params.p == t.params.p);
  CHECK(r.params.alpha == t.params.alpha);
  const auto r1 = find_check(cfg.check_id).run(t.instance, t.params);
  const auto r2 = find_check(cfg.check_id).run(r.instance, r.params);
  REQUIRE(r1.size() == r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i].margin == r2[i].margin);
}

TEST_CASE("JSON round trips") {
  RngStream rng(12);
  const ComplexMatrix x = random_gaussian(3, 2, rng);
  CHECK(complex_matrix_from_json(to_json(x)) == x);
  const HermitianMatrix h = random_hermitian(3, rng);
  CHECK(hermitian_from_json(to_json(h)) == h);
  const KrausMap phi = random_unital_cp_map(3, 2, rng);
  const KrausMap back = kraus_map_from_json(to_json(phi));
  REQUIRE(back.kraus_ops().size() == 2);
  CHECK(back.kraus_ops()[1] == phi.kraus_ops()[1]);
  const MeanSpec s{MeanKind::blend, 0.3, 0.7};
  CHECK(mean_spec_from_json(to_json(s)) == s);
  const InstanceFingerprint fp{123, 4, 5, 6, 2};
  const auto fp2 = fingerprint_from_json(to_json(fp));
  CHECK(fp2.seed == 123);
  CHECK(fp2.grid_index == 4);
  CHECK(fp2.k == 2);

  const TrialConfig cfg = small_config("mean_power");
  const TrialConfig cfg2 = trial_config_from_json(to_json(cfg));
  CHECK(to_json(cfg2).dump() == to_json(cfg).dump());
  CHECK_THROWS_AS(trial_config_from_json(nlohmann::json{{"check", 3}}), ConfigError);
  CHECK_THROWS_AS(complex_matrix_from_json(nlohmann::json::parse(R"({"dim": 2, "entries": [[1, 0]]})")), ConfigError);
}

TEST_CASE("report serialization") {
  const ReportEnvelope env = run_trials(small_config("lin_conjecture"));
  const auto j = to_json(env);
  CHECK(j.at("kind") == "trials");
  CHECK(j.contains("timestamp"));
  REQUIRE(!j.at("reports").empty());
  CHECK(j.at("reports").front().at("passed").is_null());
  CHECK(j.at("reports").front().contains("instance_fingerprint"));
  const auto canon = nlohmann::json::parse(canonical_dump(env));
  CHECK_FALSE(canon.contains("timestamp"));
  CHECK_FALSE(canon.contains("timing"));
}

TEST_CASE("counterexample search") {
  SearchConfig cfg;
  cfg.conjecture_id = "young_KR";
  cfg.budget = 400;
  cfg.restarts = 4;
  cfg.master_seed = 5;
  const ReportEnvelope a = search_counterexample(cfg);
  const ReportEnvelope b = search_counterexample(cfg);
  CHECK(canonical_dump(a) == canonical_dump(b));
  const double best = a.body.at("best_ratio").get<double>();
  CHECK(best > 0.0);
  CHECK(best <= 1.0 + 1e-9);

  SUBCASE("saved state replays to the same ratio") {
    const SearchState s = search_state_from_json(a.body.at("best_state"));
    CHECK(conjecture_ratio(s) == best);
  }
  SUBCASE("a restart is reproducible on its own") {
    const RestartResult r1 = run_restart(cfg, 2), r2 = run_restart(cfg, 2);
    CHECK(r1.best_ratio == r2.best_ratio);
    CHECK(r1.best_step == r2.best_step);
  }
  SUBCASE("configuration errors") {
    SearchConfig bad = cfg;
    bad.conjecture_id = "riemann";
    CHECK_THROWS_AS(search_counterexample(bad), ConfigError);
    bad = cfg;
    bad.budget = 2;
    CHECK_THROWS_AS(search_counterexample(bad), ConfigError);
  }
}

TEST_CASE("lin conjecture search keeps the spectrum range") {
  SearchConfig cfg;
  cfg.conjecture_id = "lin_3_1";
  cfg.budget = 300;
  cfg.restarts = 3;
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    const RestartResult res = run_restart(cfg, r);
    const auto& e = res.best.eig_a;
    CHECK(*std::min_element(e.begin(), e.end()) == res.best.lo);
    CHECK(*std::max_element(e.begin(), e.end()) == res.best.hi);
    CHECK(std::isfinite(res.best_ratio));
  }
}

TEST_CASE("search restarts cover every admissible shape") {
  SearchConfig cfg;
  cfg.conjecture_id = "lin_3_1";
  cfg.dims = {2, 3, 4};
  cfg.max_k = 2;
  cfg.restarts = 4;
  cfg.budget = 40;
  std::vector<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    const SearchState& s = run_restart(cfg, r).best;
    seen.emplace_back(s.eig_a.size(), s.iso_frame.cols() / 2);
  }
  const std::vector<std::pair<std::size_t, std::size_t>> want{{2, 1}, {3, 1}, {4, 1}, {4, 2}};
  CHECK(seen == want);
}
