#include <algorithm>
#include <cmath>
#include <sstream>

#include "oplab/error.hpp"
#include "oplab/harness.hpp"
#include "oplab/means.hpp"
#include "timing.hpp"

namespace oplab {

using nlohmann::json;

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Smallest margin / scale seen by one family of instances.
struct MarginTally {
  std::size_t count = 0;
  std::size_t below = 0;
  double min_relative = 0.0;

  void add(const InequalityReport& r, double floor) {
    const double rel = r.margin / r.scale;
    if (count == 0 || rel < min_relative) min_relative = rel;
    ++count;
    if (r.margin < floor * r.scale) ++below;
  }
  json to_json() const { return {{"instances", count}, {"violations", below}, {"min_relative_margin", min_relative}}; }
};

// --- 1 ----------------------------------------------------------------------

CriterionResult kernel_accuracy(const SelftestOptions& opts) {
  CriterionResult c{1, "kernel accuracy", false, "", 0.0, json::object()};
  const std::size_t count = opts.quick ? 100 : 1000;
  double worst_recon = 0.0, worst_unitary = 0.0;
  bool sorted = true;
  for (std::size_t i = 0; i < count; ++i) {
    RngStream rng(derive_seed(opts.seed, "kernel", {i}));
    const std::size_t n = 2 + rng.index(15);
    HermitianMatrix a = random_hermitian(n, rng);
    a *= rng.log_uniform(1e-3, 1e3);
    const EigenDecomposition e = eig_hermitian(a);
    const double scale = std::max(1.0, a.matrix().frobenius_norm());
    const HermitianMatrix back = hermitian_from_spectrum(e.eigenvectors, e.eigenvalues);
    worst_recon = std::max(worst_recon, (back - a).matrix().frobenius_norm() / scale);
    const double unit = (gram(e.eigenvectors).matrix() - ComplexMatrix::identity(n)).frobenius_norm();
    worst_unitary = std::max(worst_unitary, unit / static_cast<double>(n));
    sorted = sorted && std::is_sorted(e.eigenvalues.begin(), e.eigenvalues.end());
  }
  c.passed = worst_recon <= 1e-10 && worst_unitary <= 1e-10 && sorted;
  c.data = {{"matrices", count},
            {"max_reconstruction_residual", worst_recon},
            {"max_unitarity_residual", worst_unitary},
            {"eigenvalues_sorted", sorted},
            {"kernels", simd::active_kernels().name}};
  c.detail = "reconstruction " + fmt(worst_recon) + ", unitarity " + fmt(worst_unitary) + " (limit 1e-10)";
  return c;
}

// --- 2 ----------------------------------------------------------------------

CriterionResult lemma_suite(const SelftestOptions& opts) {
  CriterionResult c{2, "lemma suite", false, "", 0.0, json::object()};
  const std::size_t count = opts.quick ? 50 : 500;
  constexpr double floor = -1e-9;
  MarginTally product, abs_bound, block, key, choi, map_power;
  std::vector<MarginTally> power(4);
  constexpr double rs[] = {1.0, 1.5, 2.0, 3.0};

  for (std::size_t i = 0; i < count; ++i) {
    RngStream rng(derive_seed(opts.seed, "lemmas", {i}));
    const std::size_t n = 1 + rng.index(6);
    const HermitianMatrix a = random_psd(n, rng);
    const HermitianMatrix b = random_psd(n, rng);
    product.add(check_norm_product_lemma(a, b), floor);
    for (std::size_t r = 0; r < 4; ++r) power[r].add(check_norm_power_lemma(a, b, rs[r]), floor);

    ComplexMatrix x = random_gaussian(n, n, rng);
    x *= rng.log_uniform(0.1, 10.0);
    const Reports ab = check_abs_block_lemma(x);
    abs_bound.add(ab[0], floor);
    block.add(ab[1], floor);

    const double m = rng.log_uniform(0.25, 4.0);
    const SpectralBounds bounds(m, m * rng.log_uniform(1.0, 100.0));
    const HermitianMatrix t = random_hermitian_with_spectrum(n, bounds, rng, rng.bernoulli(0.75));
    const double alpha = rng.uniform(1.0, 2.0);
    key.add(check_key_bound(t, bounds, alpha), floor);

    const std::size_t out = 1 + rng.index(n);
    const KrausMap phi = random_unital_cp_map(n, 1 + rng.index(3), rng, out);
    choi.add(check_choi_inequality(phi, t), floor);
    map_power.add(check_map_power_inequality(phi, t, rng.uniform(1.0, 2.0)), floor);
  }

  json power_json = json::object();
  bool ok = product.below == 0 && abs_bound.below == 0 && block.below == 0 && key.below == 0 &&
            choi.below == 0 && map_power.below == 0;
  for (std::size_t r = 0; r < 4; ++r) {
    power_json[fmt(rs[r])] = power[r].to_json();
    ok = ok && power[r].below == 0;
  }
  c.passed = ok;
  c.data = {{"norm_product", product.to_json()}, {"norm_power", power_json},
            {"abs_bound", abs_bound.to_json()},   {"block_positive", block.to_json()},
            {"key_bound", key.to_json()},         {"choi", choi.to_json()},
            {"map_power", map_power.to_json()},   {"margin_floor", "-1e-9 * scale"}};
  double worst = std::min({product.min_relative, abs_bound.min_relative, block.min_relative,
                           key.min_relative, choi.min_relative, map_power.min_relative});
  for (const auto& p : power) worst = std::min(worst, p.min_relative);
  c.detail = std::to_string(count) + " instances per lemma, min relative margin " + fmt(worst);
  return c;
}

// --- 3 ----------------------------------------------------------------------

TrialConfig inequality_config(const std::string& id, const SelftestOptions& opts) {
  TrialConfig cfg;
  cfg.check_id = id;
  cfg.dims = {1, 2, 3, 4, 5, 6};
  cfg.k_values = {1, 2};
  cfg.h_lo = 1.0;
  cfg.h_hi = 100.0;
  cfg.trials = opts.quick ? 60 : 1000;
  cfg.master_seed = derive_seed(opts.seed, "inequalities");
  cfg.keep_reports = false;
  auto axis = [](std::initializer_list<const char*> xs) {
    std::vector<AxisValue> out;
    for (const char* x : xs) out.push_back(AxisValue::parse(x));
    return out;
  };
  cfg.v_values = axis({"random"});
  cfg.mean_pairs = {MeanPair::parse("random"), MeanPair::parse("arithmetic/harmonic")};
  if (id == "kantorovich_baseline") {
    cfg.p_values = axis({"min", "4", "random"});
  } else if (id == "kantorovich_power") {
    cfg.alpha_values = axis({"1", "1.5", "2"});
    cfg.p_values = axis({"min", "min+1", "8"});
  } else if (id == "product_sum") {
    cfg.alpha_values = axis({"1", "1.5", "2"});
    cfg.p_values = axis({"min", "random"});
  } else if (id == "mean_power") {
    cfg.alpha_values = axis({"1.5", "2", "random"});
    cfg.p_values = axis({"min", "random"});
  } else if (id == "zhang_wielandt") {
    cfg.p_values = axis({"1", "2", "random"});
  } else if (id == "wielandt_power" || id == "gamma_symmetrized") {
    cfg.alpha_values = axis({"1", "1.5", "2"});
    cfg.p_values = axis({"min", "random"});
  }
  return cfg;
}

CriterionResult inequality_suite(const SelftestOptions& opts) {
  CriterionResult c{3, "inequality suite", false, "", 0.0, json::object()};
  static const char* ids[] = {"kantorovich_baseline", "hoa_baseline",  "kantorovich_power",
                              "product_sum",          "mean_power",    "bhatia_davis",
                              "gumus",                "zhang_wielandt", "wielandt_power",
                              "gamma_symmetrized",    "young",         "ando",
                              "squared_young",        "reverse_young"};
  bool ok = true;
  double worst = 0.0;
  std::string worst_id;
  json per_check = json::object();
  for (const char* id : ids) {
    const ReportEnvelope env = run_trials(inequality_config(id, opts));
    const Aggregate& agg = env.aggregate;
    const bool check_ok = env.errors.empty() && env.skipped.empty() && agg.verdicts > 0 &&
                          agg.min_relative_margin >= -1e-8;
    ok = ok && check_ok;
    if (worst_id.empty() || agg.min_relative_margin < worst) {
      worst = agg.min_relative_margin;
      worst_id = id;
    }
    json entry{{"ok", check_ok},
               {"grid_points", env.body.at("grid_points")},
               {"trials_per_point", env.body.at("trials_per_point")},
               {"aggregate", to_json(agg)},
               {"errors", env.errors}};
    json subs = json::object();
    for (const auto& [sub, a] : env.by_check) subs[sub] = {{"pass_rate", a.pass_rate}, {"min_relative_margin", a.min_relative_margin}};
    entry["displays"] = subs;
    if (!env.skipped.empty()) entry["skipped"] = env.skipped.front().reason;
    per_check[id] = entry;
  }
  c.passed = ok;
  c.data = {{"checks", per_check}, {"margin_floor", "-1e-8 * scale"}};
  c.detail = "min relative margin " + fmt(worst) + " (" + worst_id + ")";
  return c;
}

// --- 4 ----------------------------------------------------------------------

Instance plain_instance(HermitianMatrix a, KrausMap phi, const SpectralBounds& bounds) {
  return Instance{std::move(a), std::nullopt, std::move(phi), std::nullopt, bounds, {}};
}

CriterionResult sharpness(const SelftestOptions&) {
  CriterionResult c{4, "equality and sharpness", false, "", 0.0, json::object()};
  constexpr double lim = 1e-10;
  bool ok = true;
  json cases = json::array();
  auto record = [&](const std::string& name, double value, double target) {
    const bool pass = std::abs(value - target) <= lim;
    ok = ok && pass;
    cases.push_back({{"case", name}, {"value", value}, {"target", target}, {"passed", pass}});
  };

  // a: trace map on diag(m, M), alpha = 1, p = 2
  for (const auto& [m, M] : {std::pair{1.0, 2.0}, std::pair{0.5, 3.0}, std::pair{2.0, 50.0}}) {
    const SpectralBounds bounds(m, M);
    CheckParams params;
    params.bounds = bounds;
    params.alpha = 1.0;
    params.p = 2.0;
    const Reports r = check_kantorovich_power(
        plain_instance(HermitianMatrix::diagonal({m, M}), normalized_trace_map(2), bounds), params);
    record("trace map equality m=" + fmt(m) + " M=" + fmt(M), r.front().margin, 0.0);
  }

  // b: symmetric vectors against A = diag(1, 2)
  {
    const double s = 1.0 / std::sqrt(2.0);
    const IsometryPair iso(ComplexMatrix{{s}, {s}}, ComplexMatrix{{s}, {-s}});
    const SpectralBounds bounds(1.0, 2.0);
    Instance inst{HermitianMatrix::diagonal({1.0, 2.0}), std::nullopt, identity_map(1), iso, bounds, {}};
    CheckParams params;
    params.bounds = bounds;
    record("Lin ratio at the symmetric instance", check_lin_conjecture(inst, params).front().ratio, 1.0);
    record("Bhatia-Davis margin at the symmetric instance", check_bhatia_davis(inst, params).front().margin, 0.0);
  }

  // c: a = m, b = M, v = 1/2
  for (const auto& [m, M] : {std::pair{1.0, 2.0}, std::pair{1.0, 10.0}, std::pair{0.3, 7.0}}) {
    const SpectralBounds bounds(m, M);
    Instance inst{HermitianMatrix::diagonal({m}), HermitianMatrix::diagonal({M}), identity_map(1),
                  std::nullopt, bounds, {}};
    CheckParams params;
    params.bounds = bounds;
    params.v = 0.5;
    record("K^R reverse Young m=" + fmt(m) + " M=" + fmt(M), check_reverse_young(inst, params).front().margin, 0.0);
  }

  // d: m = M and p = 2 alpha
  for (double alpha : {1.0, 1.5, 2.0}) {
    for (double m : {0.5, 1.0, 3.0}) {
      record("unit constant alpha=" + fmt(alpha) + " m=M=" + fmt(m),
             constants::kantorovich_power(m, m, alpha, 2.0 * alpha), 1.0);
      const SpectralBounds bounds(m, m);
      CheckParams params;
      params.bounds = bounds;
      params.alpha = alpha;
      params.p = 2.0 * alpha;
      const Reports r = check_kantorovich_power(
          plain_instance(HermitianMatrix::scalar(3, m), identity_map(3), bounds), params);
      record("degenerate margin alpha=" + fmt(alpha) + " m=M=" + fmt(m), r.front().margin, 0.0);
    }
  }
  c.passed = ok;
  c.data = {{"cases", cases}, {"limit", lim}};
  std::size_t passed = 0;
  for (const auto& x : cases) passed += x.at("passed").get<bool>() ? 1 : 0;
  c.detail = std::to_string(passed) + "/" + std::to_string(cases.size()) + " cases within 1e-10";
  return c;
}

// --- 5 ----------------------------------------------------------------------

bool leq_rel(double a, double b) { return a <= b + 1e-12 * std::max(std::abs(a), std::abs(b)); }

CriterionResult constant_comparisons(const SelftestOptions& opts) {
  CriterionResult c{5, "constant comparisons", false, "", 0.0, json::object()};
  // f(alpha) = (M^a + m^a)^{1/a} non-increasing on alpha = 1, 1.1, ..., 2.
  bool f_ok = true;
  for (std::size_t i = 0; i < 100; ++i) {
    RngStream rng(derive_seed(opts.seed, "f_alpha", {i}));
    const double m = rng.log_uniform(0.01, 10.0);
    const double M = m * rng.log_uniform(1.0, 1000.0);
    double prev = 0.0;
    for (int s = 0; s <= 10; ++s) {
      const double alpha = 1.0 + 0.1 * s;
      const double f = std::pow(std::pow(M, alpha) + std::pow(m, alpha), 1.0 / alpha);
      if (s > 0 && !leq_rel(f, prev)) f_ok = false;
      prev = f;
    }
  }

  constexpr double hs[] = {1.1, 2.0, 5.0, 10.0};
  constexpr double ps[] = {2.0, 4.0};
  bool alpha_ok = true, chain_ok = true, displayed_ok = true;
  json rows = json::array();
  for (double h : hs) {
    const double m = 1.0, M = h;
    for (double p : ps) {
      json row{{"h", h}, {"p", p}};
      if (p > 2.0) {
        const double c1 = constants::kantorovich_power(m, M, 1.0, p);
        const double c2 = constants::kantorovich_power(m, M, 2.0, p);
        const bool ok = c2 < c1 && leq_rel(c2, c1);
        alpha_ok = alpha_ok && ok;
        row["alpha2_vs_alpha1"] = {{"alpha1", c1}, {"alpha2", c2}, {"ok", ok}};
      }
      const double b_cor = constants::wielandt_power(m, M, 1.0, p);
      const double b35 = constants::zhang_second(m, M, p);
      const double b34 = constants::zhang_first(m, M, p);
      const bool first = leq_rel(b_cor, b35), second = leq_rel(b35, b34);
      chain_ok = chain_ok && first && second;
      // The displayed comparison, raised to the power p/2.
      const double lhs = std::pow((M - m) * (M - m) * (M + m) / (8.0 * std::pow(M * m, 1.5)), p / 2.0);
      const double rhs = std::pow(constants::wielandt_factor(m, M) * M / m, p / 2.0);
      const bool disp = leq_rel(lhs, rhs);
      displayed_ok = displayed_ok && disp;
      row["wielandt_chain"] = {{"alpha1_bound", b_cor}, {"second_zhang", b35}, {"first_zhang", b34},
                               {"alpha1_le_second", first}, {"second_le_first", second}};
      row["displayed_chain"] = {{"lhs", lhs}, {"rhs", rhs}, {"ok", disp}};
      rows.push_back(row);
    }
  }
  c.passed = f_ok && alpha_ok && chain_ok;
  c.data = {{"f_alpha_monotone", f_ok}, {"alpha2_tighter", alpha_ok}, {"bound_chain", chain_ok},
            {"displayed_chain_scaled", displayed_ok}, {"grid", rows}};
  std::string failing;
  for (const auto& r : rows) {
    if (!r.at("wielandt_chain").at("alpha1_le_second").get<bool>()) {
      failing += (failing.empty() ? "" : ", ") + std::string("h=") + fmt(r.at("h")) + " p=" + fmt(r.at("p"));
    }
  }
  c.detail = "f(alpha) " + std::string(f_ok ? "ok" : "FAIL") + ", alpha=2 tighter " + (alpha_ok ? "ok" : "FAIL") +
             ", alpha=1 Wielandt bound <= second Zhang bound " + (failing.empty() ? "ok" : "FAILS at " + failing) +
             ", displayed chain scaled to p " + (displayed_ok ? "ok" : "FAIL");
  return c;
}

// --- 6 ----------------------------------------------------------------------

CriterionResult special_cases(const SelftestOptions& opts) {
  CriterionResult c{6, "special-case collapse", false, "", 0.0, json::object()};
  double worst = 0.0;
  std::size_t count = 0;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); };
  for (std::size_t i = 0; i < 200; ++i) {
    RngStream rng(derive_seed(opts.seed, "collapse", {i}));
    const double m = rng.log_uniform(0.1, 10.0);
    const double M = m * rng.log_uniform(1.0, 100.0);
    const double p = rng.uniform(2.0, 8.0);
    const double mp = std::pow(m, p), Mp = std::pow(M, p);
    worst = std::max(worst, rel(constants::kantorovich_power(m, M, 1.0, p),
                                std::pow(m + M, 2.0 * p) / (16.0 * mp * Mp)));
    if (p >= 4.0) {
      worst = std::max(worst, rel(constants::kantorovich_power(m, M, 2.0, p),
                                  std::pow(m * m + M * M, p) / (16.0 * mp * Mp)));
    }
    worst = std::max(worst, rel(constants::product_sum(m, M, 1.0, 1.0), (M + m) * (M + m) / (2.0 * M * m)));
    count += 1;
  }
  c.passed = worst <= 1e-12;
  c.data = {{"samples", count}, {"max_relative_difference", worst}};
  c.detail = "max relative difference " + fmt(worst) + " (limit 1e-12)";
  return c;
}

// --- 7 ----------------------------------------------------------------------

CriterionResult conjecture_evidence(const SelftestOptions& opts) {
  CriterionResult c{7, "conjecture evidence", false, "", 0.0, json::object()};
  const detail::Stopwatch clock;
  bool ok = true;
  json per = json::object();
  std::string detail;
  for (const char* id : {"lin_3_1", "young_KR", "young_specht"}) {
    SearchConfig cfg;
    cfg.conjecture_id = id;
    cfg.budget = opts.quick ? 3000 : 100000;
    cfg.restarts = 8;
    cfg.dims = {2, 3, 4};
    cfg.master_seed = derive_seed(opts.seed, "search");
    const ReportEnvelope env = search_counterexample(cfg);
    const double best = env.body.at("best_ratio").get<double>();
    const auto restart = env.body.at("best_fingerprint").at("grid_index").get<std::size_t>();
    const double rerun = run_restart(cfg, restart).best_ratio;
    const double replayed = conjecture_ratio(search_state_from_json(env.body.at("best_state")));
    const double scale = std::max(1.0, std::abs(best));
    const bool reproducible = std::abs(rerun - best) <= 1e-12 * scale && std::abs(replayed - best) <= 1e-12 * scale;
    ok = ok && reproducible && env.errors.empty();
    per[id] = {{"best_ratio", best},
               {"reverified_ratio", env.body.at("reverified_ratio")},
               {"violation_candidate", env.body.at("violation_candidate")},
               {"best_fingerprint", env.body.at("best_fingerprint")},
               {"rerun_ratio", rerun},
               {"replayed_ratio", replayed},
               {"reproducible", reproducible},
               {"evaluations", env.body.at("evaluations")}};
    detail += std::string(detail.empty() ? "" : ", ") + id + " best " + fmt(best);
  }
  const double seconds = clock.seconds();
  c.passed = ok && seconds <= 60.0;
  c.data = {{"conjectures", per}, {"budget", opts.quick ? 3000 : 100000}};
  c.detail = detail + (ok ? ", replay exact" : ", replay MISMATCH") + (seconds <= 60.0 ? "" : ", over 60 s");
  return c;
}

using CriterionFn = CriterionResult (*)(const SelftestOptions&);

json criteria_json(const std::vector<CriterionResult>& rs) {
  json arr = json::array();
  for (const auto& r : rs) {
    arr.push_back({{"number", r.number}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}, {"data", r.data}});
  }
  return arr;
}

}  // namespace

std::vector<CriterionResult> run_criteria(const SelftestOptions& opts) {
  static constexpr CriterionFn fns[] = {kernel_accuracy, lemma_suite,    inequality_suite,      sharpness,
                                        constant_comparisons, special_cases, conjecture_evidence};
  std::vector<CriterionResult> out;
  for (CriterionFn fn : fns) {
    const detail::Stopwatch clock;
    CriterionResult r;
    try {
      r = fn(opts);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = clock.seconds();
    if (r.number == 1 && r.seconds > 10.0) {
      r.passed = false;
      r.detail += ", over 10 s";
    }
    if (r.number == 3 && r.seconds > 90.0) {
      r.passed = false;
      r.detail += ", over 90 s";
    }
    if (opts.on_result) opts.on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

ReportEnvelope selftest(const SelftestOptions& opts) {
  const detail::Stopwatch clock;
  std::vector<CriterionResult> first = run_criteria(opts);
  const double first_seconds = clock.seconds();

  // A second, silent run must serialize identically.
  SelftestOptions quiet = opts;
  quiet.on_result = nullptr;
  const std::vector<CriterionResult> second = run_criteria(quiet);
  const bool identical = criteria_json(first).dump() == criteria_json(second).dump();
  CriterionResult det{8, "determinism", identical,
                      identical ? "two runs serialize byte-identically" : "two runs differ", 0.0,
                      json::object()};
  CriterionResult wall{9, "total wall time", first_seconds <= 180.0,
                       first_seconds <= 180.0 ? "single run within 180 s" : "single run over 180 s", first_seconds, json::object()};
  if (opts.on_result) {
    opts.on_result(det);
    opts.on_result(wall);
  }
  first.push_back(det);
  first.push_back(wall);

  ReportEnvelope env;
  env.kind = "selftest";
  env.seed = opts.seed;
  env.grid = {{"quick", opts.quick}};
  env.body = {{"criteria", criteria_json(first)}};
  env.ok = std::all_of(first.begin(), first.end(), [](const CriterionResult& r) { return r.passed; });
  for (const auto& r : first) {
    env.timing_detail[std::to_string(r.number)] = r.seconds;
    if (!r.passed) env.errors.push_back("criterion " + std::to_string(r.number) + " (" + r.name + "): " + r.detail);
  }
  env.elapsed_seconds = clock.seconds();
  env.timestamp = detail::utc_timestamp();
  return env;
}

}  // namespace oplab
