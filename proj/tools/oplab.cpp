// oplab: verify operator inequalities on random instances, sweep parameter
// grids, search for counterexamples to open conjectures, run the self test.
//
// Exit codes: 0 success, 1 check or suite failure, 2 configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "oplab/error.hpp"
#include "oplab/harness.hpp"

namespace {

using namespace oplab;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kConfig = 2;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void print_skipped(const ReportEnvelope& env) {
  for (const auto& s : env.skipped) std::cerr << "skipped grid point " << s.grid_index << ": " << s.reason << "\n";
  for (const auto& e : env.errors) std::cerr << "error: " << e << "\n";
}

void print_summary(const ReportEnvelope& env) {
  std::printf("%-48s %8s %10s %14s %12s\n", "display", "reports", "pass_rate", "min_rel_margin", "max_ratio");
  for (const auto& [id, a] : env.by_check) {
    std::printf("%-48s %8zu %10.4f %14.4e %12.6g\n", id.c_str(), a.reports, a.pass_rate, a.min_relative_margin,
                a.max_ratio);
  }
  if (env.aggregate.worst) {
    const auto& w = *env.aggregate.worst;
    std::printf("worst instance: %s seed=%llu grid=%lld trial=%lld n=%zu k=%zu\n",
                env.aggregate.worst_check.value_or("").c_str(), static_cast<unsigned long long>(w.seed),
                static_cast<long long>(w.grid_index), static_cast<long long>(w.trial_index), w.n, w.k);
  }
  std::printf("%s\n", env.ok ? "OK" : "FAILED");
}

// --- verify -----------------------------------------------------------------

struct VerifyArgs {
  std::string check;
  std::vector<std::size_t> dims{3};
  std::vector<std::size_t> ks{1};
  double m = 1.0;
  double M = 4.0;
  std::vector<std::string> p{"min"};
  std::vector<std::string> alpha{"1"};
  std::vector<std::string> v;
  std::string sigma, tau;
  std::string map_family = "mixed";
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool unpinned = false;
  std::string out;
};

TrialConfig verify_config(const VerifyArgs& a) {
  TrialConfig cfg;
  cfg.check_id = a.check;
  cfg.dims = a.dims;
  cfg.k_values = a.ks;
  const SpectralBounds bounds(a.m, a.M);
  cfg.m_lo = cfg.m_hi = bounds.m();
  cfg.h_lo = cfg.h_hi = bounds.h();
  cfg.pin_probability = a.unpinned ? 0.0 : 1.0;
  cfg.p_values.clear();
  for (const auto& x : a.p) cfg.p_values.push_back(AxisValue::parse(x));
  cfg.alpha_values.clear();
  for (const auto& x : a.alpha) cfg.alpha_values.push_back(AxisValue::parse(x));

  std::optional<MeanSpec> sigma, tau;
  if (!a.sigma.empty()) sigma = MeanSpec::parse(a.sigma);
  if (!a.tau.empty()) tau = MeanSpec::parse(a.tau);
  if (sigma && tau && sigma->v != tau->v) throw ConfigError("--sigma and --tau must carry the same weight");
  const std::optional<double> mean_v = sigma ? std::optional(sigma->v) : (tau ? std::optional(tau->v) : std::nullopt);

  cfg.v_values.clear();
  for (const auto& x : a.v) cfg.v_values.push_back(AxisValue::parse(x));
  if (cfg.v_values.empty()) cfg.v_values.push_back(AxisValue::fixed_at(mean_v.value_or(0.5)));
  if (mean_v) {
    for (const auto& x : cfg.v_values) {
      if (x.kind != AxisValue::Kind::fixed || x.value != *mean_v) {
        throw ConfigError("--v must match the weight carried by --sigma/--tau");
      }
    }
  }
  MeanPair pair;
  if (sigma) {
    pair.sigma = sigma->kind;
    pair.sigma_t = sigma->t;
  }
  if (tau) {
    pair.tau = tau->kind;
    pair.tau_t = tau->t;
  }
  cfg.mean_pairs = {pair};
  cfg.map_family = parse_map_family(a.map_family);
  cfg.trials = a.trials;
  cfg.master_seed = a.seed;
  cfg.threads = a.threads;
  cfg.validate();
  return cfg;
}

int run_verify(const VerifyArgs& a) {
  TrialConfig cfg;
  try {
    cfg = verify_config(a);
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  }
  const ReportEnvelope env = run_trials(cfg);
  print_skipped(env);
  print_summary(env);
  if (!a.out.empty()) write_file(a.out, to_json(env).dump(2) + "\n");
  return env.ok ? kOk : kFailed;
}

// --- sweep ------------------------------------------------------------------

std::string csv_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

int run_sweep(const std::string& config_path, const std::string& out_path) {
  std::vector<TrialConfig> configs;
  try {
    const json j = read_json_file(config_path);
    const json list = j.is_array() ? j : (j.contains("runs") ? j.at("runs") : json::array({j}));
    for (const json& c : list) configs.push_back(trial_config_from_json(c));
    if (configs.empty()) throw ConfigError("sweep config lists no runs");
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  }

  std::ostringstream csv;
  csv << "check_id,n,k,m,M,p,alpha,v,margin,ratio,passed,seed\n";
  bool ok = true;
  for (auto& cfg : configs) {
    cfg.keep_reports = true;
    const ReportEnvelope env = run_trials(cfg);
    print_skipped(env);
    std::printf("%s: %zu reports, pass rate %.4f, min relative margin %.4e%s\n", cfg.check_id.c_str(),
                env.aggregate.reports, env.aggregate.pass_rate, env.aggregate.min_relative_margin,
                env.ok ? "" : " FAILED");
    ok = ok && env.ok;
    for (const auto& r : env.reports) {
      const std::string passed = r.passed ? (*r.passed ? "true" : "false") : "";
      csv << r.check_id << ',' << r.fingerprint.n << ',' << r.fingerprint.k << ',' << csv_number(r.params.bounds.m())
          << ',' << csv_number(r.params.bounds.M()) << ',' << csv_number(r.params.p) << ','
          << csv_number(r.params.alpha) << ',' << csv_number(r.params.v) << ',' << csv_number(r.margin) << ','
          << csv_number(r.ratio) << ',' << passed << ',' << r.fingerprint.seed << '\n';
    }
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    write_file(out_path, csv.str());
  }
  return ok ? kOk : kFailed;
}

// --- search -----------------------------------------------------------------

int run_search(SearchConfig cfg, const std::string& out) {
  try {
    cfg.validate();
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  }
  const ReportEnvelope env = search_counterexample(cfg);
  const json& b = env.body;
  std::printf("conjecture %s: best ratio %.15g (re-verified %.15g) after %zu evaluations\n",
              cfg.conjecture_id.c_str(), b.at("best_ratio").get<double>(), b.at("reverified_ratio").get<double>(),
              b.at("evaluations").get<std::size_t>());
  std::printf("best restart %lld, step %lld, seed %llu\n",
              b.at("best_fingerprint").at("grid_index").get<long long>(),
              b.at("best_fingerprint").at("trial_index").get<long long>(),
              b.at("best_fingerprint").at("seed").get<unsigned long long>());
  std::printf("%s\n", b.at("violation_candidate").get<bool>() ? "VIOLATION CANDIDATE (ratio above 1 + 10 tol)"
                                                              : "no violation found (evidence only)");
  for (const auto& e : env.errors) std::cerr << "error: " << e << "\n";
  if (!out.empty()) write_file(out, to_json(env).dump(2) + "\n");
  return env.ok ? kOk : kFailed;
}

int run_replay(const std::string& path) {
  json env;
  SearchState state;
  try {
    env = read_json_file(path);
    state = search_state_from_json(env.at("body").at("best_state"));
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const json::exception& e) {
    std::cerr << "configuration error: not a search envelope: " << e.what() << "\n";
    return kConfig;
  }
  const double recorded = env.at("body").at("best_ratio").get<double>();
  const double replayed = conjecture_ratio(state);
  const double diff = std::abs(replayed - recorded);
  std::printf("recorded %.17g\nreplayed %.17g\ndifference %.3g\n", recorded, replayed, diff);
  return diff <= 1e-12 * std::max(1.0, std::abs(recorded)) ? kOk : kFailed;
}

// --- selftest ---------------------------------------------------------------

int run_selftest(bool quick, std::uint64_t seed, const std::string& out) {
  SelftestOptions opts;
  opts.quick = quick;
  opts.seed = seed;
  opts.on_result = [](const CriterionResult& r) {
    std::printf("[%s] %d %s: %s (%.2f s)\n", r.passed ? "PASS" : "FAIL", r.number, r.name.c_str(), r.detail.c_str(),
                r.seconds);
    std::fflush(stdout);
  };
  const ReportEnvelope env = selftest(opts);
  if (!env.ok) {
    // Inline the failing criteria in full.
    for (const auto& c : env.body.at("criteria")) {
      if (!c.at("passed").get<bool>()) std::printf("%s\n", c.dump(2).c_str());
    }
  }
  std::printf("selftest %s in %.1f s\n", env.ok ? "passed" : "FAILED", env.elapsed_seconds);
  if (!out.empty()) write_file(out, to_json(env).dump(2) + "\n");
  return env.ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oplab: numerical checks of operator Kantorovich, Wielandt and Young inequalities"};
  app.require_subcommand(1);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run one check on random instances");
  verify->add_option("--check", va.check, "check id (see 'oplab list')")->required();
  verify->add_option("--dim", va.dims, "ambient dimension(s) n");
  verify->add_option("--k", va.ks, "compression dimension(s) k, 2k <= n");
  verify->add_option("--m", va.m, "lower spectral bound m");
  verify->add_option("--M", va.M, "upper spectral bound M");
  verify->add_option("--p", va.p, "exponent(s): number, 'min', 'min+X' or 'random'");
  verify->add_option("--alpha", va.alpha, "alpha value(s): number or 'random'");
  verify->add_option("--v", va.v, "weight(s) v: number or 'random'");
  verify->add_option("--sigma", va.sigma, "mean sigma as kind:v[:t]");
  verify->add_option("--tau", va.tau, "mean tau as kind:v[:t]");
  verify->add_option("--map", va.map_family, "map family: mixed, identity, trace, random");
  verify->add_option("--trials", va.trials, "trials per grid point");
  verify->add_option("--seed", va.seed, "master seed");
  verify->add_option("--threads", va.threads, "worker threads");
  verify->add_flag("--unpinned", va.unpinned, "do not pin spectra to the endpoints m, M");
  verify->add_option("--out", va.out, "write the report envelope (JSON)");

  std::string sweep_config, sweep_out;
  auto* sweep = app.add_subcommand("sweep", "run trial configurations from a JSON file, write CSV");
  sweep->add_option("--config", sweep_config, "JSON config: one object, an array, or {\"runs\": [...]}")->required();
  sweep->add_option("--out", sweep_out, "CSV output path (stdout when omitted)");

  SearchConfig sc;
  std::string search_out;
  std::size_t max_dim = 4;
  auto* search = app.add_subcommand("search", "hill-climb for counterexamples to an open conjecture");
  search->add_option("--conjecture", sc.conjecture_id, "lin_3_1, young_KR or young_specht")->required();
  search->add_option("--budget", sc.budget, "ratio evaluations over all restarts");
  search->add_option("--restarts", sc.restarts, "independent restarts");
  search->add_option("--step", sc.step_scale, "initial step scale");
  search->add_option("--seed", sc.master_seed, "master seed");
  search->add_option("--max-dim", max_dim, "largest dimension n searched");
  search->add_option("--threads", sc.threads, "worker threads");
  search->add_option("--out", search_out, "write the search envelope (JSON)");

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "re-evaluate the best state stored in a search envelope");
  replay->add_option("envelope", replay_path, "search envelope JSON")->required();

  bool quick = false;
  std::uint64_t st_seed = SelftestOptions{}.seed;
  std::string st_out;
  auto* st = app.add_subcommand("selftest", "run the acceptance criteria suite");
  st->add_flag("--quick", quick, "reduced instance counts");
  st->add_option("--seed", st_seed, "master seed");
  st->add_option("--out", st_out, "write the selftest envelope (JSON)");

  auto* list = app.add_subcommand("list", "list the available checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*verify) return run_verify(va);
    if (*sweep) return run_sweep(sweep_config, sweep_out);
    if (*search) {
      sc.dims.clear();
      for (std::size_t n = 1; n <= max_dim; ++n) sc.dims.push_back(n);
      return run_search(sc, search_out);
    }
    if (*replay) return run_replay(replay_path);
    if (*st) return run_selftest(quick, st_seed, st_out);
    if (*list) {
      for (const auto& c : all_checks()) {
        std::printf("%-22s %s%s\n", std::string(c.id).c_str(), std::string(c.statement).c_str(),
                    c.report_only ? "  [report only]" : "");
      }
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kOk;
}
