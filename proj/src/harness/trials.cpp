#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "oplab/error.hpp"
#include "oplab/harness.hpp"
#include "timing.hpp"

namespace oplab {

// --- axis parsing -----------------------------------------------------------

namespace {

double parse_double(std::string_view text, std::string_view what) {
  double x = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x)) {
    throw ConfigError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return x;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

AxisValue AxisValue::parse(std::string_view text) {
  if (text == "random") return {Kind::random, 0.0};
  if (text == "min") return {Kind::min_offset, 0.0};
  if (text.starts_with("min+")) {
    const double off = parse_double(text.substr(4), "axis offset");
    if (off < 0.0) throw ConfigError("axis offset must be non-negative");
    return {Kind::min_offset, off};
  }
  return fixed_at(parse_double(text, "axis value"));
}

std::string AxisValue::to_string() const {
  switch (kind) {
    case Kind::random: return "random";
    case Kind::min_offset: return value == 0.0 ? "min" : "min+" + fmt(value);
    case Kind::fixed: return fmt(value);
  }
  return "";
}

std::string_view to_string(MapFamily f) {
  switch (f) {
    case MapFamily::mixed: return "mixed";
    case MapFamily::identity: return "identity";
    case MapFamily::trace: return "trace";
    case MapFamily::random: return "random";
  }
  return "mixed";
}

MapFamily parse_map_family(std::string_view name) {
  if (name == "mixed") return MapFamily::mixed;
  if (name == "identity") return MapFamily::identity;
  if (name == "trace") return MapFamily::trace;
  if (name == "random") return MapFamily::random;
  throw ConfigError("unknown map family '" + std::string(name) + "'");
}

MeanPair MeanPair::parse(std::string_view text) {
  MeanPair mp;
  if (text == "random") {
    mp.random = true;
    return mp;
  }
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) throw ConfigError("mean pair must read 'sigma/tau'");
  auto side = [](std::string_view s, MeanKind& kind, double& t) {
    const auto colon = s.find(':');
    kind = parse_mean_kind(s.substr(0, colon));
    if (colon != std::string_view::npos) {
      t = parse_double(s.substr(colon + 1), "blend parameter");
      if (t < 0.0 || t > 1.0) throw ConfigError("blend parameter outside [0, 1]");
    }
  };
  side(text.substr(0, slash), mp.sigma, mp.sigma_t);
  side(text.substr(slash + 1), mp.tau, mp.tau_t);
  return mp;
}

std::string MeanPair::to_string() const {
  if (random) return "random";
  auto side = [](MeanKind k, double t) {
    std::string s(oplab::to_string(k));
    if (k == MeanKind::blend) s += ":" + fmt(t);
    return s;
  };
  return side(sigma, sigma_t) + "/" + side(tau, tau_t);
}

void TrialConfig::validate() const {
  const CheckInfo& info = find_check(check_id);
  tol.validate();
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (dims.empty()) throw ConfigError("dims must be non-empty");
  for (auto n : dims) {
    if (n < 1) throw ConfigError("dimensions must be at least 1");
  }
  if (info.needs_iso) {
    if (k_values.empty()) throw ConfigError("k_values must be non-empty");
    bool feasible = false;
    for (auto n : dims) {
      for (auto k : k_values) feasible = feasible || (k >= 1 && 2 * k <= n);
    }
    if (!feasible) throw ConfigError("no (n, k) pair with 1 <= k and 2k <= n");
  }
  if (!(m_lo > 0.0 && m_lo <= m_hi && std::isfinite(m_hi))) throw ConfigError("m range must satisfy 0 < lo <= hi");
  if (!(h_lo >= 1.0 && h_lo <= h_hi && std::isfinite(h_hi))) throw ConfigError("h range must satisfy 1 <= lo <= hi");
  if (!(pin_probability >= 0.0 && pin_probability <= 1.0)) throw ConfigError("pin probability outside [0, 1]");
  if (!std::isfinite(p_max)) throw ConfigError("p_max must be finite");
  if (p_values.empty() || alpha_values.empty() || v_values.empty() || mean_pairs.empty()) {
    throw ConfigError("parameter grids must be non-empty");
  }
}

// --- grid and trial generation ----------------------------------------------

namespace {

bool open_alpha(const CheckInfo& info) { return info.id == "mean_power"; }

bool open_v(const CheckInfo& info) { return info.id == "squared_young" || info.id == "open_conjectures"; }

// uniform in the open interval (0, 1)
double open_unit(RngStream& rng) { return (static_cast<double>(rng.bits() >> 11) + 0.5) * 0x1.0p-53; }

double resolve_alpha(const CheckInfo& info, const AxisValue& a, RngStream& rng) {
  switch (a.kind) {
    case AxisValue::Kind::fixed: return a.value;
    case AxisValue::Kind::min_offset: return 1.0 + a.value;
    case AxisValue::Kind::random:
      return open_alpha(info) ? 2.0 - rng.uniform() : rng.uniform(1.0, 2.0);
  }
  return 1.0;
}

double resolve_p(const CheckInfo& info, const TrialConfig& cfg, const AxisValue& p, double alpha,
                 RngStream& rng) {
  const double lo = min_p(info, alpha);
  switch (p.kind) {
    case AxisValue::Kind::fixed: return p.value;
    case AxisValue::Kind::min_offset: return lo + p.value;
    case AxisValue::Kind::random: return rng.uniform(lo, std::max(lo, cfg.p_max));
  }
  return lo;
}

double resolve_v(const CheckInfo& info, const AxisValue& v, RngStream& rng) {
  switch (v.kind) {
    case AxisValue::Kind::fixed: return v.value;
    case AxisValue::Kind::min_offset: return v.value;
    case AxisValue::Kind::random: return open_v(info) ? open_unit(rng) : rng.uniform();
  }
  return 0.5;
}

std::pair<MeanSpec, MeanSpec> resolve_means(const MeanPair& mp, double v, RngStream& rng) {
  if (!mp.random) return {MeanSpec{mp.sigma, v, mp.sigma_t}, MeanSpec{mp.tau, v, mp.tau_t}};
  constexpr MeanKind kinds[] = {MeanKind::arithmetic, MeanKind::geometric, MeanKind::harmonic,
                                MeanKind::blend};
  MeanSpec s{kinds[rng.index(4)], v, 0.0};
  s.t = rng.uniform();
  MeanSpec t{kinds[rng.index(4)], v, 0.0};
  t.t = rng.uniform();
  return {s, t};
}

KrausMap draw_map(MapFamily family, std::size_t dim, RngStream& rng) {
  if (family == MapFamily::mixed) {
    const double u = rng.uniform();
    family = u < 0.1 ? MapFamily::identity : (u < 0.2 ? MapFamily::trace : MapFamily::random);
  }
  switch (family) {
    case MapFamily::identity: return identity_map(dim);
    case MapFamily::trace: return normalized_trace_map(dim);
    default: return random_unital_cp_map(dim, 1 + rng.index(3), rng);
  }
}

std::vector<std::pair<std::size_t, std::size_t>> shapes(const TrialConfig& cfg, const CheckInfo& info) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (auto n : cfg.dims) {
    if (!info.needs_iso) {
      out.emplace_back(n, 0);
      continue;
    }
    for (auto k : cfg.k_values) {
      if (k >= 1 && 2 * k <= n) out.emplace_back(n, k);
    }
  }
  return out;
}

}  // namespace

Grid build_grid(const TrialConfig& cfg) {
  const CheckInfo& info = find_check(cfg.check_id);
  const std::vector<AxisValue> unused{AxisValue::fixed_at(0.0)};
  const std::vector<AxisValue> one_alpha{AxisValue::fixed_at(1.0)};
  const auto& alphas = info.uses_alpha ? cfg.alpha_values : one_alpha;
  const auto& ps = info.uses_p ? cfg.p_values : unused;
  const bool uses_v = info.uses_v || info.uses_means;
  const std::vector<AxisValue> half{AxisValue::fixed_at(0.5)};
  const auto& vs = uses_v ? cfg.v_values : half;
  const std::vector<MeanPair> one_pair{MeanPair{}};
  const auto& pairs = info.uses_means ? cfg.mean_pairs : one_pair;

  Grid grid;
  std::size_t index = 0;
  for (const auto& a : alphas) {
    for (const auto& p : ps) {
      for (const auto& v : vs) {
        for (const auto& mp : pairs) {
          GridPoint pt{index++, p, a, v, mp};
          // Drawn values are admissible by construction; a drawn alpha is
          // probed at 2, the value that asks the most of p.
          RngStream unused_rng(0);
          CheckParams probe;
          probe.tol = cfg.tol;
          const bool alpha_drawn = a.kind == AxisValue::Kind::random;
          probe.alpha = alpha_drawn ? 2.0 : resolve_alpha(info, a, unused_rng);
          probe.p = p.kind == AxisValue::Kind::random ? min_p(info, probe.alpha)
                                                      : resolve_p(info, cfg, p, probe.alpha, unused_rng);
          probe.v = v.kind == AxisValue::Kind::random ? 0.5 : resolve_v(info, v, unused_rng);
          const MeanPair probe_means = mp.random ? MeanPair{} : mp;
          probe.sigma = MeanSpec{probe_means.sigma, probe.v, probe_means.sigma_t};
          probe.tau = MeanSpec{probe_means.tau, probe.v, probe_means.tau_t};
          if (auto why = constraint_violation(info, probe)) {
            grid.skipped.push_back({pt.index, "alpha=" + a.to_string() + " p=" + p.to_string() +
                                                  " v=" + v.to_string() + ": " + *why});
            continue;
          }
          grid.points.push_back(pt);
        }
      }
    }
  }
  return grid;
}

Trial make_trial(const TrialConfig& cfg, const GridPoint& point, std::size_t trial_index) {
  const CheckInfo& info = find_check(cfg.check_id);
  const std::uint64_t seed = derive_seed(cfg.master_seed, cfg.check_id, {point.index, trial_index});
  RngStream rng(seed);

  const auto sh = shapes(cfg, info);
  if (sh.empty()) throw ConfigError("no admissible (n, k) shape");
  const auto [n, k] = sh[rng.index(sh.size())];

  const double m = rng.log_uniform(cfg.m_lo, cfg.m_hi);
  const double h = rng.log_uniform(cfg.h_lo, cfg.h_hi);
  const SpectralBounds bounds(m, m * h);

  CheckParams params;
  params.bounds = bounds;
  params.tol = cfg.tol;
  params.alpha = info.uses_alpha ? resolve_alpha(info, point.alpha, rng) : 1.0;
  params.p = info.uses_p ? resolve_p(info, cfg, point.p, params.alpha, rng) : 2.0;
  params.v = (info.uses_v || info.uses_means) ? resolve_v(info, point.v, rng) : 0.5;
  if (info.uses_means) std::tie(params.sigma, params.tau) = resolve_means(point.means, params.v, rng);

  HermitianMatrix a = random_hermitian_with_spectrum(n, bounds, rng, rng.bernoulli(cfg.pin_probability));
  std::optional<HermitianMatrix> b;
  if (info.needs_b) b = random_hermitian_with_spectrum(n, bounds, rng, rng.bernoulli(cfg.pin_probability));
  std::optional<IsometryPair> iso;
  if (info.needs_iso) iso = random_isometry_pair(n, k, rng);
  KrausMap phi = draw_map(cfg.map_family, info.needs_iso ? k : n, rng);

  InstanceFingerprint fp{seed, static_cast<std::int64_t>(point.index), static_cast<std::int64_t>(trial_index),
                         n, k};
  return Trial{Instance{std::move(a), std::move(b), std::move(phi), std::move(iso), bounds, fp}, params};
}

Trial regenerate(const TrialConfig& cfg, const InstanceFingerprint& fp) {
  if (fp.grid_index < 0 || fp.trial_index < 0) throw ConfigError("fingerprint carries no trial indices");
  const Grid grid = build_grid(cfg);
  for (const auto& pt : grid.points) {
    if (pt.index != static_cast<std::size_t>(fp.grid_index)) continue;
    Trial t = make_trial(cfg, pt, static_cast<std::size_t>(fp.trial_index));
    if (t.instance.fingerprint.seed != fp.seed) {
      throw ConfigError("fingerprint seed does not match the configuration");
    }
    return t;
  }
  throw ConfigError("fingerprint grid index " + std::to_string(fp.grid_index) + " is not in the grid");
}

// --- aggregation ------------------------------------------------------------

void Aggregate::add(const InequalityReport& r) {
  const double rel = r.margin / r.scale;
  const bool first = reports == 0;
  ++reports;
  if (first || r.margin < min_margin) min_margin = r.margin;
  if (first || r.ratio > max_ratio || !max_ratio_instance) {
    if (first || r.ratio > max_ratio) {
      max_ratio = r.ratio;
      max_ratio_instance = r.fingerprint;
      max_ratio_check = r.check_id;
    }
  }
  if (r.passed) {
    const bool first_verdict = verdicts == 0;
    ++verdicts;
    if (*r.passed) ++passed;
    if (first_verdict || rel < min_relative_margin) {
      min_relative_margin = rel;
      worst = r.fingerprint;
      worst_check = r.check_id;
    }
  } else if (verdicts == 0) {
    if (first) min_relative_margin = rel;
    min_relative_margin = std::min(min_relative_margin, rel);
    worst = max_ratio_instance;
    worst_check = max_ratio_check;
  }
  pass_rate = verdicts == 0 ? 1.0 : static_cast<double>(passed) / static_cast<double>(verdicts);
}

void Aggregate::merge(const Aggregate& o) {
  if (o.reports == 0) return;
  if (reports == 0) {
    *this = o;
    return;
  }
  min_margin = std::min(min_margin, o.min_margin);
  if (o.max_ratio > max_ratio) {
    max_ratio = o.max_ratio;
    max_ratio_instance = o.max_ratio_instance;
    max_ratio_check = o.max_ratio_check;
  }
  if (o.verdicts > 0 && (verdicts == 0 || o.min_relative_margin < min_relative_margin)) {
    min_relative_margin = o.min_relative_margin;
    worst = o.worst;
    worst_check = o.worst_check;
  } else if (verdicts == 0 && o.verdicts == 0) {
    min_relative_margin = std::min(min_relative_margin, o.min_relative_margin);
    worst = max_ratio_instance;
    worst_check = max_ratio_check;
  }
  reports += o.reports;
  verdicts += o.verdicts;
  passed += o.passed;
  pass_rate = verdicts == 0 ? 1.0 : static_cast<double>(passed) / static_cast<double>(verdicts);
}

// --- runner -----------------------------------------------------------------

namespace {

struct TaskResult {
  Reports reports;
  std::optional<std::string> error;
};

template <class F>
void for_each_index(std::size_t count, unsigned threads, F&& f) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) f(i);
    });
  }
}

}  // namespace

ReportEnvelope run_trials(const TrialConfig& cfg) {
  cfg.validate();
  const detail::Stopwatch clock;
  const CheckInfo& info = find_check(cfg.check_id);
  const Grid grid = build_grid(cfg);
  if (grid.points.empty()) {
    std::string why;
    for (const auto& sk : grid.skipped) why += (why.empty() ? "" : "; ") + sk.reason;
    throw ConfigError("no feasible grid point: " + why);
  }

  const std::size_t total = grid.points.size() * cfg.trials;
  std::vector<TaskResult> results(total);
  for_each_index(total, cfg.threads, [&](std::size_t i) {
    const GridPoint& pt = grid.points[i / cfg.trials];
    const std::size_t trial = i % cfg.trials;
    try {
      const Trial t = make_trial(cfg, pt, trial);
      results[i].reports = info.run(t.instance, t.params);
    } catch (const std::exception& e) {
      results[i].error = "grid " + std::to_string(pt.index) + " trial " + std::to_string(trial) + ": " + e.what();
    }
  });

  ReportEnvelope env;
  env.kind = "trials";
  env.seed = cfg.master_seed;
  env.grid = to_json(cfg);
  nlohmann::json points = nlohmann::json::array();
  for (const auto& pt : grid.points) {
    points.push_back({{"index", pt.index},
                      {"p", pt.p.to_string()},
                      {"alpha", pt.alpha.to_string()},
                      {"v", pt.v.to_string()},
                      {"means", pt.means.to_string()}});
  }
  env.grid["points"] = points;
  env.skipped = grid.skipped;

  std::map<std::string, Aggregate> by_check;
  for (auto& r : results) {
    if (r.error) env.errors.push_back(*r.error);
    for (auto& rep : r.reports) {
      env.aggregate.add(rep);
      by_check[rep.check_id].add(rep);
      if (cfg.keep_reports) env.reports.push_back(std::move(rep));
    }
  }
  env.by_check.assign(by_check.begin(), by_check.end());
  env.body = {{"check", cfg.check_id},
              {"statement", std::string(info.statement)},
              {"trials_per_point", cfg.trials},
              {"grid_points", grid.points.size()},
              {"sampling", "generated instances; the sampling protocol is this tool's own choice"}};
  env.ok = env.errors.empty() && env.aggregate.passed == env.aggregate.verdicts;
  env.elapsed_seconds = clock.seconds();
  env.timestamp = detail::utc_timestamp();
  return env;
}

}  // namespace oplab
