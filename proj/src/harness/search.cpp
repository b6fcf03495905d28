#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "oplab/error.hpp"
#include "oplab/harness.hpp"
#include "oplab/means.hpp"
#include "timing.hpp"

namespace oplab {

namespace {

bool is_lin(std::string_view id) { return id == "lin_3_1"; }

bool known_conjecture(std::string_view id) {
  return id == "lin_3_1" || id == "young_KR" || id == "young_specht";
}

KrausMap map_from_stack(const ComplexMatrix& stack, std::size_t k_env) {
  const std::size_t in = stack.rows() / k_env, out = stack.cols();
  std::vector<ComplexMatrix> ops;
  ops.reserve(k_env);
  for (std::size_t e = 0; e < k_env; ++e) {
    ComplexMatrix v(in, out);
    for (std::size_t i = 0; i < in; ++i) {
      for (std::size_t j = 0; j < out; ++j) v(i, j) = stack(e * in + i, j);
    }
    ops.push_back(std::move(v));
  }
  return KrausMap::from_kraus(std::move(ops));
}

ComplexMatrix columns(const ComplexMatrix& x, std::size_t first, std::size_t count) {
  ComplexMatrix out(x.rows(), count);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < count; ++j) out(i, j) = x(i, first + j);
  }
  return out;
}

std::pair<double, double> extent(const SearchState& s) {
  auto [lo, hi] = std::minmax_element(s.eig_a.begin(), s.eig_a.end());
  double m = *lo, M = *hi;
  if (!s.eig_b.empty()) {
    auto [lb, hb] = std::minmax_element(s.eig_b.begin(), s.eig_b.end());
    m = std::min(m, *lb);
    M = std::max(M, *hb);
  }
  return {m, M};
}

std::vector<double> powered(const std::vector<double>& lambda, double s) {
  std::vector<double> out(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) out[i] = std::pow(lambda[i], s);
  return out;
}

double norm_squared(const ComplexMatrix& x, const EigOptions& opts) {
  return std::max(0.0, lambda_max(gram(x), opts));
}

double lin_ratio(const SearchState& s, const EigOptions& opts) {
  const auto [m, M] = extent(s);
  const double r = (M - m) / (M + m);
  const double factor = r * r;
  const std::size_t k = s.iso_frame.cols() / 2;
  const HermitianMatrix a = hermitian_from_spectrum(s.frame_a, s.eig_a);
  const ComplexMatrix x = columns(s.iso_frame, 0, k), y = columns(s.iso_frame, k, k);
  const KrausMap phi = map_from_stack(s.kraus_stack, s.k_env);

  const ComplexMatrix p = apply(phi, x.adjoint() * (a * y));
  const HermitianMatrix q = apply(phi, congruence(y, a));
  const HermitianMatrix rr = apply(phi, congruence(x, a));
  const HermitianMatrix l = gram(matrix_power(q, -0.5, opts) * p.adjoint());
  const double value = std::sqrt(norm_squared(l * matrix_power(rr, -1.0, opts), opts));
  if (factor == 0.0) return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return value / factor;
}

double young_ratio(const SearchState& s, const EigOptions& opts) {
  const auto [m, M] = extent(s);
  const double h = M / m;
  const double v = s.v;
  const HermitianMatrix a = hermitian_from_spectrum(s.frame_a, s.eig_a);
  const HermitianMatrix b = hermitian_from_spectrum(s.frame_b, s.eig_b);
  const HermitianMatrix a_half = hermitian_from_spectrum(s.frame_a, powered(s.eig_a, 0.5));
  const HermitianMatrix a_neg_half = hermitian_from_spectrum(s.frame_a, powered(s.eig_a, -0.5));
  const HermitianMatrix inner = matrix_power(congruence(a_neg_half.matrix(), b), v, opts);
  const HermitianMatrix geo = congruence(a_half.matrix(), inner);
  const KrausMap phi = map_from_stack(s.kraus_stack, s.k_env);

  const HermitianMatrix arith = apply(phi, (1.0 - v) * a + v * b);
  const HermitianMatrix geo_inv = matrix_power(apply(phi, geo), -1.0, opts);
  const double value = norm_squared(arith * geo_inv, opts);
  if (s.conjecture_id == "young_KR") {
    const double big_r = std::max(v, 1.0 - v);
    return value / std::pow(kantorovich_constant(h), 2.0 * big_r);
  }
  const double sp = specht_ratio(h);
  return value / (sp * sp);
}

struct Mover {
  const SearchConfig& cfg;
  RngStream& rng;

  // Entries listed in `pinned` stay at the ends of the range, so the
  // instance's tightest bounds never move.
  void eigen(std::vector<double>& lambda, double lo, double hi, double step, std::initializer_list<std::size_t> pinned) {
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      if (std::find(pinned.begin(), pinned.end(), i) == pinned.end()) free.push_back(i);
    }
    if (free.empty()) return;
    const std::size_t i = free[rng.index(free.size())];
    lambda[i] = std::clamp(lambda[i] * std::exp(step * rng.normal()), lo, hi);
  }

  void rotate(ComplexMatrix& frame, double step) {
    HermitianMatrix h = random_hermitian(frame.rows(), rng);
    h *= step;
    frame = orthonormalize_columns(unitary_exp(h) * frame);
  }

  void perturb(SearchState& s, double step) {
    if (is_lin(s.conjecture_id)) {
      switch (rng.index(4)) {
        case 0: eigen(s.eig_a, s.lo, s.hi, step, {0, s.eig_a.size() - 1}); break;
        case 1: rotate(s.frame_a, step); break;
        case 2: rotate(s.iso_frame, step); break;
        default: rotate(s.kraus_stack, step); break;
      }
      return;
    }
    switch (rng.index(6)) {
      case 0: eigen(s.eig_a, s.lo, s.hi, step, {0}); break;
      case 1: eigen(s.eig_b, s.lo, s.hi, step, {s.eig_b.size() - 1}); break;
      case 2: rotate(s.frame_a, step); break;
      case 3: rotate(s.frame_b, step); break;
      case 4: rotate(s.kraus_stack, step); break;
      default: s.v = std::clamp(s.v + 0.5 * step * rng.normal(), 1e-6, 1.0 - 1e-6); break;
    }
  }
};

std::vector<double> spectrum(std::size_t n, double lo, double hi, RngStream& rng) {
  std::vector<double> lambda(n);
  for (auto& l : lambda) l = rng.uniform(lo, hi);
  return lambda;
}

// Every (n, k) shape the conjecture admits, in a fixed order. Restart r starts
// on shape r mod count so small restart counts still cover all of them.
std::vector<std::pair<std::size_t, std::size_t>> shapes(const SearchConfig& cfg) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (auto n : cfg.dims) {
    if (!is_lin(cfg.conjecture_id)) {
      out.emplace_back(n, 0);
      continue;
    }
    for (std::size_t k = 1; k <= std::min(cfg.max_k, n / 2); ++k) out.emplace_back(n, k);
  }
  return out;
}

SearchState initial_state(const SearchConfig& cfg, std::size_t restart, RngStream& rng) {
  SearchState s;
  s.conjecture_id = cfg.conjecture_id;
  const auto all = shapes(cfg);
  const auto [n, k] = all[restart % all.size()];
  s.lo = 1.0;
  s.hi = rng.log_uniform(cfg.h_lo, cfg.h_hi);
  s.k_env = 1 + rng.index(3);
  s.eig_a = spectrum(n, s.lo, s.hi, rng);
  s.eig_a.front() = s.lo;
  s.frame_a = random_unitary(n, rng);
  if (is_lin(cfg.conjecture_id)) {
    s.eig_a.back() = s.hi;
    s.iso_frame = orthonormalize_columns(random_gaussian(n, 2 * k, rng));
    s.kraus_stack = orthonormalize_columns(random_gaussian(k * s.k_env, k, rng));
  } else {
    s.eig_b = spectrum(n, s.lo, s.hi, rng);
    s.eig_b.back() = s.hi;
    s.frame_b = random_unitary(n, rng);
    s.kraus_stack = orthonormalize_columns(random_gaussian(n * s.k_env, n, rng));
    s.v = (static_cast<double>(rng.bits() >> 11) + 0.5) * 0x1.0p-53;
  }
  return s;
}

double safe_ratio(const SearchState& s, const EigOptions& opts) {
  try {
    const double r = conjecture_ratio(s, opts);
    return std::isnan(r) ? -std::numeric_limits<double>::infinity() : r;
  } catch (const Error&) {
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace

void SearchConfig::validate() const {
  if (!known_conjecture(conjecture_id)) {
    throw ConfigError("unknown conjecture '" + conjecture_id + "' (lin_3_1, young_KR, young_specht)");
  }
  if (restarts < 1 || budget < restarts) throw ConfigError("search needs budget >= restarts >= 1");
  if (!(step_scale > 0.0 && std::isfinite(step_scale))) throw ConfigError("step scale must be positive");
  if (dims.empty()) throw ConfigError("dims must be non-empty");
  bool usable = false;
  for (auto n : dims) {
    if (n < 1) throw ConfigError("dimensions must be at least 1");
    usable = usable || !is_lin(conjecture_id) || n >= 2;
  }
  if (!usable) throw ConfigError("lin_3_1 needs a dimension n >= 2");
  if (is_lin(conjecture_id) && max_k < 1) throw ConfigError("max_k must be at least 1");
  if (!(h_lo >= 1.0 && h_lo <= h_hi && std::isfinite(h_hi))) throw ConfigError("h range must satisfy 1 <= lo <= hi");
  tol.validate();
}

Instance SearchState::instance() const {
  const auto [m, M] = extent(*this);
  Instance inst{hermitian_from_spectrum(frame_a, eig_a), std::nullopt,
                map_from_stack(kraus_stack, k_env), std::nullopt, SpectralBounds(m, M), {}};
  inst.fingerprint.n = eig_a.size();
  if (!eig_b.empty()) inst.b = hermitian_from_spectrum(frame_b, eig_b);
  if (is_lin(conjecture_id)) {
    const std::size_t k = iso_frame.cols() / 2;
    inst.iso = IsometryPair(columns(iso_frame, 0, k), columns(iso_frame, k, k));
    inst.fingerprint.k = k;
  }
  return inst;
}

CheckParams SearchState::params(const TolPolicy& tol) const {
  const auto [m, M] = extent(*this);
  CheckParams p;
  p.bounds = SpectralBounds(m, M);
  p.v = v;
  p.tol = tol;
  return p;
}

double conjecture_ratio(const SearchState& s, const EigOptions& opts) {
  if (is_lin(s.conjecture_id)) return lin_ratio(s, opts);
  if (s.conjecture_id == "young_KR" || s.conjecture_id == "young_specht") return young_ratio(s, opts);
  throw ConfigError("unknown conjecture '" + s.conjecture_id + "'");
}

nlohmann::json to_json(const SearchState& s) {
  nlohmann::json j{{"conjecture", s.conjecture_id},
                   {"eig_a", s.eig_a},
                   {"frame_a", to_json(s.frame_a)},
                   {"kraus_stack", to_json(s.kraus_stack)},
                   {"k_env", s.k_env},
                   {"v", s.v},
                   {"range", {s.lo, s.hi}}};
  if (!s.eig_b.empty()) {
    j["eig_b"] = s.eig_b;
    j["frame_b"] = to_json(s.frame_b);
  }
  if (!s.iso_frame.empty()) j["iso_frame"] = to_json(s.iso_frame);
  return j;
}

SearchState search_state_from_json(const nlohmann::json& j) {
  try {
    SearchState s;
    s.conjecture_id = j.at("conjecture").get<std::string>();
    s.eig_a = j.at("eig_a").get<std::vector<double>>();
    s.frame_a = complex_matrix_from_json(j.at("frame_a"));
    s.kraus_stack = complex_matrix_from_json(j.at("kraus_stack"));
    s.k_env = j.at("k_env").get<std::size_t>();
    s.v = j.at("v").get<double>();
    s.lo = j.at("range").at(0).get<double>();
    s.hi = j.at("range").at(1).get<double>();
    if (j.contains("eig_b")) {
      s.eig_b = j.at("eig_b").get<std::vector<double>>();
      s.frame_b = complex_matrix_from_json(j.at("frame_b"));
    }
    if (j.contains("iso_frame")) s.iso_frame = complex_matrix_from_json(j.at("iso_frame"));
    if (s.k_env == 0 || s.kraus_stack.rows() % s.k_env != 0) throw ConfigError("search state: bad Kraus stack");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("search state JSON: ") + e.what());
  }
}

RestartResult run_restart(const SearchConfig& cfg, std::size_t restart) {
  cfg.validate();
  if (restart >= cfg.restarts) throw ConfigError("restart index out of range");
  const std::size_t share = cfg.budget / cfg.restarts + (restart < cfg.budget % cfg.restarts ? 1 : 0);

  RestartResult out;
  out.restart = restart;
  out.seed = derive_seed(cfg.master_seed, cfg.conjecture_id, {restart});
  RngStream rng(out.seed);
  Mover mover{cfg, rng};

  SearchState current = initial_state(cfg, restart, rng);
  double current_ratio = safe_ratio(current, {});
  out.start_ratio = current_ratio;
  out.evaluations = 1;
  out.best = current;
  out.best_ratio = current_ratio;

  double step = cfg.step_scale;
  const double min_step = 1e-4 * cfg.step_scale;
  for (std::size_t it = 1; it < share; ++it) {
    SearchState trial = current;
    mover.perturb(trial, step);
    const double r = safe_ratio(trial, {});
    ++out.evaluations;
    if (r > current_ratio) {
      current = std::move(trial);
      current_ratio = r;
      ++out.accepted;
      step = std::min(step * 1.5, 1.0);
      if (r > out.best_ratio) {
        out.best_ratio = r;
        out.best = current;
        out.best_step = it;
      }
    } else {
      step = std::max(step * 0.97, min_step);
    }
  }
  out.final_step = step;
  return out;
}

ReportEnvelope search_counterexample(const SearchConfig& cfg) {
  cfg.validate();
  const detail::Stopwatch clock;
  std::vector<RestartResult> results(cfg.restarts);
  if (cfg.threads <= 1) {
    for (std::size_t r = 0; r < cfg.restarts; ++r) results[r] = run_restart(cfg, r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(cfg.threads, cfg.restarts); ++w) {
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < cfg.restarts; r = next++) results[r] = run_restart(cfg, r);
      });
    }
  }

  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r) {
    if (results[r].best_ratio > results[best].best_ratio) best = r;
  }
  const RestartResult& top = results[best];

  EigOptions tight;
  tight.rel_tol = 1e-15;
  tight.max_sweeps = 400;
  const double reverified = safe_ratio(top.best, tight);
  const double threshold = 1.0 + 10.0 * cfg.tol.tolerance(1.0);
  const bool candidate = top.best_ratio > threshold && reverified > threshold;

  ReportEnvelope env;
  env.kind = "search";
  env.seed = cfg.master_seed;
  env.grid = to_json(cfg);

  Instance inst = top.best.instance();
  inst.fingerprint.seed = top.seed;
  inst.fingerprint.grid_index = static_cast<std::int64_t>(top.restart);
  inst.fingerprint.trial_index = static_cast<std::int64_t>(top.best_step);
  const CheckParams params = top.best.params(cfg.tol);
  try {
    Reports reps = is_lin(cfg.conjecture_id) ? check_lin_conjecture(inst, params)
                                             : check_open_conjectures(inst, params);
    for (auto& r : reps) {
      env.aggregate.add(r);
      env.reports.push_back(std::move(r));
    }
  } catch (const Error& e) {
    env.errors.push_back(std::string("re-check of the best state failed: ") + e.what());
  }

  nlohmann::json trajectory = nlohmann::json::array();
  std::size_t evaluations = 0, accepted = 0;
  for (const auto& r : results) {
    evaluations += r.evaluations;
    accepted += r.accepted;
    trajectory.push_back({{"restart", r.restart},
                          {"seed", r.seed},
                          {"start_ratio", r.start_ratio},
                          {"best_ratio", r.best_ratio},
                          {"best_step", r.best_step},
                          {"evaluations", r.evaluations},
                          {"accepted", r.accepted},
                          {"final_step", r.final_step}});
  }
  env.body = {{"conjecture", cfg.conjecture_id},
              {"best_ratio", top.best_ratio},
              {"reverified_ratio", reverified},
              {"threshold", threshold},
              {"violation_candidate", candidate},
              {"best_fingerprint", to_json(inst.fingerprint)},
              {"best_state", to_json(top.best)},
              {"evaluations", evaluations},
              {"accepted", accepted},
              {"trajectory", trajectory},
              {"note", "evidence only: a ratio at or below 1 proves nothing"}};
  env.ok = env.errors.empty();
  env.elapsed_seconds = clock.seconds();
  env.timestamp = detail::utc_timestamp();
  return env;
}

}  // namespace oplab
