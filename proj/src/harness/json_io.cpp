#include <cmath>

#include "oplab/error.hpp"
#include "oplab/harness.hpp"

namespace oplab {

using nlohmann::json;

namespace {

json entries_json(const ComplexMatrix& m) {
  json e = json::array();
  for (const Complex& z : m.entries()) e.push_back(json::array({z.real(), z.imag()}));
  return e;
}

std::vector<Complex> entries_from(const json& j, std::size_t expected) {
  const json& e = j.at("entries");
  if (!e.is_array() || e.size() != expected) {
    throw ConfigError("matrix JSON: expected " + std::to_string(expected) + " entries");
  }
  std::vector<Complex> out;
  out.reserve(expected);
  for (const json& z : e) {
    if (z.is_array() && z.size() == 2) {
      out.emplace_back(z[0].get<double>(), z[1].get<double>());
    } else if (z.is_number()) {
      out.emplace_back(z.get<double>(), 0.0);
    } else {
      throw ConfigError("matrix JSON: entries must be [re, im] pairs");
    }
  }
  return out;
}

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

json tol_json(const TolPolicy& t) { return {{"abs", t.abs}, {"rel", t.rel}}; }

TolPolicy tol_from(const json& j) {
  TolPolicy t;
  t.abs = j.value("abs", t.abs);
  t.rel = j.value("rel", t.rel);
  t.validate();
  return t;
}

std::vector<AxisValue> axis_from(const json& j) {
  std::vector<AxisValue> out;
  const json arr = j.is_array() ? j : json::array({j});
  for (const json& x : arr) {
    if (x.is_number()) {
      out.push_back(AxisValue::fixed_at(x.get<double>()));
    } else if (x.is_string()) {
      out.push_back(AxisValue::parse(x.get<std::string>()));
    } else {
      throw ConfigError("axis values must be numbers or strings");
    }
  }
  return out;
}

json axis_json(const std::vector<AxisValue>& axis) {
  json out = json::array();
  for (const auto& a : axis) {
    if (a.kind == AxisValue::Kind::fixed) {
      out.push_back(a.value);
    } else {
      out.push_back(a.to_string());
    }
  }
  return out;
}

std::pair<double, double> range_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("ranges must be [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

json to_json(const ComplexMatrix& m) {
  if (m.is_square()) return {{"dim", m.rows()}, {"entries", entries_json(m)}};
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries_json(m)}};
}

json to_json(const HermitianMatrix& m) { return to_json(m.matrix()); }

ComplexMatrix complex_matrix_from_json(const json& j) {
  return guarded("matrix JSON", [&] {
    std::size_t rows = 0, cols = 0;
    if (j.contains("dim")) {
      rows = cols = j.at("dim").get<std::size_t>();
    } else {
      rows = j.at("rows").get<std::size_t>();
      cols = j.at("cols").get<std::size_t>();
    }
    return ComplexMatrix(rows, cols, entries_from(j, rows * cols));
  });
}

HermitianMatrix hermitian_from_json(const json& j) {
  return HermitianMatrix(complex_matrix_from_json(j));
}

json to_json(const KrausMap& phi) {
  json ops = json::array();
  for (const auto& v : phi.kraus_ops()) ops.push_back(to_json(v));
  return {{"in_dim", phi.in_dim()}, {"out_dim", phi.out_dim()}, {"kraus", ops}};
}

KrausMap kraus_map_from_json(const json& j) {
  return guarded("KrausMap JSON", [&] {
    std::vector<ComplexMatrix> ops;
    for (const json& v : j.at("kraus")) ops.push_back(complex_matrix_from_json(v));
    KrausMap phi = KrausMap::from_kraus(std::move(ops));
    if (j.contains("in_dim") && j.at("in_dim").get<std::size_t>() != phi.in_dim()) {
      throw ConfigError("KrausMap JSON: in_dim does not match the operators");
    }
    if (j.contains("out_dim") && j.at("out_dim").get<std::size_t>() != phi.out_dim()) {
      throw ConfigError("KrausMap JSON: out_dim does not match the operators");
    }
    return phi;
  });
}

json to_json(const MeanSpec& s) {
  json t = s.kind == MeanKind::blend ? json(s.t) : json(nullptr);
  return {{"kind", std::string(to_string(s.kind))}, {"v", s.v}, {"t", t}};
}

MeanSpec mean_spec_from_json(const json& j) {
  return guarded("MeanSpec JSON", [&] {
    MeanSpec s;
    s.kind = parse_mean_kind(j.at("kind").get<std::string>());
    s.v = j.value("v", 0.5);
    s.t = (j.contains("t") && !j.at("t").is_null()) ? j.at("t").get<double>() : 0.0;
    s.validate();
    return s;
  });
}

json to_json(const CheckParams& p) {
  return {{"p", p.p},
          {"alpha", p.alpha},
          {"v", p.v},
          {"R", p.R()},
          {"sigma", to_json(p.sigma)},
          {"tau", to_json(p.tau)},
          {"bounds", {{"m", p.bounds.m()}, {"M", p.bounds.M()}, {"h", p.bounds.h()}}},
          {"tol", tol_json(p.tol)}};
}

json to_json(const InstanceFingerprint& fp) {
  return {{"seed", fp.seed},
          {"grid_index", fp.grid_index},
          {"trial_index", fp.trial_index},
          {"n", fp.n},
          {"k", fp.k}};
}

InstanceFingerprint fingerprint_from_json(const json& j) {
  return guarded("fingerprint JSON", [&] {
    InstanceFingerprint fp;
    fp.seed = j.at("seed").get<std::uint64_t>();
    fp.grid_index = j.value("grid_index", std::int64_t{-1});
    fp.trial_index = j.value("trial_index", std::int64_t{-1});
    fp.n = j.value("n", std::size_t{0});
    fp.k = j.value("k", std::size_t{0});
    return fp;
  });
}

json to_json(const InequalityReport& r) {
  return {{"check_id", r.check_id},
          {"mode", std::string(to_string(r.mode))},
          {"lhs_value", r.lhs_value},
          {"rhs_bound", r.rhs_bound},
          {"margin", r.margin},
          {"ratio", r.ratio},
          {"scale", r.scale},
          {"tol_used", r.tol_used},
          {"passed", r.passed ? json(*r.passed) : json(nullptr)},
          {"params", to_json(r.params)},
          {"instance_fingerprint", to_json(r.fingerprint)}};
}

json to_json(const Aggregate& a) {
  json out{{"reports", a.reports},
           {"verdicts", a.verdicts},
           {"passed", a.passed},
           {"pass_rate", a.pass_rate},
           {"min_margin", a.min_margin},
           {"min_relative_margin", a.min_relative_margin},
           {"max_ratio", a.max_ratio}};
  out["worst_fingerprint"] = a.worst ? to_json(*a.worst) : json(nullptr);
  out["worst_check"] = a.worst_check ? json(*a.worst_check) : json(nullptr);
  out["max_ratio_fingerprint"] = a.max_ratio_instance ? to_json(*a.max_ratio_instance) : json(nullptr);
  out["max_ratio_check"] = a.max_ratio_check ? json(*a.max_ratio_check) : json(nullptr);
  return out;
}

json to_json(const Instance& inst) {
  json out{{"a", to_json(inst.a)},
           {"phi", to_json(inst.phi)},
           {"bounds", {{"m", inst.bounds.m()}, {"M", inst.bounds.M()}}},
           {"fingerprint", to_json(inst.fingerprint)}};
  out["b"] = inst.b ? to_json(*inst.b) : json(nullptr);
  out["iso"] = inst.iso ? json{{"x", to_json(inst.iso->x())}, {"y", to_json(inst.iso->y())}}
                        : json(nullptr);
  return out;
}

json to_json(const TrialConfig& cfg) {
  json dims = cfg.dims, ks = cfg.k_values;
  json means = json::array();
  for (const auto& mp : cfg.mean_pairs) means.push_back(mp.to_string());
  return {{"check", cfg.check_id},
          {"dims", dims},
          {"k_values", ks},
          {"m_range", {cfg.m_lo, cfg.m_hi}},
          {"h_range", {cfg.h_lo, cfg.h_hi}},
          {"pin_probability", cfg.pin_probability},
          {"p_max", cfg.p_max},
          {"p", axis_json(cfg.p_values)},
          {"alpha", axis_json(cfg.alpha_values)},
          {"v", axis_json(cfg.v_values)},
          {"means", means},
          {"map_family", std::string(to_string(cfg.map_family))},
          {"trials", cfg.trials},
          {"seed", cfg.master_seed},
          {"tol", tol_json(cfg.tol)}};
}

TrialConfig trial_config_from_json(const json& j) {
  return guarded("trial config", [&] {
    if (!j.is_object()) throw ConfigError("trial config must be a JSON object");
    TrialConfig cfg;
    cfg.check_id = j.at("check").get<std::string>();
    if (j.contains("dims")) cfg.dims = j.at("dims").get<std::vector<std::size_t>>();
    if (j.contains("k_values")) cfg.k_values = j.at("k_values").get<std::vector<std::size_t>>();
    if (j.contains("m_range")) std::tie(cfg.m_lo, cfg.m_hi) = range_from(j.at("m_range"));
    if (j.contains("h_range")) std::tie(cfg.h_lo, cfg.h_hi) = range_from(j.at("h_range"));
    cfg.pin_probability = j.value("pin_probability", cfg.pin_probability);
    cfg.p_max = j.value("p_max", cfg.p_max);
    if (j.contains("p")) cfg.p_values = axis_from(j.at("p"));
    if (j.contains("alpha")) cfg.alpha_values = axis_from(j.at("alpha"));
    if (j.contains("v")) cfg.v_values = axis_from(j.at("v"));
    if (j.contains("means")) {
      cfg.mean_pairs.clear();
      for (const json& m : j.at("means")) cfg.mean_pairs.push_back(MeanPair::parse(m.get<std::string>()));
    }
    if (j.contains("map_family")) cfg.map_family = parse_map_family(j.at("map_family").get<std::string>());
    cfg.trials = j.value("trials", cfg.trials);
    cfg.master_seed = j.value("seed", cfg.master_seed);
    if (j.contains("tol")) cfg.tol = tol_from(j.at("tol"));
    cfg.threads = j.value("threads", cfg.threads);
    cfg.keep_reports = j.value("keep_reports", cfg.keep_reports);
    cfg.validate();
    return cfg;
  });
}

json to_json(const SearchConfig& cfg) {
  json dims = cfg.dims;
  return {{"conjecture", cfg.conjecture_id},
          {"budget", cfg.budget},
          {"restarts", cfg.restarts},
          {"step_scale", cfg.step_scale},
          {"seed", cfg.master_seed},
          {"dims", dims},
          {"max_k", cfg.max_k},
          {"h_range", {cfg.h_lo, cfg.h_hi}},
          {"tol", tol_json(cfg.tol)}};
}

json to_json(const ReportEnvelope& env) {
  json reports = json::array();
  for (const auto& r : env.reports) reports.push_back(to_json(r));
  json by_check = json::object();
  for (const auto& [id, agg] : env.by_check) by_check[id] = to_json(agg);
  json skipped = json::array();
  for (const auto& s : env.skipped) skipped.push_back({{"grid_index", s.grid_index}, {"reason", s.reason}});
  return {{"kind", env.kind},
          {"version", std::string(kVersion)},
          {"seed", env.seed},
          {"grid", env.grid},
          {"ok", env.ok},
          {"aggregate", to_json(env.aggregate)},
          {"by_check", by_check},
          {"skipped", skipped},
          {"errors", env.errors},
          {"body", env.body},
          {"reports", reports},
          {"timing", {{"elapsed_seconds", env.elapsed_seconds}, {"detail", env.timing_detail}}},
          {"timestamp", env.timestamp}};
}

std::string canonical_dump(const ReportEnvelope& env) {
  json j = to_json(env);
  j.erase("timestamp");
  j.erase("timing");
  return j.dump();
}

}  // namespace oplab
