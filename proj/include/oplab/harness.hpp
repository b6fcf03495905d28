#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "oplab/inequalities.hpp"
#include "oplab/linalg.hpp"
#include "oplab/maps.hpp"
#include "oplab/matrix.hpp"

namespace oplab {

inline constexpr std::string_view kVersion = "0.1.0";

// --- random streams ---------------------------------------------------------

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Seed for the stream named `name` below `master`, refined by `indices`.
// Independent of call order, so trials can run in any order or thread.
std::uint64_t derive_seed(std::uint64_t master, std::string_view name,
                          std::initializer_list<std::uint64_t> indices = {});

// mt19937_64 with portable uniform and normal transforms (the standard
// distributions are implementation-defined, these are not).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  double uniform();                     // [0, 1)
  double uniform(double lo, double hi);
  double log_uniform(double lo, double hi);
  double normal();
  Complex complex_normal();             // E|z|^2 = 1
  std::size_t index(std::size_t n);     // uniform in [0, n)
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

// --- generators -------------------------------------------------------------

ComplexMatrix random_gaussian(std::size_t rows, std::size_t cols, RngStream& rng);
ComplexMatrix random_unitary(std::size_t n, RngStream& rng);

// Q diag(lambda) Q* with lambda in [m, M]. Pinned: the smallest eigenvalue is
// exactly m and, for n >= 2, the largest exactly M. n = 1 pinned gives [m].
HermitianMatrix random_hermitian_with_spectrum(std::size_t n, const SpectralBounds& bounds,
                                               RngStream& rng, bool pinned = true);
// Q diag(lambda) Q*, Hermitian by construction.
HermitianMatrix hermitian_from_spectrum(const ComplexMatrix& q, std::span<const double> lambda);
// Gaussian Hermitian matrix (GUE-like), no spectral constraint.
HermitianMatrix random_hermitian(std::size_t n, RngStream& rng);
// G G* / n for a Gaussian n x r factor with random rank r in [1, n].
HermitianMatrix random_psd(std::size_t n, RngStream& rng);

// Kraus operators from an orthonormalized (in_dim * k_env) x out_dim stack.
// out_dim = 0 means out_dim = in_dim.
KrausMap random_unital_cp_map(std::size_t in_dim, std::size_t k_env, RngStream& rng,
                              std::size_t out_dim = 0);

IsometryPair random_isometry_pair(std::size_t n, std::size_t k, RngStream& rng);

// exp(i H) for Hermitian H.
ComplexMatrix unitary_exp(const HermitianMatrix& h);

// --- trial configuration ----------------------------------------------------

// One entry of a parameter axis: a fixed number, the check's smallest
// admissible value plus an offset ("min", "min+1"), or a fresh draw per trial
// from the admissible range ("random").
struct AxisValue {
  enum class Kind { fixed, min_offset, random };
  Kind kind = Kind::fixed;
  double value = 0.0;

  static AxisValue parse(std::string_view text);
  static AxisValue fixed_at(double x) { return {Kind::fixed, x}; }
  std::string to_string() const;
};

enum class MapFamily { mixed, identity, trace, random };
std::string_view to_string(MapFamily f);
MapFamily parse_map_family(std::string_view name);

// A sigma/tau pair by kind; the weight comes from the v axis. "random" draws
// both kinds (and blend parameters) per trial.
struct MeanPair {
  bool random = false;
  MeanKind sigma = MeanKind::arithmetic;
  MeanKind tau = MeanKind::harmonic;
  double sigma_t = 0.5;
  double tau_t = 0.5;

  static MeanPair parse(std::string_view text);  // "arithmetic/harmonic", "blend:0.3/geometric", "random"
  std::string to_string() const;
};

struct TrialConfig {
  std::string check_id;
  std::vector<std::size_t> dims{2, 3, 4};  // n drawn per trial
  std::vector<std::size_t> k_values{1};    // k drawn per trial among 2k <= n
  double m_lo = 0.25, m_hi = 4.0;          // m log-uniform
  double h_lo = 1.0, h_hi = 100.0;         // h = M/m log-uniform
  double pin_probability = 0.75;
  double p_max = 8.0;                      // upper end of "random" p draws
  std::vector<AxisValue> p_values{AxisValue{AxisValue::Kind::min_offset, 0.0}};
  std::vector<AxisValue> alpha_values{AxisValue::fixed_at(1.0)};
  std::vector<AxisValue> v_values{AxisValue::fixed_at(0.5)};
  std::vector<MeanPair> mean_pairs{MeanPair{}};
  MapFamily map_family = MapFamily::mixed;
  std::size_t trials = 100;
  std::uint64_t master_seed = 1;
  TolPolicy tol;
  unsigned threads = 1;
  bool keep_reports = true;

  void validate() const;  // ConfigError
};

struct GridPoint {
  std::size_t index = 0;
  AxisValue p, alpha, v;
  MeanPair means;
};

struct SkippedPoint {
  std::size_t grid_index = 0;
  std::string reason;
};

// Grid over the axes the check actually uses; unused axes collapse to one
// value. Fixed combinations that violate the check's constraints are skipped.
struct Grid {
  std::vector<GridPoint> points;
  std::vector<SkippedPoint> skipped;
};
Grid build_grid(const TrialConfig& cfg);

struct Trial {
  Instance instance;
  CheckParams params;
};

// The instance and parameters of one trial, exactly as run_trials generates them.
Trial make_trial(const TrialConfig& cfg, const GridPoint& point, std::size_t trial_index);
Trial regenerate(const TrialConfig& cfg, const InstanceFingerprint& fp);

// --- envelopes --------------------------------------------------------------

struct Aggregate {
  std::size_t reports = 0;
  std::size_t verdicts = 0;  // reports carrying pass/fail
  std::size_t passed = 0;
  double pass_rate = 1.0;
  double min_margin = 0.0;
  double min_relative_margin = 0.0;  // margin / scale
  double max_ratio = 0.0;
  // Worst instance: smallest relative margin among verdict reports, or the
  // largest ratio when no report carries a verdict.
  std::optional<InstanceFingerprint> worst;
  std::optional<std::string> worst_check;
  std::optional<InstanceFingerprint> max_ratio_instance;
  std::optional<std::string> max_ratio_check;

  void add(const InequalityReport& r);
  void merge(const Aggregate& other);
};

struct ReportEnvelope {
  std::string kind;  // "trials", "search", "selftest"
  std::uint64_t seed = 0;
  nlohmann::json grid = nlohmann::json::object();
  std::vector<InequalityReport> reports;
  Aggregate aggregate;
  std::vector<std::pair<std::string, Aggregate>> by_check;  // sorted by id
  std::vector<SkippedPoint> skipped;
  std::vector<std::string> errors;
  nlohmann::json body = nlohmann::json::object();
  bool ok = true;
  double elapsed_seconds = 0.0;
  nlohmann::json timing_detail = nlohmann::json::object();
  std::string timestamp;
};

nlohmann::json to_json(const ReportEnvelope& env);
// Serialized envelope without the "timestamp" and "timing" members.
std::string canonical_dump(const ReportEnvelope& env);

ReportEnvelope run_trials(const TrialConfig& cfg);

// --- counterexample search --------------------------------------------------

struct SearchConfig {
  std::string conjecture_id;  // lin_3_1, young_KR, young_specht
  std::size_t budget = 10000; // ratio evaluations over all restarts
  std::size_t restarts = 8;
  double step_scale = 0.2;
  std::uint64_t master_seed = 1;
  std::vector<std::size_t> dims{2, 3, 4};
  std::size_t max_k = 2;
  double h_lo = 1.0, h_hi = 100.0;
  TolPolicy tol;
  unsigned threads = 1;

  void validate() const;  // ConfigError
};

// Searchable point of one conjecture. Matrices are stored explicitly so the
// state replays without the generator.
struct SearchState {
  std::string conjecture_id;
  std::vector<double> eig_a, eig_b;
  ComplexMatrix frame_a, frame_b;  // unitary
  ComplexMatrix iso_frame;         // n x 2k, orthonormal columns
  ComplexMatrix kraus_stack;       // (in * k_env) x out, orthonormal columns
  std::size_t k_env = 1;
  double v = 0.5;
  double lo = 1.0, hi = 1.0;       // range the eigenvalues are kept in

  Instance instance() const;
  CheckParams params(const TolPolicy& tol) const;  // tightest bounds of the instance
};

// Conjecture ratio of the state: values above 1 would refute the conjecture.
double conjecture_ratio(const SearchState& s, const EigOptions& opts = {});

nlohmann::json to_json(const SearchState& s);
SearchState search_state_from_json(const nlohmann::json& j);

struct RestartResult {
  std::size_t restart = 0;
  std::uint64_t seed = 0;
  double start_ratio = 0.0;
  double best_ratio = 0.0;
  std::size_t evaluations = 0;
  std::size_t accepted = 0;
  std::size_t best_step = 0;
  double final_step = 0.0;
  SearchState best;
};

RestartResult run_restart(const SearchConfig& cfg, std::size_t restart);
ReportEnvelope search_counterexample(const SearchConfig& cfg);

// --- self test --------------------------------------------------------------

struct CriterionResult {
  int number = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  nlohmann::json data = nlohmann::json::object();
};

struct SelftestOptions {
  bool quick = false;
  std::uint64_t seed = 20240501;
  // Invoked after each criterion, e.g. for progress output.
  std::function<void(const CriterionResult&)> on_result;
};

std::vector<CriterionResult> run_criteria(const SelftestOptions& opts);
ReportEnvelope selftest(const SelftestOptions& opts);

// --- JSON ---------------------------------------------------------------------

nlohmann::json to_json(const ComplexMatrix& m);
nlohmann::json to_json(const HermitianMatrix& m);
ComplexMatrix complex_matrix_from_json(const nlohmann::json& j);
HermitianMatrix hermitian_from_json(const nlohmann::json& j);
nlohmann::json to_json(const KrausMap& phi);
KrausMap kraus_map_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MeanSpec& s);
MeanSpec mean_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CheckParams& p);
nlohmann::json to_json(const InstanceFingerprint& fp);
InstanceFingerprint fingerprint_from_json(const nlohmann::json& j);
nlohmann::json to_json(const InequalityReport& r);
nlohmann::json to_json(const Aggregate& a);
nlohmann::json to_json(const Instance& inst);
nlohmann::json to_json(const TrialConfig& cfg);
TrialConfig trial_config_from_json(const nlohmann::json& j);  // ConfigError on bad input
nlohmann::json to_json(const SearchConfig& cfg);

}  // namespace oplab
