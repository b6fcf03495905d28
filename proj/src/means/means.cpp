#include "oplab/means.hpp"

#include <charconv>
#include <cmath>
#include <vector>

#include "oplab/error.hpp"
#include "oplab/linalg.hpp"

namespace oplab {
namespace {

void require_same_dim(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("operator mean of matrices with different dimensions");
}

void require_weight(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("mean weight must lie in [0, 1]");
}

double parse_double(std::string_view text) {
  double out = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc{} || ptr != end) throw ConfigError("not a number: '" + std::string(text) + "'");
  return out;
}

}  // namespace

std::string_view to_string(MeanKind kind) {
  switch (kind) {
    case MeanKind::arithmetic: return "arithmetic";
    case MeanKind::geometric: return "geometric";
    case MeanKind::harmonic: return "harmonic";
    case MeanKind::blend: return "blend";
  }
  return "unknown";
}

MeanKind parse_mean_kind(std::string_view name) {
  if (name == "arithmetic") return MeanKind::arithmetic;
  if (name == "geometric") return MeanKind::geometric;
  if (name == "harmonic") return MeanKind::harmonic;
  if (name == "blend") return MeanKind::blend;
  throw ConfigError("unknown mean kind '" + std::string(name) + "'");
}

void MeanSpec::validate() const {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("mean weight v must lie in [0, 1]");
  if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("blend parameter t must lie in [0, 1]");
}

MeanSpec MeanSpec::parse(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = text.find(':', start);
    parts.push_back(text.substr(start, colon == std::string_view::npos ? colon : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() < 2 || parts.size() > 3) {
    throw ConfigError("mean spec must look like kind:v[:t], got '" + std::string(text) + "'");
  }
  MeanSpec spec;
  spec.kind = parse_mean_kind(parts[0]);
  spec.v = parse_double(parts[1]);
  if (parts.size() == 3) spec.t = parse_double(parts[2]);
  spec.validate();
  return spec;
}

std::string MeanSpec::to_string() const {
  std::string out = std::string(oplab::to_string(kind)) + ":" + std::to_string(v);
  if (kind == MeanKind::blend) out += ":" + std::to_string(t);
  return out;
}

HermitianMatrix arithmetic_mean(const HermitianMatrix& a, const HermitianMatrix& b, double v) {
  require_same_dim(a, b);
  require_weight(v);
  if (v == 0.0) return a;
  if (v == 1.0) return b;
  return (1.0 - v) * a + v * b;
}

HermitianMatrix geometric_mean(const HermitianMatrix& a, const HermitianMatrix& b, double v) {
  require_same_dim(a, b);
  require_weight(v);
  const EigenDecomposition ea = eig_hermitian(a);
  const HermitianMatrix a_half = matrix_power(ea, 0.5);
  const HermitianMatrix a_inv_half = matrix_power(ea, -0.5);
  // B must be positive definite too, even at the endpoints.
  const EigenDecomposition eb = eig_hermitian(b);
  if (!(eb.min() > pd_floor(eb.max()))) {
    throw DomainError("geometric mean needs positive definite operands");
  }
  if (v == 0.0) return a;
  if (v == 1.0) return b;
  const HermitianMatrix inner = congruence(a_inv_half.matrix(), b);
  return congruence(a_half.matrix(), matrix_power(inner, v));
}

HermitianMatrix harmonic_mean(const HermitianMatrix& a, const HermitianMatrix& b, double v) {
  require_same_dim(a, b);
  require_weight(v);
  const HermitianMatrix a_inv = matrix_power(a, -1.0);
  const HermitianMatrix b_inv = matrix_power(b, -1.0);
  if (v == 0.0) return a;
  if (v == 1.0) return b;
  return matrix_power((1.0 - v) * a_inv + v * b_inv, -1.0);
}

HermitianMatrix mean(const MeanSpec& spec, const HermitianMatrix& a, const HermitianMatrix& b) {
  spec.validate();
  switch (spec.kind) {
    case MeanKind::arithmetic: {
      // Arithmetic needs no inverse, but the mean contract is on pd operands.
      if (!(lambda_min(a) > 0.0) || !(lambda_min(b) > 0.0)) {
        throw DomainError("operator means need positive definite operands");
      }
      return arithmetic_mean(a, b, spec.v);
    }
    case MeanKind::geometric: return geometric_mean(a, b, spec.v);
    case MeanKind::harmonic: return harmonic_mean(a, b, spec.v);
    case MeanKind::blend: {
      const HermitianMatrix harm = harmonic_mean(a, b, spec.v);
      if (spec.t == 0.0) return harm;
      const HermitianMatrix arith = arithmetic_mean(a, b, spec.v);
      if (spec.t == 1.0) return arith;
      return (1.0 - spec.t) * harm + spec.t * arith;
    }
  }
  throw ConfigError("unknown mean kind");
}

double kantorovich_constant(double h) {
  if (!(h >= 1.0) || !std::isfinite(h)) {
    throw DomainError("Kantorovich constant needs h = M/m >= 1 (got " + std::to_string(h) + ")");
  }
  return (h + 1.0) * (h + 1.0) / (4.0 * h);
}

double specht_ratio(double h) {
  if (!(h >= 1.0) || !std::isfinite(h)) {
    throw DomainError("Specht ratio needs h >= 1 (got " + std::to_string(h) + ")");
  }
  // With L = ln h / (h - 1) = ln h^{1/(h-1)}: S = e^L / (e L) = exp(L - 1) / L.
  const double d = h - 1.0;
  const double log_base = d == 0.0 ? 1.0 : std::log1p(d) / d;
  return std::exp(log_base - 1.0) / log_base;
}

ScalarConstants ScalarConstants::at(double h) {
  return ScalarConstants{h, kantorovich_constant(h), specht_ratio(h)};
}

}  // namespace oplab
