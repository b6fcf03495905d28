#pragma once

#include <string>
#include <string_view>

#include "oplab/matrix.hpp"

namespace oplab {

enum class MeanKind { arithmetic, geometric, harmonic, blend };

std::string_view to_string(MeanKind kind);
MeanKind parse_mean_kind(std::string_view name);  // ConfigError on unknown names

// Weighted operator mean. `blend` is (1 - t) (A !_v B) + t (A nabla_v B): a
// convex combination of the harmonic and arithmetic means, so every member
// sits between them in the Loewner order. `t` is ignored for the other kinds.
struct MeanSpec {
  MeanKind kind = MeanKind::geometric;
  double v = 0.5;
  double t = 0.0;

  // ConfigError unless v, t lie in [0, 1].
  void validate() const;
  // "kind:v" or "kind:v:t", e.g. "blend:0.5:0.25".
  static MeanSpec parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const MeanSpec&, const MeanSpec&) = default;
};

HermitianMatrix arithmetic_mean(const HermitianMatrix& a, const HermitianMatrix& b, double v);
HermitianMatrix geometric_mean(const HermitianMatrix& a, const HermitianMatrix& b, double v);
HermitianMatrix harmonic_mean(const HermitianMatrix& a, const HermitianMatrix& b, double v);

// A, B must be positive definite and of equal dimension.
HermitianMatrix mean(const MeanSpec& spec, const HermitianMatrix& a, const HermitianMatrix& b);

// K(h) = (h + 1)^2 / (4h); DomainError for h < 1.
double kantorovich_constant(double h);

// S(h) = h^{1/(h-1)} / (e ln h^{1/(h-1)}), with S(1) = 1.
double specht_ratio(double h);

struct ScalarConstants {
  double h = 1.0;
  double kantorovich = 1.0;
  double specht = 1.0;

  static ScalarConstants at(double h);
};

}  // namespace oplab
