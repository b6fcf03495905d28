#pragma once

// Report builders shared by the check implementations.

#include <optional>
#include <string>

#include "oplab/inequalities.hpp"
#include "oplab/linalg.hpp"

namespace oplab::detail {

struct ReportContext {
  const CheckParams& params;
  const InstanceFingerprint& fingerprint;
};

// LHS <= RHS in the Loewner order. `whitening`, when given, is RHS^{-1/2}
// computed from a better-conditioned factorization than RHS itself.
InequalityReport order_report(std::string id, const HermitianMatrix& lhs, const HermitianMatrix& rhs,
                              const std::optional<HermitianMatrix>& whitening,
                              const ReportContext& ctx);

// ||LHS|| <= bound.
InequalityReport norm_report(std::string id, double value, double bound, const ReportContext& ctx);

// value compared with bound, no verdict.
InequalityReport ratio_report(std::string id, double value, double bound, const ReportContext& ctx);

}  // namespace oplab::detail
