#pragma once

#include <functional>
#include <vector>

#include "oplab/matrix.hpp"

namespace oplab {

// Unital completely positive map Phi(A) = sum_i V_i* A V_i with
// sum_i V_i* V_i = I. Each Kraus operator is in_dim x out_dim.
class KrausMap {
 public:
  // Empty map; apply() rejects every operand.
  KrausMap() = default;

  // Fails with DomainError when ||sum V_i* V_i - I||_F exceeds 1e-8.
  static KrausMap from_kraus(std::vector<ComplexMatrix> ops);

  std::size_t in_dim() const noexcept { return in_dim_; }
  std::size_t out_dim() const noexcept { return out_dim_; }
  const std::vector<ComplexMatrix>& kraus_ops() const noexcept { return ops_; }
  double unitality_residual() const noexcept { return unitality_residual_; }

 private:

  std::size_t in_dim_ = 0;
  std::size_t out_dim_ = 0;
  std::vector<ComplexMatrix> ops_;
  double unitality_residual_ = 0.0;
};

inline KrausMap from_kraus(std::vector<ComplexMatrix> ops) {
  return KrausMap::from_kraus(std::move(ops));
}

KrausMap identity_map(std::size_t n);

// Phi(A) = (tr A / n) I, from the n^2 Kraus operators E_ij / sqrt(n).
KrausMap normalized_trace_map(std::size_t n);

// Compression A -> V* A V for an isometry V (in_dim x out_dim, V*V = I).
KrausMap compression_map(const ComplexMatrix& isometry);

HermitianMatrix apply(const KrausMap& phi, const HermitianMatrix& a);
ComplexMatrix apply(const KrausMap& phi, const ComplexMatrix& a);

struct ChoiCertificate {
  HermitianMatrix choi;
  double min_eigenvalue = 0.0;
  bool is_cp = false;
};

// Choi matrix sum_ij E_ij (x) Phi(E_ij), is_cp iff its minimum eigenvalue is
// >= -1e-10 * max(1, ||choi||).
ChoiCertificate choi_certificate(const KrausMap& phi);

// Same certificate for any linear map given as a function; used to show that
// maps outside Kraus form (e.g. the transpose) are rejected.
using LinearMap = std::function<ComplexMatrix(const ComplexMatrix&)>;
ChoiCertificate choi_certificate(std::size_t in_dim, const LinearMap& phi);

}  // namespace oplab
