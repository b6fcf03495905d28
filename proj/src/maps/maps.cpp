#include "oplab/maps.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oplab/error.hpp"
#include "oplab/linalg.hpp"

namespace oplab {

KrausMap KrausMap::from_kraus(std::vector<ComplexMatrix> ops) {
  if (ops.empty()) throw DomainError("a Kraus family needs at least one operator");
  const std::size_t in = ops.front().rows();
  const std::size_t out = ops.front().cols();
  if (in == 0 || out == 0) throw DimensionError("Kraus operators must be non-empty");
  for (const auto& v : ops) {
    if (v.rows() != in || v.cols() != out) {
      throw DimensionError("inconsistent Kraus operator shapes");
    }
    if (!v.all_finite()) throw DomainError("Kraus operator has non-finite entries");
  }
  HermitianMatrix sum = HermitianMatrix::scalar(out, 0.0);
  for (const auto& v : ops) sum += gram(v);
  const double residual = (sum - HermitianMatrix::identity(out)).matrix().frobenius_norm();
  if (!(residual <= 1e-8)) {
    throw DomainError("Kraus family is not unital: ||sum V*V - I||_F = " + std::to_string(residual));
  }
  KrausMap phi;
  phi.in_dim_ = in;
  phi.out_dim_ = out;
  phi.ops_ = std::move(ops);
  phi.unitality_residual_ = residual;
  return phi;
}

KrausMap identity_map(std::size_t n) { return KrausMap::from_kraus({ComplexMatrix::identity(n)}); }

KrausMap normalized_trace_map(std::size_t n) {
  if (n == 0) throw DimensionError("normalized_trace_map needs n >= 1");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<ComplexMatrix> ops;
  ops.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      ComplexMatrix e(n, n);
      e(i, j) = scale;
      ops.push_back(std::move(e));
    }
  }
  return KrausMap::from_kraus(std::move(ops));
}

KrausMap compression_map(const ComplexMatrix& isometry) { return KrausMap::from_kraus({isometry}); }

HermitianMatrix apply(const KrausMap& phi, const HermitianMatrix& a) {
  if (a.dim() != phi.in_dim()) {
    throw DimensionError("map input dimension " + std::to_string(phi.in_dim()) +
                         " does not match matrix dimension " + std::to_string(a.dim()));
  }
  HermitianMatrix out = HermitianMatrix::scalar(phi.out_dim(), 0.0);
  for (const auto& v : phi.kraus_ops()) out += congruence(v, a);
  return out;
}

ComplexMatrix apply(const KrausMap& phi, const ComplexMatrix& a) {
  if (a.rows() != phi.in_dim() || a.cols() != phi.in_dim()) {
    throw DimensionError("map input dimension " + std::to_string(phi.in_dim()) +
                         " does not match matrix shape " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
  }
  ComplexMatrix out(phi.out_dim(), phi.out_dim());
  for (const auto& v : phi.kraus_ops()) out += v.adjoint() * (a * v);
  return out;
}

ChoiCertificate choi_certificate(std::size_t in_dim, const LinearMap& phi) {
  std::size_t out_dim = 0;
  ComplexMatrix choi;
  for (std::size_t i = 0; i < in_dim; ++i) {
    for (std::size_t j = 0; j < in_dim; ++j) {
      ComplexMatrix e(in_dim, in_dim);
      e(i, j) = 1.0;
      const ComplexMatrix block = phi(e);
      if (choi.empty()) {
        out_dim = block.rows();
        choi = ComplexMatrix(in_dim * out_dim, in_dim * out_dim);
      }
      if (block.rows() != out_dim || block.cols() != out_dim) {
        throw DimensionError("linear map returned an inconsistent shape");
      }
      for (std::size_t r = 0; r < out_dim; ++r)
        for (std::size_t c = 0; c < out_dim; ++c) choi(i * out_dim + r, j * out_dim + c) = block(r, c);
    }
  }
  ChoiCertificate cert;
  cert.choi = HermitianMatrix(choi);
  const EigenDecomposition eig = eig_hermitian(cert.choi);
  cert.min_eigenvalue = eig.min();
  const double scale = std::max({1.0, std::abs(eig.min()), std::abs(eig.max())});
  cert.is_cp = cert.min_eigenvalue >= -1e-10 * scale;
  return cert;
}

ChoiCertificate choi_certificate(const KrausMap& phi) {
  return choi_certificate(phi.in_dim(), [&phi](const ComplexMatrix& e) { return apply(phi, e); });
}

}  // namespace oplab
