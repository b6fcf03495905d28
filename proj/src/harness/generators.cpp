#include <algorithm>
#include <cmath>

#include "oplab/error.hpp"
#include "oplab/harness.hpp"

namespace oplab {

ComplexMatrix random_gaussian(std::size_t rows, std::size_t cols, RngStream& rng) {
  ComplexMatrix g(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) g(i, j) = rng.complex_normal();
  }
  return g;
}

ComplexMatrix random_unitary(std::size_t n, RngStream& rng) {
  return orthonormalize_columns(random_gaussian(n, n, rng));
}

HermitianMatrix hermitian_from_spectrum(const ComplexMatrix& q, std::span<const double> lambda) {
  if (q.rows() != lambda.size() || q.cols() != lambda.size()) {
    throw DimensionError("frame and spectrum sizes differ");
  }
  const std::size_t n = lambda.size();
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t l = 0; l < n; ++l) s += q(i, l) * lambda[l] * std::conj(q(j, l));
      out(i, j) = s;
    }
  }
  return HermitianMatrix::from_upper(std::move(out));
}

HermitianMatrix random_hermitian_with_spectrum(std::size_t n, const SpectralBounds& bounds,
                                               RngStream& rng, bool pinned) {
  if (n == 0) throw DimensionError("dimension must be at least 1");
  const double m = bounds.m(), M = bounds.M();
  std::vector<double> lambda(n);
  for (auto& l : lambda) l = rng.uniform(m, M);
  if (pinned) {
    lambda[0] = m;
    if (n >= 2) lambda[n - 1] = M;
  }
  if (n == 1) return HermitianMatrix::diagonal(lambda);
  return hermitian_from_spectrum(random_unitary(n, rng), lambda);
}

HermitianMatrix random_hermitian(std::size_t n, RngStream& rng) {
  const ComplexMatrix g = random_gaussian(n, n, rng);
  return 0.5 * hermitian_sum(g);
}

HermitianMatrix random_psd(std::size_t n, RngStream& rng) {
  const std::size_t r = 1 + rng.index(n);
  HermitianMatrix out = gram(random_gaussian(r, n, rng));
  out *= 1.0 / static_cast<double>(n);
  return out;
}

KrausMap random_unital_cp_map(std::size_t in_dim, std::size_t k_env, RngStream& rng,
                              std::size_t out_dim) {
  if (out_dim == 0) out_dim = in_dim;
  if (in_dim == 0 || k_env == 0) throw DimensionError("map dimensions must be positive");
  if (in_dim * k_env < out_dim) throw DimensionError("Kraus stack has fewer rows than columns");
  const ComplexMatrix stack = orthonormalize_columns(random_gaussian(in_dim * k_env, out_dim, rng));
  std::vector<ComplexMatrix> ops;
  ops.reserve(k_env);
  for (std::size_t e = 0; e < k_env; ++e) {
    ComplexMatrix v(in_dim, out_dim);
    for (std::size_t i = 0; i < in_dim; ++i) {
      for (std::size_t j = 0; j < out_dim; ++j) v(i, j) = stack(e * in_dim + i, j);
    }
    ops.push_back(std::move(v));
  }
  return KrausMap::from_kraus(std::move(ops));
}

IsometryPair random_isometry_pair(std::size_t n, std::size_t k, RngStream& rng) {
  if (k == 0 || 2 * k > n) throw DomainError("isometry pair needs 1 <= k and 2k <= n");
  const ComplexMatrix q = orthonormalize_columns(random_gaussian(n, 2 * k, rng));
  ComplexMatrix x(n, k), y(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      x(i, j) = q(i, j);
      y(i, j) = q(i, k + j);
    }
  }
  return IsometryPair(std::move(x), std::move(y));
}

ComplexMatrix unitary_exp(const HermitianMatrix& h) {
  const EigenDecomposition e = eig_hermitian(h);
  const std::size_t n = h.dim();
  const ComplexMatrix& q = e.eigenvectors;
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        s += q(i, l) * std::polar(1.0, e.eigenvalues[l]) * std::conj(q(j, l));
      }
      out(i, j) = s;
    }
  }
  return out;
}

}  // namespace oplab
