#pragma once

#include <functional>
#include <vector>

#include "oplab/matrix.hpp"
#include "oplab/simd/kernels.hpp"

namespace oplab {

struct EigOptions {
  // Converged once the off-diagonal Frobenius mass is <= rel_tol * ||A||_F.
  double rel_tol = 1e-13;
  int max_sweeps = 100;
  // nullptr selects simd::active_kernels().
  const simd::KernelTable* kernels = nullptr;
};

struct EigenDecomposition {
  std::size_t dim = 0;
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // unitary, column j pairs with eigenvalues[j]
  int sweeps = 0;
  double off_diagonal = 0.0;        // final off-diagonal Frobenius mass

  double min() const { return eigenvalues.front(); }
  double max() const { return eigenvalues.back(); }
};

// Cyclic complex Jacobi. Throws ConvergenceError (carrying the off-diagonal
// residual) when max_sweeps is exhausted.
EigenDecomposition eig_hermitian(const HermitianMatrix& a, const EigOptions& opts = {});

// Q f(Lambda) Q*, Hermitian by construction.
HermitianMatrix spectral_apply(const EigenDecomposition& eig,
                               const std::function<double(double)>& f);

// Smallest eigenvalue accepted as "positive definite" for negative or
// fractional powers: 1e-12 * max(1, lambda_max).
double pd_floor(double lambda_max);

// A^s by spectral calculus. Negative or non-integer s requires A positive
// definite (min eigenvalue > pd_floor), otherwise DomainError. s == 0 gives I.
HermitianMatrix matrix_power(const HermitianMatrix& a, double s, const EigOptions& opts = {});
HermitianMatrix matrix_power(const EigenDecomposition& eig, double s);

// A^s for s > 0 on a positive semidefinite A; eigenvalues in
// [-pd_floor, 0) are treated as roundoff and clamped to zero.
HermitianMatrix psd_power(const HermitianMatrix& a, double s, const EigOptions& opts = {});

// Largest singular value, sqrt(lambda_max(X*X)).
double operator_norm(const ComplexMatrix& x);
// max |lambda| for Hermitian input.
double operator_norm(const HermitianMatrix& a);

// |X| = (X*X)^{1/2}.
HermitianMatrix abs_value(const ComplexMatrix& x);

double lambda_min(const HermitianMatrix& a, const EigOptions& opts = {});
double lambda_max(const HermitianMatrix& a, const EigOptions& opts = {});

struct LoewnerResult {
  bool holds = false;
  double margin = 0.0;  // lambda_min(B - A)
  double tol = 0.0;
};

// A <= B in the Loewner order, within tol.tolerance(max(||A||, ||B||)).
LoewnerResult loewner_leq(const HermitianMatrix& a, const HermitianMatrix& b,
                          const TolPolicy& tol = {});

bool spectrum_in_bounds(const HermitianMatrix& a, const SpectralBounds& bounds,
                        const TolPolicy& tol = {});

// X* X and W* C W, computed on the upper triangle and mirrored.
HermitianMatrix gram(const ComplexMatrix& x);
HermitianMatrix congruence(const ComplexMatrix& w, const HermitianMatrix& c);

// G + G*.
HermitianMatrix hermitian_sum(const ComplexMatrix& g);

// Modified Gram-Schmidt with one reorthogonalization pass. Throws DomainError
// when the columns are numerically dependent.
ComplexMatrix orthonormalize_columns(const ComplexMatrix& x);

}  // namespace oplab
