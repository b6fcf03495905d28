#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace oplab {

using Complex = std::complex<double>;

// Dense complex matrix, row-major. Entries are finite; the constructors that
// accept external data reject NaN/Inf.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return entries_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  std::span<Complex> row(std::size_t i) { return {entries_.data() + i * cols_, cols_}; }
  std::span<const Complex> row(std::size_t i) const {
    return {entries_.data() + i * cols_, cols_};
  }
  std::span<const Complex> entries() const noexcept { return entries_; }
  Complex* data() noexcept { return entries_.data(); }
  const Complex* data() const noexcept { return entries_.data(); }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;

  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex s);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

// Square complex matrix verified to be Hermitian.
//
// Construction from a general matrix measures the asymmetry
// max |a_ij - conj(a_ji)|, rejects anything above 1e-12 * (1 + max|a_ij|),
// and stores the exact Hermitian part (A + A*)/2.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const ComplexMatrix& m);
  HermitianMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static HermitianMatrix identity(std::size_t n);
  static HermitianMatrix scalar(std::size_t n, double c);
  static HermitianMatrix diagonal(std::span<const double> diag);
  static HermitianMatrix diagonal(std::initializer_list<double> diag);
  // Mirrors the upper triangle (diagonal real part kept); the lower triangle of
  // `m` is ignored. For results that are Hermitian by construction.
  static HermitianMatrix from_upper(ComplexMatrix m);

  std::size_t dim() const noexcept { return m_.rows(); }
  const Complex& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  double hermitian_residual() const noexcept { return residual_; }

  HermitianMatrix& operator+=(const HermitianMatrix& other);
  HermitianMatrix& operator-=(const HermitianMatrix& other);
  HermitianMatrix& operator*=(double s);

  friend bool operator==(const HermitianMatrix& a, const HermitianMatrix& b) {
    return a.m_ == b.m_;
  }

 private:
  ComplexMatrix m_;
  double residual_ = 0.0;
};

HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b);
HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b);
HermitianMatrix operator*(double s, HermitianMatrix a);
ComplexMatrix operator*(const HermitianMatrix& a, const HermitianMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const HermitianMatrix& b);
ComplexMatrix operator*(const HermitianMatrix& a, const ComplexMatrix& b);

// Spectral enclosure 0 < m <= M with h = M / m.
class SpectralBounds {
 public:
  SpectralBounds() = default;
  SpectralBounds(double m, double M);

  double m() const noexcept { return m_; }
  double M() const noexcept { return M_; }
  double h() const noexcept { return h_; }

  friend bool operator==(const SpectralBounds&, const SpectralBounds&) = default;

 private:
  double m_ = 1.0;
  double M_ = 1.0;
  double h_ = 1.0;
};

// Tolerance used by every order and norm comparison:
// tol = abs + rel * max(1, scale).
struct TolPolicy {
  double abs = 1e-10;
  double rel = 1e-9;

  double tolerance(double scale) const;
  // Throws ConfigError on negative or non-finite components.
  void validate() const;

  friend bool operator==(const TolPolicy&, const TolPolicy&) = default;
};

}  // namespace oplab
