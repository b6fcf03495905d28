#include "oplab/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oplab/error.hpp"
#include "oplab/simd/kernels.hpp"

namespace oplab {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, Complex{0.0, 0.0}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw DimensionError("matrix entry count " + std::to_string(entries_.size()) +
                         " does not match " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
  }
  if (!all_finite()) throw DomainError("matrix has non-finite entries");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged matrix initializer");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
  if (!all_finite()) throw DomainError("matrix has non-finite entries");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
  ComplexMatrix out(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) out(i, i) = diag[i];
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

double ComplexMatrix::frobenius_norm() const {
  return std::sqrt(simd::active_kernels().cnorm2(entries_.size(), entries_.data()));
}

double ComplexMatrix::max_abs() const {
  double out = 0.0;
  for (const auto& z : entries_) out = std::max(out, std::abs(z));
  return out;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionError("matrix sum shape mismatch");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw DimensionError("matrix difference shape mismatch");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (auto& z : entries_) z *= s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matrix product shape mismatch: " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " * " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
  const auto& k = simd::active_kernels();
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex* out = c.row(i).data();
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const Complex s = a(i, l);
      if (s != Complex{0.0, 0.0}) k.caxpy(b.cols(), s, b.row(l).data(), out);
    }
  }
  return c;
}

// --- HermitianMatrix -------------------------------------------------------

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m) : m_(m) {
  if (!m.is_square()) throw DimensionError("Hermitian matrix must be square");
  const std::size_t n = m.rows();
  double residual = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      residual = std::max(residual, std::abs(m(i, j) - std::conj(m(j, i))));
  const double limit = 1e-12 * (1.0 + m.max_abs());
  if (!(residual <= limit)) {
    throw DomainError("matrix is not Hermitian: residual " + std::to_string(residual));
  }
  for (std::size_t i = 0; i < n; ++i) {
    m_(i, i) = m(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
      m_(i, j) = avg;
      m_(j, i) = std::conj(avg);
    }
  }
  residual_ = residual;
}

HermitianMatrix::HermitianMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : HermitianMatrix(ComplexMatrix(rows)) {}

HermitianMatrix HermitianMatrix::identity(std::size_t n) { return scalar(n, 1.0); }

HermitianMatrix HermitianMatrix::scalar(std::size_t n, double c) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = c;
  return from_upper(std::move(m));
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> diag) {
  return from_upper(ComplexMatrix::diagonal(diag));
}

HermitianMatrix HermitianMatrix::diagonal(std::initializer_list<double> diag) {
  return diagonal(std::span<const double>(diag.begin(), diag.size()));
}

HermitianMatrix HermitianMatrix::from_upper(ComplexMatrix m) {
  if (!m.is_square()) throw DimensionError("Hermitian matrix must be square");
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = m(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) m(j, i) = std::conj(m(i, j));
  }
  HermitianMatrix out;
  out.m_ = std::move(m);
  return out;
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& other) {
  m_ += other.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator-=(const HermitianMatrix& other) {
  m_ -= other.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }

ComplexMatrix operator*(const HermitianMatrix& a, const HermitianMatrix& b) {
  return a.matrix() * b.matrix();
}
ComplexMatrix operator*(const ComplexMatrix& a, const HermitianMatrix& b) { return a * b.matrix(); }
ComplexMatrix operator*(const HermitianMatrix& a, const ComplexMatrix& b) { return a.matrix() * b; }

// --- SpectralBounds / TolPolicy -------------------------------------------

SpectralBounds::SpectralBounds(double m, double M) : m_(m), M_(M) {
  if (!(std::isfinite(m) && std::isfinite(M)) || !(m > 0.0) || !(M >= m)) {
    throw DomainError("spectral bounds require 0 < m <= M (got m=" + std::to_string(m) +
                      ", M=" + std::to_string(M) + ")");
  }
  h_ = M_ / m_;
}

double TolPolicy::tolerance(double scale) const { return abs + rel * std::max(1.0, scale); }

void TolPolicy::validate() const {
  if (!(std::isfinite(abs) && abs >= 0.0) || !(std::isfinite(rel) && rel >= 0.0)) {
    throw ConfigError("tolerance policy components must be finite and non-negative (abs=" +
                      std::to_string(abs) + ", rel=" + std::to_string(rel) + ")");
  }
}

}  // namespace oplab
