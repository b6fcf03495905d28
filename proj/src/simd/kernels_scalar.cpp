#include "oplab/simd/kernels.hpp"

namespace oplab::simd {
namespace {

void caxpy_scalar(std::size_t n, Complex a, const Complex* x, Complex* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void crot_scalar(std::size_t n, Complex a, Complex b, Complex c, Complex d,
                 Complex* x, Complex* y) {
  for (std::size_t i = 0; i < n; ++i) {
    const Complex xi = x[i];
    const Complex yi = y[i];
    x[i] = a * xi + b * yi;
    y[i] = c * xi + d * yi;
  }
}

Complex cdotc_scalar(std::size_t n, const Complex* x, const Complex* y) {
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

double cnorm2_scalar(std::size_t n, const Complex* x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::norm(x[i]);
  return acc;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Level::scalar, "scalar", caxpy_scalar,
                                 crot_scalar,   cdotc_scalar, cnorm2_scalar};
  return table;
}

}  // namespace oplab::simd
