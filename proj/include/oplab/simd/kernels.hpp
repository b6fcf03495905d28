#pragma once

// Complex BLAS-1 style inner loops used by every dense routine in the library.
//
// Each kernel exists as a scalar reference implementation and, on x86-64, as
// an AVX2+FMA variant. The active table is chosen once per process from the
// CPU feature bits; the environment variable OPLAB_SIMD=scalar|avx2 forces a
// level (an unavailable level falls back to scalar).

#include <complex>
#include <cstddef>

namespace oplab::simd {

using Complex = std::complex<double>;

enum class Level { scalar, avx2 };

struct KernelTable {
  Level level;
  const char* name;
  // y[i] += a * x[i]
  void (*caxpy)(std::size_t n, Complex a, const Complex* x, Complex* y);
  // (x[i], y[i]) <- (a*x[i] + b*y[i], c*x[i] + d*y[i])
  void (*crot)(std::size_t n, Complex a, Complex b, Complex c, Complex d,
               Complex* x, Complex* y);
  // sum_i conj(x[i]) * y[i]
  Complex (*cdotc)(std::size_t n, const Complex* x, const Complex* y);
  // sum_i |x[i]|^2
  double (*cnorm2)(std::size_t n, const Complex* x);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

const KernelTable& active_kernels();

}  // namespace oplab::simd
