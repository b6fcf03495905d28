// Compiled with -mavx2 -mfma. Nothing in this file may run before
// avx2_supported() has returned true.
#include "oplab/simd/kernels.hpp"

#include <immintrin.h>

namespace oplab::simd::detail {
namespace {

// std::complex<double> is layout-compatible with double[2]; one __m256d holds
// two complex numbers as [re0, im0, re1, im1].
inline const double* as_doubles(const Complex* p) {
  return reinterpret_cast<const double*>(p);
}
inline double* as_doubles(Complex* p) { return reinterpret_cast<double*>(p); }

// (ar + i ai) * x for a packed pair x.
inline __m256d cmul(__m256d ar, __m256d ai, __m256d x) {
  const __m256d xs = _mm256_permute_pd(x, 0b0101);
  return _mm256_fmaddsub_pd(ar, x, _mm256_mul_pd(ai, xs));
}

void caxpy_avx2(std::size_t n, Complex a, const Complex* x, Complex* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  const double* xd = as_doubles(x);
  double* yd = as_doubles(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, cmul(ar, ai, xv)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void crot_avx2(std::size_t n, Complex a, Complex b, Complex c, Complex d,
               Complex* x, Complex* y) {
  const __m256d ar = _mm256_set1_pd(a.real()), ai = _mm256_set1_pd(a.imag());
  const __m256d br = _mm256_set1_pd(b.real()), bi = _mm256_set1_pd(b.imag());
  const __m256d cr = _mm256_set1_pd(c.real()), ci = _mm256_set1_pd(c.imag());
  const __m256d dr = _mm256_set1_pd(d.real()), di = _mm256_set1_pd(d.imag());
  double* xd = as_doubles(x);
  double* yd = as_doubles(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    const __m256d nx = _mm256_add_pd(cmul(ar, ai, xv), cmul(br, bi, yv));
    const __m256d ny = _mm256_add_pd(cmul(cr, ci, xv), cmul(dr, di, yv));
    _mm256_storeu_pd(xd + 2 * i, nx);
    _mm256_storeu_pd(yd + 2 * i, ny);
  }
  for (; i < n; ++i) {
    const Complex xi = x[i];
    const Complex yi = y[i];
    x[i] = a * xi + b * yi;
    y[i] = c * xi + d * yi;
  }
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

Complex cdotc_avx2(std::size_t n, const Complex* x, const Complex* y) {
  // re = sum(xr*yr + xi*yi); im = sum(xr*yi - xi*yr)
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  const double* xd = as_doubles(x);
  const double* yd = as_doubles(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
    acc_im = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0b0101), acc_im);
  }
  // acc_im lanes hold [xr*yi, xi*yr, ...]; the imaginary part is even - odd.
  alignas(32) double im_lanes[4];
  _mm256_store_pd(im_lanes, acc_im);
  Complex acc{hsum(acc_re), (im_lanes[0] - im_lanes[1]) + (im_lanes[2] - im_lanes[3])};
  for (; i < n; ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

double cnorm2_avx2(std::size_t n, const Complex* x) {
  __m256d acc = _mm256_setzero_pd();
  const double* xd = as_doubles(x);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    acc = _mm256_fmadd_pd(xv, xv, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += std::norm(x[i]);
  return s;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Level::avx2, "avx2", caxpy_avx2,
                                 crot_avx2,   cdotc_avx2, cnorm2_avx2};
  return table;
}

}  // namespace oplab::simd::detail
