#include <doctest.h>

#include <random>
#include <vector>

#include "oplab/harness.hpp"
#include "oplab/linalg.hpp"
#include "oplab/simd/kernels.hpp"

using namespace oplab;
using oplab::simd::KernelTable;

namespace {

std::vector<Complex> random_vector(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<Complex> v(n);
  for (auto& z : v) z = rng.complex_normal();
  return v;
}

double max_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("scalar table is always available") {
  const KernelTable& s = simd::scalar_kernels();
  CHECK(s.level == simd::Level::scalar);
  std::vector<Complex> x{{1, 2}, {3, -1}};
  CHECK(s.cnorm2(2, x.data()) == doctest::Approx(15.0));
  const Complex d = s.cdotc(2, x.data(), x.data());
  CHECK(d.real() == doctest::Approx(15.0));
  CHECK(d.imag() == doctest::Approx(0.0));
}

TEST_CASE("avx2 kernels agree with the scalar reference at every tail length") {
  const KernelTable* avx = simd::avx2_kernels();
  if (avx == nullptr) {
    MESSAGE("AVX2 variant unavailable on this machine");
    return;
  }
  const KernelTable& ref = simd::scalar_kernels();
  const Complex a{0.7, -1.3}, b{-0.2, 0.4}, c{1.1, 0.05}, d{0.3, -0.9};
  for (std::size_t n = 0; n <= 17; ++n) {
    CAPTURE(n);
    const auto x = random_vector(n, 100 + n);
    const auto y = random_vector(n, 200 + n);

    auto y1 = y, y2 = y;
    ref.caxpy(n, a, x.data(), y1.data());
    avx->caxpy(n, a, x.data(), y2.data());
    CHECK(max_diff(y1, y2) <= 1e-14);

    auto x1 = x, x2 = x;
    y1 = y;
    y2 = y;
    ref.crot(n, a, b, c, d, x1.data(), y1.data());
    avx->crot(n, a, b, c, d, x2.data(), y2.data());
    CHECK(max_diff(x1, x2) <= 1e-14);
    CHECK(max_diff(y1, y2) <= 1e-14);

    const double scale = 1.0 + static_cast<double>(n);
    CHECK(std::abs(ref.cdotc(n, x.data(), y.data()) - avx->cdotc(n, x.data(), y.data())) <= 1e-13 * scale);
    CHECK(std::abs(ref.cnorm2(n, x.data()) - avx->cnorm2(n, x.data())) <= 1e-13 * scale);
  }
}

TEST_CASE("eigensolver gives the same spectrum with either kernel table") {
  const KernelTable* avx = simd::avx2_kernels();
  if (avx == nullptr) return;
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 13u}) {
    RngStream rng(derive_seed(7, "kernels", {n}));
    const HermitianMatrix a = random_hermitian(n, rng);
    const auto e1 = eig_hermitian(a, EigOptions{1e-13, 100, &simd::scalar_kernels()});
    const auto e2 = eig_hermitian(a, EigOptions{1e-13, 100, avx});
    REQUIRE(e1.eigenvalues.size() == n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(e1.eigenvalues[i] == doctest::Approx(e2.eigenvalues[i]).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("active table is one of the compiled variants") {
  const KernelTable& active = simd::active_kernels();
  CHECK((active.level == simd::Level::scalar || active.level == simd::Level::avx2));
}
