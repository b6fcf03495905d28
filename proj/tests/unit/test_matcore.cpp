#include <doctest.h>

#include <cmath>

#include "oplab/error.hpp"
#include "oplab/harness.hpp"
#include "oplab/linalg.hpp"

using namespace oplab;
using doctest::Approx;

namespace {

const Complex I{0.0, 1.0};

double dist(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).frobenius_norm(); }
double dist(const HermitianMatrix& a, const HermitianMatrix& b) { return dist(a.matrix(), b.matrix()); }

}  // namespace

TEST_CASE("eigenvalues of small matrices") {
  SUBCASE("identity") {
    const auto e = eig_hermitian(HermitianMatrix::identity(3));
    for (double l : e.eigenvalues) CHECK(l == Approx(1.0));
  }
  SUBCASE("real symmetric 2x2") {
    const auto e = eig_hermitian(HermitianMatrix{{2, 1}, {1, 2}});
    CHECK(e.min() == Approx(1.0));
    CHECK(e.max() == Approx(3.0));
  }
  SUBCASE("Pauli y") {
    const auto e = eig_hermitian(HermitianMatrix{{0, -I}, {I, 0}});
    CHECK(e.min() == Approx(-1.0));
    CHECK(e.max() == Approx(1.0));
  }
  SUBCASE("1x1") {
    const auto e = eig_hermitian(HermitianMatrix::diagonal({-4.5}));
    CHECK(e.eigenvalues == std::vector<double>{-4.5});
  }
}

TEST_CASE("Hermitian construction") {
  CHECK_THROWS_AS(HermitianMatrix(ComplexMatrix{{1, 2}, {0, 1}}), DomainError);
  CHECK_THROWS_AS(HermitianMatrix(ComplexMatrix{{1, 2, 3}, {2, 1, 0}}), DimensionError);
  const HermitianMatrix h(ComplexMatrix{{1, 1 + 1e-14}, {1, 1}});
  CHECK(h(0, 1) == h(1, 0));
  CHECK(h.hermitian_residual() > 0.0);
  CHECK_THROWS_AS(ComplexMatrix(1, 1, {Complex(NAN, 0)}), DomainError);
}

TEST_CASE("matrix powers") {
  SUBCASE("square root of a diagonal") {
    const auto r = matrix_power(HermitianMatrix::diagonal({1, 4}), 0.5);
    CHECK(dist(r, HermitianMatrix::diagonal({1, 2})) <= 1e-12);
  }
  SUBCASE("inverse") {
    const auto r = matrix_power(HermitianMatrix{{2, 1}, {1, 2}}, -1.0);
    const HermitianMatrix want = (1.0 / 3.0) * HermitianMatrix{{2, -1}, {-1, 2}};
    CHECK(dist(r, want) <= 1e-12);
  }
  SUBCASE("zero power is the identity") {
    CHECK(dist(matrix_power(HermitianMatrix{{2, I}, {-I, 5}}, 0.0), HermitianMatrix::identity(2)) <= 1e-14);
  }
  SUBCASE("fractional power of an indefinite matrix") {
    CHECK_THROWS_AS(matrix_power(HermitianMatrix::diagonal({-1, 2}), 0.5), DomainError);
    CHECK_THROWS_AS(matrix_power(HermitianMatrix::diagonal({0, 2}), -1.0), DomainError);
    CHECK(dist(matrix_power(HermitianMatrix::diagonal({-1, 2}), 2.0), HermitianMatrix::diagonal({1, 4})) <= 1e-12);
  }
  SUBCASE("psd power clamps roundoff") {
    CHECK(dist(psd_power(HermitianMatrix::diagonal({-1e-15, 4}), 0.5), HermitianMatrix::diagonal({0, 2})) <= 1e-12);
    CHECK_THROWS_AS(psd_power(HermitianMatrix::diagonal({-1e-3, 4}), 0.5), DomainError);
  }
}

TEST_CASE("power laws on random positive definite matrices") {
  for (std::size_t i = 0; i < 40; ++i) {
    RngStream rng(derive_seed(3, "power_laws", {i}));
    const std::size_t n = 1 + rng.index(7);
    const HermitianMatrix a = random_hermitian_with_spectrum(n, SpectralBounds(0.1, 30.0), rng, false);
    for (double s : {0.5, 2.0, -1.0}) {
      const auto back = matrix_power(matrix_power(a, s), 1.0 / s);
      CHECK(dist(back, a) <= 1e-8 * a.matrix().frobenius_norm());
    }
  }
}

TEST_CASE("eigendecomposition reconstructs the input") {
  for (std::size_t i = 0; i < 30; ++i) {
    RngStream rng(derive_seed(5, "reconstruct", {i}));
    const std::size_t n = 1 + rng.index(12);
    const HermitianMatrix a = random_hermitian(n, rng);
    const auto e = eig_hermitian(a);
    const HermitianMatrix back = hermitian_from_spectrum(e.eigenvectors, e.eigenvalues);
    CHECK(dist(back, a) <= 1e-10 * std::max(1.0, a.matrix().frobenius_norm()));
    const auto qq = e.eigenvectors.adjoint() * e.eigenvectors;
    CHECK(dist(qq, ComplexMatrix::identity(n)) <= 1e-12 * n);
    for (std::size_t j = 1; j < n; ++j) CHECK(e.eigenvalues[j - 1] <= e.eigenvalues[j]);
  }
}

TEST_CASE("operator norm") {
  CHECK(operator_norm(ComplexMatrix{{1, 0}, {0, -3}}) == Approx(3.0));
  CHECK(operator_norm(ComplexMatrix{{0, 2}, {0, 0}}) == Approx(2.0));
  CHECK(operator_norm(ComplexMatrix::identity(4)) == Approx(1.0));
  CHECK(operator_norm(HermitianMatrix::diagonal({1, -3})) == Approx(3.0));
  CHECK(operator_norm(ComplexMatrix{{1, 2, 2}}) == Approx(3.0));
}

TEST_CASE("absolute value") {
  CHECK(dist(abs_value(ComplexMatrix{{-2, 0}, {0, 3}}), HermitianMatrix::diagonal({2, 3})) <= 1e-12);
  CHECK(dist(abs_value(ComplexMatrix{{0, 2}, {0, 0}}), HermitianMatrix::diagonal({0, 2})) <= 1e-12);
}

TEST_CASE("Loewner comparison") {
  const auto r1 = loewner_leq(HermitianMatrix::identity(2), HermitianMatrix::scalar(2, 2.0));
  CHECK(r1.holds);
  CHECK(r1.margin == Approx(1.0));
  const auto r2 = loewner_leq(HermitianMatrix{{2, 1}, {1, 2}}, HermitianMatrix::scalar(2, 3.0));
  CHECK(r2.holds);
  CHECK(std::abs(r2.margin) <= 1e-12);
  const auto r3 = loewner_leq(HermitianMatrix::diagonal({1, 2}), HermitianMatrix::diagonal({2, 1}));
  CHECK_FALSE(r3.holds);
  CHECK(r3.margin == Approx(-1.0));
  CHECK_THROWS_AS(loewner_leq(HermitianMatrix::identity(2), HermitianMatrix::identity(3)), DimensionError);
}

TEST_CASE("spectral enclosure") {
  CHECK(spectrum_in_bounds(HermitianMatrix::diagonal({1, 2}), SpectralBounds(1, 2)));
  CHECK_FALSE(spectrum_in_bounds(HermitianMatrix::diagonal({1, 2}), SpectralBounds(1.5, 2)));
  CHECK(spectrum_in_bounds(HermitianMatrix{{2, 1}, {1, 2}}, SpectralBounds(1, 3)));
  CHECK_THROWS_AS(SpectralBounds(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(SpectralBounds(2.0, 1.0), DomainError);
  CHECK(SpectralBounds(2.0, 5.0).h() == Approx(2.5));
}

TEST_CASE("tolerance policy") {
  const TolPolicy t;
  CHECK(t.tolerance(0.5) == Approx(1e-10 + 1e-9));
  CHECK(t.tolerance(100.0) == Approx(1e-10 + 1e-7));
  CHECK_THROWS_AS((TolPolicy{-1.0, 1e-9}.validate()), ConfigError);
  CHECK_THROWS_AS((TolPolicy{1e-10, INFINITY}.validate()), ConfigError);
}

TEST_CASE("gram and congruence are Hermitian by construction") {
  RngStream rng(11);
  const ComplexMatrix x = random_gaussian(5, 3, rng);
  const HermitianMatrix g = gram(x);
  CHECK(g.dim() == 3);
  CHECK(dist(g.matrix(), x.adjoint() * x) <= 1e-12);
  const HermitianMatrix c = random_hermitian(5, rng);
  CHECK(dist(congruence(x, c).matrix(), x.adjoint() * (c * x)) <= 1e-12);
  const ComplexMatrix q = orthonormalize_columns(x);
  CHECK(dist(q.adjoint() * q, ComplexMatrix::identity(3)) <= 1e-13);
  CHECK_THROWS_AS(orthonormalize_columns(ComplexMatrix{{1, 1}, {1, 1}}), DomainError);
}

TEST_CASE("convergence failure carries the residual") {
  RngStream rng(13);
  const HermitianMatrix a = random_hermitian(6, rng);
  try {
    (void)eig_hermitian(a, EigOptions{1e-30, 1, nullptr});
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.residual() > 0.0);
    CHECK(e.sweeps() == 1);
  }
}
