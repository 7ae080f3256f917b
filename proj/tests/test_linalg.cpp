#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pdflow/linalg.hpp"

using namespace pdflow;

namespace {

double recomposition_error(const DenseMatrix& tt, const QRFactors& f) {
  return (tt - f.q1 * f.r1).max_norm();
}

double orthogonality_error(const DenseMatrix& q) {
  return (q.transpose() * q - DenseMatrix::identity(q.rows())).max_norm();
}

}  // namespace

TEST_CASE("qr: identity input") {
  const QRFactors f = qr_decompose(DenseMatrix::identity(2));
  CHECK((f.q - DenseMatrix::identity(2)).max_norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((f.r1 - DenseMatrix::identity(2)).max_norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("qr: ones column") {
  const DenseMatrix tt(2, 1, {1.0, 1.0});
  const QRFactors f = qr_decompose(tt);
  CHECK(f.r1(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(f.q1(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(f.q1(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("qr: random 6x3 recomposition") {
  std::mt19937_64 rng(11);
  const DenseMatrix tt = oracles::random_matrix(rng, 6, 3);
  const QRFactors f = qr_decompose(tt);
  CHECK(recomposition_error(tt, f) <= 1e-10 * (1.0 + tt.max_norm()));
  CHECK(orthogonality_error(f.q) <= 1e-10);
}

TEST_CASE("qr: round-trip property on 200 random matrices") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::size_t> rows(1, 12);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = rows(rng);
    std::uniform_int_distribution<std::size_t> cols(1, std::min<std::size_t>(n, 8));
    const std::size_t m = cols(rng);
    DenseMatrix tt = oracles::random_matrix(rng, n, m, -5.0, 5.0);
    // Nudge toward full column rank; rank-deficient draws are rejected below.
    QRFactors f;
    try {
      f = qr_decompose(tt);
    } catch (const RankDeficient&) {
      continue;
    }
    CHECK(recomposition_error(tt, f) <= 1e-10 * (1.0 + tt.max_norm()));
    CHECK(orthogonality_error(f.q) <= 1e-10);
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(f.r1(i, i) >= 0.0);
      for (std::size_t j = 0; j < i; ++j) CHECK(f.r1(i, j) == 0.0);
    }
  }
}

TEST_CASE("qr: rank deficiency diagnosed") {
  DenseMatrix tt(3, 2);
  tt(0, 0) = 1.0;
  tt(1, 0) = 2.0;
  tt(2, 0) = 3.0;
  tt(0, 1) = 2.0;
  tt(1, 1) = 4.0;
  tt(2, 1) = 6.0;
  CHECK_THROWS_AS(qr_decompose(tt), RankDeficient);
  CHECK_THROWS_AS(qr_decompose(DenseMatrix(3, 2)), RankDeficient);
}

TEST_CASE("symmetric_eigen: diagonal input sorted ascending") {
  const SymmetricEigen se = symmetric_eigen(DenseMatrix::diagonal({3.0, 1.0, 2.0}));
  CHECK(se.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(se.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(se.eigenvalues[2] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("symmetric_eigen: path-graph Laplacian spectrum") {
  const DenseMatrix l(3, 3, {1, -1, 0, -1, 2, -1, 0, -1, 1});
  const SymmetricEigen se = symmetric_eigen(l);
  CHECK(se.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(se.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(se.eigenvalues[2] == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("symmetric_eigen: 2x2 closed form") {
  const SymmetricEigen se = symmetric_eigen(DenseMatrix(2, 2, {2, 1, 1, 2}));
  CHECK(se.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(se.eigenvalues[1] == doctest::Approx(3.0));
}

TEST_CASE("symmetric_eigen: rejects asymmetric input") {
  CHECK_THROWS_AS(symmetric_eigen(DenseMatrix(2, 2, {1, 2, 0, 1})), NotSymmetric);
}

TEST_CASE("symmetric_eigen: residual property on random matrices up to 16x16") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> dim(1, 16);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = dim(rng);
    const DenseMatrix s = oracles::random_symmetric(rng, n);
    const SymmetricEigen se = symmetric_eigen(s);
    const DenseMatrix d = DenseMatrix::diagonal(se.eigenvalues);
    CHECK((s * se.eigenvectors - se.eigenvectors * d).max_norm() <=
          1e-9 * std::max(s.max_norm(), 1e-6));
    CHECK(orthogonality_error(se.eigenvectors) <= 1e-10);
    for (std::size_t i = 0; i + 1 < n; ++i)
      CHECK(se.eigenvalues[i] <= se.eigenvalues[i + 1]);
  }
}

TEST_CASE("spectral_abscissa: damped pair") {
  CHECK(spectral_abscissa(DenseMatrix(2, 2, {-1, -1, 1, 0})) ==
        doctest::Approx(-0.5).epsilon(1e-8));
}

TEST_CASE("spectral_abscissa: skew and diagonal") {
  CHECK(spectral_abscissa(DenseMatrix(2, 2, {0, -1, 1, 0})) ==
        doctest::Approx(0.0).epsilon(1e-10));
  CHECK(spectral_abscissa(DenseMatrix::diagonal({-2.0, -3.0})) == doctest::Approx(-2.0));
}

TEST_CASE("spectral_abscissa: agrees with characteristic-polynomial roots") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rep % 6;
    const DenseMatrix a = oracles::random_matrix(rng, n, n, -2.0, 2.0);
    CHECK(spectral_abscissa(a) ==
          doctest::Approx(oracles::abscissa_by_charpoly(a)).epsilon(1e-6));
  }
}

TEST_CASE("spectral_abscissa: similarity invariance") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rep % 5;
    const DenseMatrix a = oracles::random_matrix(rng, n, n, -2.0, 2.0);
    // Random well-conditioned invertible P (diagonal shift keeps it so).
    const DenseMatrix p = oracles::random_matrix(rng, n, n) + 2.0 * DenseMatrix::identity(n);
    // similar = P A P^{-1}: solve X P = P A column-block by transposition.
    const DenseMatrix pa_t = (p * a).transpose();
    const DenseMatrix pt = p.transpose();
    DenseMatrix similar(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      Vector rhs(n);
      for (std::size_t i = 0; i < n; ++i) rhs[i] = pa_t(i, j);
      const Vector col = solve_linear(pt, rhs);
      for (std::size_t i = 0; i < n; ++i) similar(j, i) = col[i];
    }
    CHECK(spectral_abscissa(a) == doctest::Approx(spectral_abscissa(similar)).epsilon(1e-6));
  }
}

TEST_CASE("dense_eigenvalues: full spectrum of companion-style matrix") {
  // s^3 + 2 s^2 + 3 s + 4, roots checked against the polynomial oracle.
  DenseMatrix a(3, 3);
  a(0, 0) = -2.0;
  a(0, 1) = -3.0;
  a(0, 2) = -4.0;
  a(1, 0) = 1.0;
  a(2, 1) = 1.0;
  auto eig = dense_eigenvalues(a);
  auto ref = oracles::poly_roots({1.0, 2.0, 3.0, 4.0});
  for (const Complex& r : ref) {
    double best = 1e300;
    std::size_t at = 0;
    for (std::size_t i = 0; i < eig.size(); ++i)
      if (std::abs(eig[i] - r) < best) {
        best = std::abs(eig[i] - r);
        at = i;
      }
    CHECK(best <= 1e-7);
    eig.erase(eig.begin() + at);
  }
}

TEST_CASE("spectral_abscissa: known spectra at larger sizes") {
  std::mt19937_64 rng(101);
  // Nonsymmetric matrices with an exactly known spectrum via similarity.
  for (const std::size_t n : {20u, 60u}) {
    Vector d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = -3.0 + 5.0 * double(i) / double(n - 1);
    const DenseMatrix p =
        oracles::random_matrix(rng, n, n, -0.5, 0.5) + 2.0 * DenseMatrix::identity(n);
    const DenseMatrix pd = p * DenseMatrix::diagonal(d);
    // A = P D P^{-1} row by row.
    const DenseMatrix pt = p.transpose();
    const DenseMatrix pdt = pd.transpose();
    DenseMatrix a(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      Vector rhs(n);
      for (std::size_t i = 0; i < n; ++i) rhs[i] = pdt(i, j);
      const Vector row = solve_linear(pt, rhs);
      for (std::size_t i = 0; i < n; ++i) a(j, i) = row[i];
    }
    CHECK(spectral_abscissa(a) == doctest::Approx(2.0).epsilon(1e-6));
  }

  // Symmetric input: agrees with the Jacobi route.
  const DenseMatrix s = oracles::random_symmetric(rng, 40);
  CHECK(spectral_abscissa(s) ==
        doctest::Approx(symmetric_eigen(s).eigenvalues.back()).epsilon(1e-7));

  // Block-triangular with rotation blocks: complex pairs with known real parts.
  DenseMatrix b(6, 6);
  const double re[3] = {-2.0, -0.3, -1.1};
  const double im[3] = {1.0, 2.5, 0.4};
  for (std::size_t k = 0; k < 3; ++k) {
    b(2 * k, 2 * k) = re[k];
    b(2 * k, 2 * k + 1) = -im[k];
    b(2 * k + 1, 2 * k) = im[k];
    b(2 * k + 1, 2 * k + 1) = re[k];
    for (std::size_t j = 2 * k + 2; j < 6; ++j) {
      b(2 * k, j) = 0.7;
      b(2 * k + 1, j) = -0.3;
    }
  }
  CHECK(spectral_abscissa(b) == doctest::Approx(-0.3).epsilon(1e-8));

  // Repeated eigenvalues (Jordan-style coupling).
  DenseMatrix jordan(4, 4);
  for (std::size_t i = 0; i < 4; ++i) jordan(i, i) = -1.0;
  jordan(0, 1) = 1.0;
  jordan(1, 2) = 1.0;
  CHECK(spectral_abscissa(jordan) == doctest::Approx(-1.0).epsilon(1e-5));
}

TEST_CASE("complex_solve: identity and scalar closed form") {
  ComplexMatrix m = ComplexMatrix::identity(2);
  ComplexMatrix rhs(2, 1);
  rhs(0, 0) = Complex(1.0, 2.0);
  rhs(1, 0) = Complex(-3.0, 0.5);
  const ComplexMatrix x = complex_solve(m, rhs);
  CHECK(std::abs(x(0, 0) - rhs(0, 0)) <= 1e-14);
  CHECK(std::abs(x(1, 0) - rhs(1, 0)) <= 1e-14);

  // (j + 1) x = -1  =>  x = -1 / (1 + j)
  ComplexMatrix a(1, 1);
  a(0, 0) = Complex(1.0, 1.0);
  ComplexMatrix b(1, 1);
  b(0, 0) = Complex(-1.0, 0.0);
  const ComplexMatrix sol = complex_solve(a, b);
  CHECK(std::abs(sol(0, 0) - Complex(-0.5, 0.5)) <= 1e-14);
}

TEST_CASE("complex_solve: residual property and singular detection") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rep % 6;
    ComplexMatrix m(n, n), rhs(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex(u(rng), u(rng));
      rhs(i, 0) = Complex(u(rng), u(rng));
      rhs(i, 1) = Complex(u(rng), u(rng));
    }
    ComplexMatrix x;
    try {
      x = complex_solve(m, rhs);
    } catch (const Singular&) {
      continue;
    }
    CHECK((m * x - rhs).max_norm() <= 1e-9 * std::max(rhs.max_norm(), 1e-3));
  }

  ComplexMatrix sing(2, 2);
  sing(0, 0) = Complex(1.0, 0.0);
  sing(0, 1) = Complex(2.0, 0.0);
  sing(1, 0) = Complex(2.0, 0.0);
  sing(1, 1) = Complex(4.0, 0.0);
  ComplexMatrix b(2, 1);
  b(0, 0) = Complex(1.0, 0.0);
  CHECK_THROWS_AS(complex_solve(sing, b), Singular);
}

TEST_CASE("solve_linear: residual on random systems") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rep % 8;
    const DenseMatrix a = oracles::random_matrix(rng, n, n, -3.0, 3.0);
    const Vector b = oracles::random_vector(rng, n);
    Vector x;
    try {
      x = solve_linear(a, b);
    } catch (const Singular&) {
      continue;
    }
    Vector r = a * x;
    for (std::size_t i = 0; i < n; ++i) r[i] -= b[i];
    CHECK(max_abs(r) <= 1e-9 * std::max(max_abs(b), 1e-3));
  }
}

TEST_CASE("hermitian_min_eigenvalue: real diagonal and pauli-like input") {
  ComplexMatrix h = ComplexMatrix::identity(2);
  h(1, 1) = Complex(-2.0, 0.0);
  CHECK(hermitian_min_eigenvalue(h) == doctest::Approx(-2.0).epsilon(1e-10));

  ComplexMatrix p(2, 2);
  p(0, 1) = Complex(0.0, 1.0);
  p(1, 0) = Complex(0.0, -1.0);
  CHECK(hermitian_min_eigenvalue(p) == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("hermitian_min_eigenvalue: 4x4 random vs root oracle") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 25; ++rep) {
    ComplexMatrix h(4, 4);
    for (std::size_t i = 0; i < 4; ++i) {
      h(i, i) = Complex(u(rng), 0.0);
      for (std::size_t j = i + 1; j < 4; ++j) {
        h(i, j) = Complex(u(rng), u(rng));
        h(j, i) = std::conj(h(i, j));
      }
    }
    CHECK(hermitian_min_eigenvalue(h) ==
          doctest::Approx(oracles::hermitian_min_eig_by_charpoly(h)).epsilon(1e-6));
  }
}

TEST_CASE("hermitian eigenvalues: shift equivariance and rejection") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rep % 5;
    ComplexMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      h(i, i) = Complex(u(rng), 0.0);
      for (std::size_t j = i + 1; j < n; ++j) {
        h(i, j) = Complex(u(rng), u(rng));
        h(j, i) = std::conj(h(i, j));
      }
    }
    const double t = u(rng) * 3.0;
    ComplexMatrix shifted = h;
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) += Complex(t, 0.0);
    CHECK(hermitian_min_eigenvalue(shifted) ==
          doctest::Approx(hermitian_min_eigenvalue(h) + t).epsilon(1e-8));
  }

  ComplexMatrix bad(2, 2);
  bad(0, 1) = Complex(1.0, 0.0);
  bad(1, 0) = Complex(0.5, 0.0);
  CHECK_THROWS_AS(hermitian_min_eigenvalue(bad), NotHermitian);
}
