#pragma once

#include <complex>
#include <vector>

#include "pdflow/matrix.hpp"

namespace pdflow {

/// Factors of T^T = Q R = [Q1 Q2] [R1; 0].
struct QRFactors {
  DenseMatrix q;   // n x n orthogonal
  DenseMatrix r1;  // m x m upper triangular, nonnegative diagonal
  DenseMatrix q1;  // n x m
  DenseMatrix q2;  // n x (n-m)
};

/// Householder QR of an n x m matrix (n >= m). Throws RankDeficient when a
/// diagonal of R1 falls below 1e-12 * max-norm of the input.
QRFactors qr_decompose(const DenseMatrix& t_transpose);

struct SymmetricEigen {
  Vector eigenvalues;        // ascending
  DenseMatrix eigenvectors;  // orthogonal, column k pairs with eigenvalues[k]
};

/// Cyclic Jacobi sweeps; input must be symmetric to 1e-10 relative max-norm.
SymmetricEigen symmetric_eigen(const DenseMatrix& s);

/// All eigenvalues of a real square matrix via Hessenberg reduction followed
/// by double-shift QR iteration. Budget: 30 * dim sweeps, then NoConvergence.
std::vector<Complex> dense_eigenvalues(const DenseMatrix& a);

/// max over eigenvalues of Re(s).
double spectral_abscissa(const DenseMatrix& a);

/// Partial-pivoted elimination; throws Singular when a pivot magnitude falls
/// below 1e-13 * max-norm of m.
ComplexMatrix complex_solve(const ComplexMatrix& m, const ComplexMatrix& rhs);

/// Real linear solve with partial pivoting (same pivot policy as complex_solve).
Vector solve_linear(const DenseMatrix& a, const Vector& b);

/// Smallest eigenvalue of a Hermitian matrix via Jacobi sweeps on the
/// [[Re, -Im], [Im, Re]] real symmetric embedding.
double hermitian_min_eigenvalue(const ComplexMatrix& h);

/// Largest eigenvalue of a Hermitian matrix (same embedding).
double hermitian_max_eigenvalue(const ComplexMatrix& h);

}  // namespace pdflow
