#include "pdflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace pdflow {

namespace {

// Applies the Householder reflector defined by v (beta = 2 / v'v) from the
// left to columns [c0, c1) of rows r0..r0+len-1 of h.
void apply_house_left(DenseMatrix& h, const double* v, std::size_t len, std::size_t r0,
                      std::size_t c0, std::size_t c1, double beta) {
  for (std::size_t j = c0; j < c1; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += v[i] * h(r0 + i, j);
    s *= beta;
    for (std::size_t i = 0; i < len; ++i) h(r0 + i, j) -= s * v[i];
  }
}

void apply_house_right(DenseMatrix& h, const double* v, std::size_t len, std::size_t c0,
                       std::size_t r0, std::size_t r1, double beta) {
  for (std::size_t i = r0; i < r1; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < len; ++j) s += h(i, c0 + j) * v[j];
    s *= beta;
    for (std::size_t j = 0; j < len; ++j) h(i, c0 + j) -= s * v[j];
  }
}

// Householder vector for x: reflector maps x to (-sign(x0)*||x||, 0, ..., 0).
// Returns beta; v is normalized so v[0] = 1 is NOT imposed (plain v).
double make_house(const double* x, std::size_t len, double* v) {
  double nrm = 0.0;
  for (std::size_t i = 0; i < len; ++i) nrm += x[i] * x[i];
  nrm = std::sqrt(nrm);
  if (nrm == 0.0) {
    for (std::size_t i = 0; i < len; ++i) v[i] = 0.0;
    return 0.0;
  }
  const double alpha = (x[0] >= 0.0) ? -nrm : nrm;
  v[0] = x[0] - alpha;
  for (std::size_t i = 1; i < len; ++i) v[i] = x[i];
  double vtv = 0.0;
  for (std::size_t i = 0; i < len; ++i) vtv += v[i] * v[i];
  if (vtv == 0.0) return 0.0;
  return 2.0 / vtv;
}

}  // namespace

QRFactors qr_decompose(const DenseMatrix& t_transpose) {
  const std::size_t n = t_transpose.rows();
  const std::size_t m = t_transpose.cols();
  if (n < m) throw DimensionMismatch("qr_decompose: expected rows >= cols");
  if (!t_transpose.is_finite()) throw Error("qr_decompose: non-finite input");

  const double scale = t_transpose.max_norm();
  DenseMatrix r = t_transpose;
  DenseMatrix q = DenseMatrix::identity(n);
  std::vector<double> v(n);

  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t len = n - k;
    std::vector<double> col(len);
    for (std::size_t i = 0; i < len; ++i) col[i] = r(k + i, k);
    const double beta = make_house(col.data(), len, v.data());
    if (beta != 0.0) {
      apply_house_left(r, v.data(), len, k, k, m, beta);
      // Accumulate Q = Q * P (P symmetric): applies from the right.
      apply_house_right(q, v.data(), len, k, 0, n, beta);
    }
  }

  // Sign convention: diagonal of R1 nonnegative.
  for (std::size_t k = 0; k < m; ++k) {
    if (r(k, k) < 0.0) {
      for (std::size_t j = k; j < m; ++j) r(k, j) = -r(k, j);
      for (std::size_t i = 0; i < n; ++i) q(i, k) = -q(i, k);
    }
  }

  const double tol = 1e-12 * scale;
  for (std::size_t k = 0; k < m; ++k) {
    if (std::abs(r(k, k)) <= tol)
      throw RankDeficient("qr_decompose: R diagonal " + std::to_string(k) +
                          " below rank tolerance (input not full column rank)");
  }

  QRFactors f;
  f.q = q;
  f.r1 = DenseMatrix(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) f.r1(i, j) = r(i, j);
  f.q1 = q.block(0, 0, n, m);
  f.q2 = q.block(0, m, n, n - m);
  return f;
}

SymmetricEigen symmetric_eigen(const DenseMatrix& s) {
  if (s.rows() != s.cols()) throw DimensionMismatch("symmetric_eigen: matrix not square");
  const std::size_t n = s.rows();
  const double scale = s.max_norm();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(s(i, j) - s(j, i)) > 1e-10 * std::max(scale, 1e-300))
        throw NotSymmetric("symmetric_eigen: input asymmetric at (" + std::to_string(i) +
                           "," + std::to_string(j) + ")");

  DenseMatrix a = s;
  DenseMatrix v = DenseMatrix::identity(n);

  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-14 * std::max(scale, 1e-300) * n) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  SymmetricEigen out;
  out.eigenvalues.resize(n);
  out.eigenvectors = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

namespace {

// Reduces a (copy of a) to upper Hessenberg form in place.
void hessenberg_reduce(DenseMatrix& h) {
  const std::size_t n = h.rows();
  if (n < 3) return;
  std::vector<double> v(n), col(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t len = n - k - 1;
    for (std::size_t i = 0; i < len; ++i) col[i] = h(k + 1 + i, k);
    const double beta = make_house(col.data(), len, v.data());
    if (beta == 0.0) continue;
    apply_house_left(h, v.data(), len, k + 1, 0, n, beta);
    apply_house_right(h, v.data(), len, k + 1, 0, n, beta);
  }
  // Clear the structurally-zero entries exactly.
  for (std::size_t i = 2; i < n; ++i)
    for (std::size_t j = 0; j + 1 < i; ++j) h(i, j) = 0.0;
}

void eig2x2(double a, double b, double c, double d, std::vector<Complex>& out) {
  const double tr = a + d;
  const double det = a * d - b * c;
  const double disc = 0.25 * tr * tr - det;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    out.emplace_back(0.5 * tr + sq, 0.0);
    out.emplace_back(0.5 * tr - sq, 0.0);
  } else {
    const double sq = std::sqrt(-disc);
    out.emplace_back(0.5 * tr, sq);
    out.emplace_back(0.5 * tr, -sq);
  }
}

}  // namespace

std::vector<Complex> dense_eigenvalues(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("dense_eigenvalues: matrix not square");
  if (!a.is_finite()) throw Error("dense_eigenvalues: non-finite input");
  const std::size_t n = a.rows();
  std::vector<Complex> eig;
  if (n == 0) return eig;
  if (n == 1) return {Complex(a(0, 0), 0.0)};

  DenseMatrix h = a;
  hessenberg_reduce(h);

  const double eps = std::numeric_limits<double>::epsilon();
  const double anorm = std::max(h.max_norm(), 1e-300);
  long budget = static_cast<long>(30 * n);
  int stuck = 0;

  // Active block ends at p (0-based, inclusive); deflates downward.
  std::ptrdiff_t p = static_cast<std::ptrdiff_t>(n) - 1;
  while (p >= 0) {
    // Zero out negligible subdiagonals.
    for (std::ptrdiff_t k = 0; k < p; ++k) {
      const double small =
          eps * (std::abs(h(k, k)) + std::abs(h(k + 1, k + 1)));
      if (std::abs(h(k + 1, k)) <= std::max(small, eps * anorm * 1e-2)) h(k + 1, k) = 0.0;
    }

    if (p == 0 || h(p, p - 1) == 0.0) {
      eig.emplace_back(h(p, p), 0.0);
      --p;
      stuck = 0;
      continue;
    }
    if (p == 1 || h(p - 1, p - 2) == 0.0) {
      eig2x2(h(p - 1, p - 1), h(p - 1, p), h(p, p - 1), h(p, p), eig);
      p -= 2;
      stuck = 0;
      continue;
    }

    if (budget-- <= 0)
      throw NoConvergence("dense_eigenvalues: QR iteration budget exhausted");

    // Start of the unreduced block ending at p.
    std::ptrdiff_t l = p - 1;
    while (l > 0 && h(l, l - 1) != 0.0) --l;

    // Double (Francis) shift from the trailing 2x2, with an ad-hoc
    // exceptional shift when progress stalls.
    double ss, tt;
    if (++stuck % 11 == 0) {
      const double w = std::abs(h(p, p - 1)) + std::abs(h(p - 1, p - 2));
      ss = 2.0 * (h(p, p) + 0.75 * w);
      tt = (h(p, p) + 0.75 * w) * (h(p, p) + 0.75 * w) - 0.4375 * w * w;
    } else {
      ss = h(p - 1, p - 1) + h(p, p);
      tt = h(p - 1, p - 1) * h(p, p) - h(p - 1, p) * h(p, p - 1);
    }

    double x = h(l, l) * h(l, l) + h(l, l + 1) * h(l + 1, l) - ss * h(l, l) + tt;
    double y = h(l + 1, l) * (h(l, l) + h(l + 1, l + 1) - ss);
    double z = h(l + 1, l) * h(l + 2, l + 1);

    for (std::ptrdiff_t k = l - 1; k <= p - 3; ++k) {
      double vec[3] = {x, y, z};
      double v[3];
      const double beta = make_house(vec, 3, v);
      if (beta != 0.0) {
        const std::size_t r0 = static_cast<std::size_t>(k + 1);
        apply_house_left(h, v, 3, r0, 0, n, beta);
        apply_house_right(h, v, 3, r0, 0, n, beta);
      }
      x = h(k + 2, k + 1);
      y = h(k + 3, k + 1);
      z = (k + 4 <= p) ? h(k + 4, k + 1) : 0.0;
    }
    // Final 2x2 rotation to finish the chase.
    {
      double vec[2] = {x, y};
      double v[2];
      const double beta = make_house(vec, 2, v);
      if (beta != 0.0) {
        const std::size_t r0 = static_cast<std::size_t>(p - 1);
        apply_house_left(h, v, 2, r0, 0, n, beta);
        apply_house_right(h, v, 2, r0, 0, n, beta);
      }
    }
    // Restore the Hessenberg zero pattern the bulge chase may have smudged.
    for (std::ptrdiff_t i = l + 2; i <= p; ++i)
      for (std::ptrdiff_t j = l; j + 1 < i; ++j) h(i, j) = 0.0;
  }
  return eig;
}

double spectral_abscissa(const DenseMatrix& a) {
  const std::vector<Complex> eig = dense_eigenvalues(a);
  double m = -std::numeric_limits<double>::infinity();
  for (const Complex& s : eig) m = std::max(m, s.real());
  return m;
}

ComplexMatrix complex_solve(const ComplexMatrix& m, const ComplexMatrix& rhs) {
  if (m.rows() != m.cols()) throw DimensionMismatch("complex_solve: matrix not square");
  if (m.rows() != rhs.rows()) throw DimensionMismatch("complex_solve: rhs rows mismatch");
  const std::size_t n = m.rows();
  const std::size_t k = rhs.cols();
  const double pivot_tol = 1e-13 * std::max(m.max_norm(), 1e-300);

  ComplexMatrix a = m;
  ComplexMatrix x = rhs;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(a(col, col));
    for (std::size_t i = col + 1; i < n; ++i) {
      const double v = std::abs(a(i, col));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best < pivot_tol) throw Singular("complex_solve: pivot below tolerance");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      for (std::size_t j = 0; j < k; ++j) std::swap(x(col, j), x(piv, j));
    }
    const Complex d = a(col, col);
    for (std::size_t i = col + 1; i < n; ++i) {
      const Complex f = a(i, col) / d;
      if (f == Complex(0.0, 0.0)) continue;
      for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(col, j);
      for (std::size_t j = 0; j < k; ++j) x(i, j) -= f * x(col, j);
    }
  }
  for (std::size_t col = n; col-- > 0;) {
    for (std::size_t j = 0; j < k; ++j) {
      Complex s = x(col, j);
      for (std::size_t i = col + 1; i < n; ++i) s -= a(col, i) * x(i, j);
      x(col, j) = s / a(col, col);
    }
  }
  return x;
}

Vector solve_linear(const DenseMatrix& a_in, const Vector& b) {
  if (a_in.rows() != a_in.cols()) throw DimensionMismatch("solve_linear: matrix not square");
  if (a_in.rows() != b.size()) throw DimensionMismatch("solve_linear: rhs size mismatch");
  const std::size_t n = a_in.rows();
  const double pivot_tol = 1e-13 * std::max(a_in.max_norm(), 1e-300);

  DenseMatrix a = a_in;
  Vector x = b;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(a(col, col));
    for (std::size_t i = col + 1; i < n; ++i) {
      const double v = std::abs(a(i, col));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best < pivot_tol) throw Singular("solve_linear: pivot below tolerance");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      std::swap(x[col], x[piv]);
    }
    const double d = a(col, col);
    for (std::size_t i = col + 1; i < n; ++i) {
      const double f = a(i, col) / d;
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(col, j);
      x[i] -= f * x[col];
    }
  }
  for (std::size_t col = n; col-- > 0;) {
    double s = x[col];
    for (std::size_t i = col + 1; i < n; ++i) s -= a(col, i) * x[i];
    x[col] = s / a(col, col);
  }
  return x;
}

namespace {

Vector hermitian_eigenvalues_ascending(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) throw DimensionMismatch("hermitian eigen: matrix not square");
  const std::size_t n = h.rows();
  const double scale = std::max(h.max_norm(), 1e-300);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(h(i, j) - std::conj(h(j, i))) > 1e-9 * scale)
        throw NotHermitian("hermitian eigen: input not Hermitian");

  // Real symmetric embedding [[Re, -Im], [Im, Re]]; each eigenvalue doubled.
  DenseMatrix s(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double re = h(i, j).real();
      const double im = h(i, j).imag();
      s(i, j) = re;
      s(i, j + n) = -im;
      s(i + n, j) = im;
      s(i + n, j + n) = re;
    }
  // The embedding is symmetric up to roundoff of the Hermitian check above;
  // symmetrize exactly so the Jacobi precheck cannot trip on it.
  for (std::size_t i = 0; i < 2 * n; ++i)
    for (std::size_t j = i + 1; j < 2 * n; ++j) {
      const double v = 0.5 * (s(i, j) + s(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  const SymmetricEigen se = symmetric_eigen(s);
  Vector out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = se.eigenvalues[2 * k];
  return out;
}

}  // namespace

double hermitian_min_eigenvalue(const ComplexMatrix& h) {
  return hermitian_eigenvalues_ascending(h).front();
}

double hermitian_max_eigenvalue(const ComplexMatrix& h) {
  return hermitian_eigenvalues_ascending(h).back();
}

}  // namespace pdflow
