#include "pdflow/certify.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pdflow/dynamics.hpp"
#include "pdflow/io.hpp"

namespace pdflow {

std::string to_string(Frame f) {
  return f == Frame::Original ? "original" : "transformed";
}

Frame frame_from_string(const std::string& s) {
  if (s == "original") return Frame::Original;
  if (s == "transformed") return Frame::Transformed;
  throw ConfigError("unknown frame: " + s);
}

namespace {

KktPoint resolve_equilibrium(const ProblemInstance& p) {
  if (p.known_solution.has_value()) return *p.known_solution;
  return equilibrium_solve(p);
}

}  // namespace

ErrorSystem build_error_system(const ProblemInstance& p) {
  const std::size_t n = p.n();
  const std::size_t m = p.m();
  const KktPoint eq = resolve_equilibrium(p);

  ErrorSystem sys;
  sys.dim_n = n;
  sys.dim_m = m;
  sys.frame = Frame::Original;
  sys.q = DenseMatrix::identity(n);
  sys.pi_l = p.objective.declared_l;
  sys.equilibrium = eq;

  sys.a = DenseMatrix(n + m, n + m);
  sys.a.set_block(0, 0, -p.alpha * p.drift_matrix());
  sys.a.set_block(0, n, -1.0 * p.constraint.t.transpose());
  sys.a.set_block(n, 0, p.constraint.t);

  sys.b = DenseMatrix(n + m, n);
  sys.b.set_block(0, 0, -1.0 * DenseMatrix::identity(n));
  sys.c = DenseMatrix(n, n + m);
  sys.c.set_block(0, 0, DenseMatrix::identity(n));

  const ObjectiveOracle f = p.objective;
  const Vector gstar = f.gradient(eq.x);
  const Vector xstar = eq.x;
  sys.delta = [f, gstar, xstar](const Vector& y) {
    Vector g = f.gradient(axpy(1.0, y, xstar));
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= gstar[i];
    return g;
  };
  return sys;
}

ErrorSystem build_transformed_system(const ProblemInstance& p, double mu) {
  const std::size_t n = p.n();
  const std::size_t m = p.m();
  if (m == n)
    throw RequiresStrictSubspace(
        "build_transformed_system: m = n leaves no free subspace; use the original frame");

  const KktPoint eq = resolve_equilibrium(p);
  const DenseMatrix q = p.constraint.qr.q;
  const DenseMatrix qt = q.transpose();

  ErrorSystem sys;
  sys.dim_n = n;
  sys.dim_m = m;
  sys.frame = Frame::Transformed;
  sys.q = q;
  sys.pi_l = p.objective.declared_l;
  sys.equilibrium = eq;

  // A' = blkdiag(Q^T, I) A blkdiag(Q, I) with the strongly-convex part of the
  // free block folded into the linear dynamics.
  const DenseMatrix tq = p.constraint.t * q;      // [R1^T 0]
  const DenseMatrix drift_t = qt * (p.drift_matrix() * q);
  sys.a = DenseMatrix(n + m, n + m);
  sys.a.set_block(0, 0, -p.alpha * drift_t);
  for (std::size_t i = m; i < n; ++i) sys.a(i, i) -= mu;
  sys.a.set_block(0, n, -1.0 * tq.transpose());
  sys.a.set_block(n, 0, tq);

  sys.b = DenseMatrix(n + m, n);
  sys.b.set_block(0, 0, -1.0 * qt);
  sys.c = DenseMatrix(n, n + m);
  sys.c.set_block(0, 0, q);

  // Projector onto the free subspace, expressed in original coordinates.
  const DenseMatrix q2 = p.constraint.qr.q2;
  const DenseMatrix proj = q2 * q2.transpose();
  const ObjectiveOracle f = p.objective;
  const Vector gstar = f.gradient(eq.x);
  const Vector xstar = eq.x;
  sys.delta = [f, gstar, xstar, proj, mu](const Vector& y) {
    Vector g = f.gradient(axpy(1.0, y, xstar));
    const Vector py = proj * y;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= gstar[i] + mu * py[i];
    return g;
  };
  return sys;
}

HurwitzReport hurwitz_check(const DenseMatrix& f_block, const DenseMatrix& t) {
  if (f_block.rows() != f_block.cols())
    throw DimensionMismatch("hurwitz_check: F must be square");
  if (t.cols() != f_block.rows())
    throw DimensionMismatch("hurwitz_check: T column count must match F");
  const std::size_t n = f_block.rows();
  const std::size_t m = t.rows();

  bool structural = true;
  const DenseMatrix f_sym = 0.5 * (f_block + f_block.transpose());
  const SymmetricEigen se = symmetric_eigen(f_sym);
  if (se.eigenvalues.front() <= 1e-12 * std::max(f_sym.max_norm(), 1.0))
    structural = false;
  try {
    qr_decompose(t.transpose());
  } catch (const RankDeficient&) {
    structural = false;
  }

  DenseMatrix a(n + m, n + m);
  a.set_block(0, 0, -1.0 * f_block);
  a.set_block(0, n, -1.0 * t.transpose());
  a.set_block(n, 0, t);
  return HurwitzReport{structural, spectral_abscissa(a)};
}

double kyp_margin(const ErrorSystem& sys, double rho, double omega) {
  const std::size_t dim = sys.a.rows();
  const std::size_t n = sys.dim_n;

  ComplexMatrix lhs(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      lhs(i, j) = Complex((i == j ? -rho : 0.0) - sys.a(i, j), i == j ? omega : 0.0);

  ComplexMatrix rhs(dim, n);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < n; ++j) rhs(i, j) = Complex(sys.b(i, j), 0.0);

  const ComplexMatrix x = complex_solve(lhs, rhs);
  ComplexMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s(0.0, 0.0);
      for (std::size_t k = 0; k < dim; ++k) s += Complex(sys.c(i, k), 0.0) * x(k, j);
      g(i, j) = s;
    }

  ComplexMatrix margin = Complex(sys.pi_l, 0.0) * (g + g.conjugate_transpose());
  for (std::size_t i = 0; i < n; ++i) margin(i, i) -= Complex(2.0, 0.0);
  return hermitian_max_eigenvalue(margin);
}

namespace {

std::vector<double> make_grid(const GridSpec& grid) {
  std::vector<double> omegas;
  omegas.push_back(0.0);
  const std::size_t pts = std::max<std::size_t>(grid.points, 2);
  const double lmin = std::log10(grid.omega_min);
  const double lmax = std::log10(grid.omega_max);
  for (std::size_t i = 0; i < pts; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(pts - 1);
    omegas.push_back(std::pow(10.0, lmin + f * (lmax - lmin)));
  }
  return omegas;
}

struct GridScan {
  double worst_margin;
  double worst_omega;
};

GridScan scan_grid(const ErrorSystem& sys, double rho, const std::vector<double>& omegas) {
  GridScan s{-std::numeric_limits<double>::infinity(), 0.0};
  for (double w : omegas) {
    double m;
    try {
      m = kyp_margin(sys, rho, w);
    } catch (const Singular&) {
      m = std::numeric_limits<double>::infinity();
    }
    if (m > s.worst_margin) {
      s.worst_margin = m;
      s.worst_omega = w;
    }
  }
  return s;
}

}  // namespace

RateCertificate certify_rate(const ErrorSystem& sys, const GridSpec& grid, double tol) {
  if (tol < 0.0)
    throw NotCertifiable("certify_rate: tolerance must be nonnegative");
  if (grid.omega_min <= 0.0 || grid.omega_max <= grid.omega_min)
    throw ConfigError("certify_rate: grid bounds must satisfy 0 < min < max");

  const double alpha_a = spectral_abscissa(sys.a);
  if (alpha_a >= -1e-12) {
    std::ostringstream msg;
    msg << "certify_rate: system matrix is not Hurwitz (spectral abscissa " << alpha_a
        << ")";
    throw NotCertifiable(msg.str());
  }
  const double abscissa = -alpha_a;
  const std::vector<double> omegas = make_grid(grid);

  const GridScan at_zero = scan_grid(sys, 0.0, omegas);
  if (at_zero.worst_margin > tol) {
    std::ostringstream msg;
    msg << "certify_rate: condition fails already at rho = 0 (margin "
        << at_zero.worst_margin << " at omega " << at_zero.worst_omega << ")";
    throw NotCertifiable(msg.str());
  }

  // Bisection on the largest accepted rho; the cap keeps the shifted resolvent
  // analytic on the imaginary axis.
  const double rho_cap = 0.999 * abscissa;
  double lo = 0.0;
  double hi = rho_cap;
  if (scan_grid(sys, rho_cap, omegas).worst_margin <= tol) {
    lo = rho_cap;
  } else {
    while (hi - lo > 1e-3 * std::max(hi, 1e-30)) {
      const double mid = 0.5 * (lo + hi);
      if (scan_grid(sys, mid, omegas).worst_margin <= tol)
        lo = mid;
      else
        hi = mid;
    }
  }

  const GridScan accepted = scan_grid(sys, lo, omegas);
  log_debug("certify_rate: accepted rho=" + std::to_string(lo) + " worst margin " +
            std::to_string(accepted.worst_margin));

  RateCertificate cert;
  cert.rho_certified = lo;
  cert.abscissa = abscissa;
  cert.tolerance = tol;
  cert.grid = grid;
  cert.worst_margin = accepted.worst_margin;
  cert.worst_omega = accepted.worst_omega;
  cert.frame = sys.frame;
  return cert;
}

DenseMatrix multiplier_pattern(const IqcMultiplier& pi) {
  DenseMatrix p(2, 2);
  p(0, 1) = pi.l;
  p(1, 0) = pi.l;
  p(1, 1) = -2.0;
  return p;
}

double lmi_residual(const ErrorSystem& sys, double rho, const DenseMatrix& p_candidate) {
  return lmi_residual(sys, rho, p_candidate, multiplier_pattern(IqcMultiplier{sys.pi_l}));
}

double lmi_residual(const ErrorSystem& sys, double rho, const DenseMatrix& p_candidate,
                    const DenseMatrix& pi2) {
  const std::size_t dim = sys.a.rows();
  const std::size_t n = sys.dim_n;
  if (p_candidate.rows() != dim || p_candidate.cols() != dim)
    throw DimensionMismatch("lmi_residual: P has wrong shape");
  if (pi2.rows() != 2 || pi2.cols() != 2)
    throw DimensionMismatch("lmi_residual: multiplier pattern must be 2x2");
  const double pscale = std::max(p_candidate.max_norm(), 1e-300);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i + 1; j < dim; ++j)
      if (std::abs(p_candidate(i, j) - p_candidate(j, i)) > 1e-10 * pscale)
        throw NotSymmetric("lmi_residual: P candidate is not symmetric");

  DenseMatrix a_rho = sys.a;
  for (std::size_t i = 0; i < dim; ++i) a_rho(i, i) += rho;

  DenseMatrix z(dim + n, dim + n);
  const DenseMatrix pa = p_candidate * a_rho;
  z.set_block(0, 0, pa.transpose() + pa);
  const DenseMatrix pb = p_candidate * sys.b;
  z.set_block(0, dim, pb);
  z.set_block(dim, 0, pb.transpose());

  // [[C,0],[0,I]]^T (pi2 (x) I_n) [[C,0],[0,I]] =
  //   [[pi00 C^T C, pi01 C^T], [pi10 C, pi11 I]]
  const DenseMatrix ct = sys.c.transpose();
  if (pi2(0, 0) != 0.0) z.set_block(0, 0, z.block(0, 0, dim, dim) + pi2(0, 0) * (ct * sys.c));
  if (pi2(0, 1) != 0.0)
    z.set_block(0, dim, z.block(0, dim, dim, n) + pi2(0, 1) * ct);
  if (pi2(1, 0) != 0.0) z.set_block(dim, 0, z.block(dim, 0, n, dim) + pi2(1, 0) * sys.c);
  for (std::size_t i = 0; i < n; ++i) z(dim + i, dim + i) += pi2(1, 1);

  // Exact symmetrization before the eigensolve.
  const DenseMatrix zs = 0.5 * (z + z.transpose());
  const SymmetricEigen se = symmetric_eigen(zs);
  return se.eigenvalues.back();
}

}  // namespace pdflow
