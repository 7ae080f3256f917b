#pragma once

#include <functional>
#include <string>

#include "pdflow/problem.hpp"

namespace pdflow {

enum class Frame { Original, Transformed };

std::string to_string(Frame f);
Frame frame_from_string(const std::string& s);

/// Error dynamics around an equilibrium: z' = A z + B u, y = C z, u = delta(y).
/// The residual nonlinearity delta maps the primal error (original coordinates)
/// to the gradient residual; pi_l is the co-coercivity constant used in the
/// quadratic-constraint multiplier.
struct ErrorSystem {
  DenseMatrix a;  // (n+m) x (n+m)
  DenseMatrix b;  // (n+m) x n
  DenseMatrix c;  // n x (n+m)
  double pi_l = 1.0;
  std::function<Vector(const Vector&)> delta;
  Frame frame = Frame::Original;
  DenseMatrix q;  // orthogonal state transform (identity in the original frame)
  std::size_t dim_n = 0;
  std::size_t dim_m = 0;
  KktPoint equilibrium;
};

/// Fixed multiplier pattern [[0, l], [l, -2]] (x) I_n.
struct IqcMultiplier {
  double l = 1.0;
};

/// The 2x2 block pattern of the multiplier.
DenseMatrix multiplier_pattern(const IqcMultiplier& pi);

struct GridSpec {
  double omega_min = 1e-3;
  double omega_max = 1e4;
  std::size_t points = 200;  // log-spaced, plus omega = 0
};

struct RateCertificate {
  double rho_certified = 0.0;
  double abscissa = 0.0;  // spectral abscissa of -A (positive when Hurwitz)
  double tolerance = 0.0;
  GridSpec grid;
  double worst_margin = 0.0;
  double worst_omega = 0.0;
  Frame frame = Frame::Original;
};

/// A = [[-alpha*D, -T^T], [T, 0]] with D the instance's drift matrix,
/// B = [-I; 0], C = [I 0]; delta(y) = grad f(y + x*) - grad f(x*).
ErrorSystem build_error_system(const ProblemInstance& p);

/// Transformed-coordinate system for m < n: state order (constrained m,
/// free n-m, dual m); the free diagonal block is -mu * I_{n-m} and
/// delta(y) = grad f(y + x*) - grad f(x*) - mu * Q2 Q2^T y.
ErrorSystem build_transformed_system(const ProblemInstance& p, double mu);

struct HurwitzReport {
  bool structural = false;  // F symmetric-part positive definite and T full row rank
  double abscissa = 0.0;    // spectral abscissa of [[-F, -T^T], [T, 0]]
};

HurwitzReport hurwitz_check(const DenseMatrix& f_block, const DenseMatrix& t);

/// Largest eigenvalue of [G; I]* Pi [G; I] = l (G + G*) - 2 I at
/// G = C ((j*omega - rho) I - A)^{-1} B. Throws Singular when the resolvent
/// is numerically singular (rho too large).
double kyp_margin(const ErrorSystem& sys, double rho, double omega);

/// Bisection over rho in [0, 0.999 * abscissa]: a rho is accepted when the
/// margin stays below tol over the whole grid. Throws NotCertifiable when the
/// system matrix is not Hurwitz, the tolerance is negative, or rho = 0 fails.
RateCertificate certify_rate(const ErrorSystem& sys, const GridSpec& grid,
                             double tol = 1e-9);

/// Largest eigenvalue of the structured matrix
/// [[A_rho^T P + P A_rho, P B], [B^T P, 0]] + [[C,0],[0,I]]^T Pi [[C,0],[0,I]].
/// Diagnostic only; the toolkit does not search for P.
double lmi_residual(const ErrorSystem& sys, double rho, const DenseMatrix& p_candidate);

/// Same, with an explicit 2x2 multiplier pattern (pi2 (x) I_n) instead of the
/// canonical [[0, l], [l, -2]].
double lmi_residual(const ErrorSystem& sys, double rho, const DenseMatrix& p_candidate,
                    const DenseMatrix& pi2);

}  // namespace pdflow
