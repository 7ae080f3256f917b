#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pdflow/linalg.hpp"
#include "pdflow/matrix.hpp"

namespace pdflow {

enum class ConvexityClass { Convex, PartiallyStronglyConvex, Rsi, Custom };

std::string to_string(ConvexityClass c);
ConvexityClass convexity_class_from_string(const std::string& s);

/// Differentiable objective with gradient evaluation and declared
/// (l, mu, convexity-class) metadata. Declared constants are audited by
/// sampling (estimate_smoothness), not trusted.
struct ObjectiveOracle {
  std::size_t dimension = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  double declared_l = 1.0;   // Lipschitz constant of the gradient
  double declared_mu = 0.0;  // strong-convexity / RSI modulus
  ConvexityClass convexity = ConvexityClass::Convex;

  // Serialization payload; kind in {zero, affine, quadratic, rsi_scalar, custom}.
  std::string kind = "custom";
  DenseMatrix quad;  // quadratic: f = 0.5 x'Px + q'x
  Vector lin;

  // Reference point for RSI quotients (the unique minimizer).
  std::optional<Vector> rsi_reference;

  Vector eval_gradient(const Vector& x) const;
};

ObjectiveOracle zero_objective(std::size_t n);
ObjectiveOracle affine_objective(const Vector& c);
ObjectiveOracle quadratic_objective(const DenseMatrix& p, const Vector& q, double mu,
                                    ConvexityClass cls);
/// f(x) = x^2 + 3 sin^2(x), scalar; RSI with shipped modulus from a pre-build
/// grid search over [-10, 10].
ObjectiveOracle rsi_scalar_objective();

/// f(x) = a sin^2(x), scalar; not convex on its own (demo agents split an RSI
/// sum across the network).
ObjectiveOracle sin_squared_objective(double amplitude);

/// Shipped RSI modulus for rsi_scalar_objective (grid minimum is ~0.6966).
inline constexpr double kRsiScalarMu = 0.69;
inline constexpr double kRsiScalarL = 8.0;

struct EqualityConstraint {
  DenseMatrix t;  // m x n
  Vector b;       // m
  QRFactors qr;   // of t^T
  double kappa1 = 0.0;  // min eigenvalue of T T^T
  double kappa2 = 0.0;  // max eigenvalue of T T^T

  EqualityConstraint() = default;
  EqualityConstraint(DenseMatrix t_in, Vector b_in);

  std::size_t m() const { return t.rows(); }
  std::size_t n() const { return t.cols(); }
};

struct KktPoint {
  Vector x;
  Vector lambda;
};

/// Drift used by the primal flow: the gradient of the augmentation term.
/// ConstraintQuadratic: alpha * T^T (Tx - b)    (penalty 0.5*alpha*||Tx-b||^2)
/// LaplacianDrift:      alpha * D x             (penalty 0.5*alpha*x'Dx, D psd)
enum class PenaltyKind { ConstraintQuadratic, LaplacianDrift };

/// Stacked-graph payload for the distributed PI flow. The flow's dual has the
/// primal dimension and both drift and dual update use the stacked Laplacian;
/// the constraint field of the owning instance holds the equivalent
/// full-row-rank reduction of {Lx = 0}.
struct StackedGraphPayload {
  DenseMatrix big_l;  // Nn x Nn
  std::size_t n_nodes = 0;
  std::size_t local_dim = 0;
};

struct ProblemInstance {
  std::string name;
  ObjectiveOracle objective;
  EqualityConstraint constraint;
  double alpha = 1.0;
  std::optional<KktPoint> known_solution;
  PenaltyKind penalty = PenaltyKind::ConstraintQuadratic;
  DenseMatrix drift;  // only for LaplacianDrift: the n x n matrix D
  std::optional<StackedGraphPayload> stacked;

  std::size_t n() const { return constraint.n(); }
  std::size_t m() const { return constraint.m(); }

  /// The matrix in the drift term (T^T T or D); used by the error-system builders.
  DenseMatrix drift_matrix() const;
};

/// Index split of {1..n}; `set` holds the strongly-convex coordinates in the
/// transformed frame (1-based in serialized form, 0-based here).
struct PartitionSpec {
  std::size_t n = 0;
  std::vector<std::size_t> set;

  std::vector<std::size_t> complement() const;
};

/// Free-coordinate partition after the orthogonal transform: the trailing
/// n - m coordinates (those the constraint does not touch).
PartitionSpec free_partition(std::size_t n, std::size_t m);

/// Oracle for g(x') = f(Qx') with gradient Q^T grad f(Qx'); the Lipschitz
/// constant is unchanged by the orthogonal transform.
ObjectiveOracle transformed_oracle(const ProblemInstance& p);

/// max(||grad f(x) + T^T lambda||_inf, ||Tx - b||_inf)
double kkt_residual(const ProblemInstance& p, const Vector& x, const Vector& lambda);

struct SmoothnessEstimate {
  double l_hat = 0.0;
  double mu_hat = 0.0;
  double cocoercivity_hat = 0.0;  // max of ||dg||^2 / (dg'dx) over sampled pairs
};

/// Empirical extrema of the secant quotients over sampled pairs in
/// [box_lo, box_hi]^n. For RSI oracles the second point of every pair is the
/// declared minimizer. Throws DeclarationViolated when l_hat exceeds the
/// declared constant by more than 1e-6.
SmoothnessEstimate estimate_smoothness(const ObjectiveOracle& o,
                                       std::size_t samples = 1000,
                                       double box_lo = -10.0, double box_hi = 10.0,
                                       std::uint64_t seed = 12345);

/// Named demo instances:
///   sc_quadratic    (a) strongly convex quadratic, T = [1 1], b = 1
///   partial_sc      (b) convex quadratic, strongly convex only along null(T)
///   zero_identity   (c) f == 0, T = I2 (m = n regime)
///   affine_identity (d) affine objective, T = I2 (oscillation demo)
///   rsi_scalar      (e) x^2 + 3 sin^2 x, T = [1], b = 0
std::vector<ProblemInstance> builtin_library();

/// Lookup by name; throws ConfigError when unknown.
ProblemInstance builtin_instance(const std::string& name);

}  // namespace pdflow
