#include "pdflow/problem.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace pdflow {

std::string to_string(ConvexityClass c) {
  switch (c) {
    case ConvexityClass::Convex: return "convex";
    case ConvexityClass::PartiallyStronglyConvex: return "partially-strongly-convex";
    case ConvexityClass::Rsi: return "rsi";
    case ConvexityClass::Custom: return "custom";
  }
  return "custom";
}

ConvexityClass convexity_class_from_string(const std::string& s) {
  if (s == "convex") return ConvexityClass::Convex;
  if (s == "partially-strongly-convex") return ConvexityClass::PartiallyStronglyConvex;
  if (s == "rsi") return ConvexityClass::Rsi;
  if (s == "custom") return ConvexityClass::Custom;
  throw ConfigError("unknown convexity class: " + s);
}

Vector ObjectiveOracle::eval_gradient(const Vector& x) const {
  if (x.size() != dimension) throw DimensionMismatch("oracle gradient: dimension mismatch");
  return gradient(x);
}

ObjectiveOracle zero_objective(std::size_t n) {
  ObjectiveOracle o;
  o.dimension = n;
  o.value = [](const Vector&) { return 0.0; };
  o.gradient = [n](const Vector&) { return Vector(n, 0.0); };
  o.declared_l = 1.0;  // any positive constant bounds a constant gradient
  o.declared_mu = 0.0;
  o.convexity = ConvexityClass::Convex;
  o.kind = "zero";
  return o;
}

ObjectiveOracle affine_objective(const Vector& c) {
  ObjectiveOracle o;
  o.dimension = c.size();
  Vector cc = c;
  o.value = [cc](const Vector& x) { return dot(cc, x); };
  o.gradient = [cc](const Vector&) { return cc; };
  o.declared_l = 1.0;
  o.declared_mu = 0.0;
  o.convexity = ConvexityClass::Convex;
  o.kind = "affine";
  o.lin = c;
  return o;
}

ObjectiveOracle quadratic_objective(const DenseMatrix& p, const Vector& q, double mu,
                                    ConvexityClass cls) {
  if (p.rows() != p.cols() || p.rows() != q.size())
    throw DimensionMismatch("quadratic_objective: shape mismatch");
  ObjectiveOracle o;
  o.dimension = q.size();
  DenseMatrix pc = p;
  Vector qc = q;
  o.value = [pc, qc](const Vector& x) {
    return 0.5 * dot(x, pc * x) + dot(qc, x);
  };
  o.gradient = [pc, qc](const Vector& x) { return axpy(1.0, pc * x, qc); };
  // Gradient Lipschitz constant of a quadratic is the spectral radius of P.
  const SymmetricEigen se = symmetric_eigen(0.5 * (p + p.transpose()));
  o.declared_l = std::max(std::abs(se.eigenvalues.front()), std::abs(se.eigenvalues.back()));
  if (o.declared_l == 0.0) o.declared_l = 1.0;
  o.declared_mu = mu;
  o.convexity = cls;
  o.kind = "quadratic";
  o.quad = p;
  o.lin = q;
  return o;
}

ObjectiveOracle rsi_scalar_objective() {
  ObjectiveOracle o;
  o.dimension = 1;
  o.value = [](const Vector& x) {
    const double s = std::sin(x[0]);
    return x[0] * x[0] + 3.0 * s * s;
  };
  o.gradient = [](const Vector& x) {
    return Vector{2.0 * x[0] + 3.0 * std::sin(2.0 * x[0])};
  };
  o.declared_l = kRsiScalarL;
  o.declared_mu = kRsiScalarMu;
  o.convexity = ConvexityClass::Rsi;
  o.kind = "rsi_scalar";
  o.rsi_reference = Vector{0.0};
  return o;
}

ObjectiveOracle sin_squared_objective(double amplitude) {
  ObjectiveOracle o;
  o.dimension = 1;
  const double a = amplitude;
  o.value = [a](const Vector& x) {
    const double s = std::sin(x[0]);
    return a * s * s;
  };
  o.gradient = [a](const Vector& x) { return Vector{a * std::sin(2.0 * x[0])}; };
  o.declared_l = 2.0 * std::abs(a);
  o.declared_mu = 0.0;
  o.convexity = ConvexityClass::Custom;
  o.kind = "sin_squared";
  o.lin = Vector{a};
  return o;
}

EqualityConstraint::EqualityConstraint(DenseMatrix t_in, Vector b_in)
    : t(std::move(t_in)), b(std::move(b_in)) {
  if (t.rows() != b.size()) throw DimensionMismatch("constraint: T rows != b size");
  if (t.rows() > t.cols()) throw ConfigError("constraint: expected m <= n");
  qr = qr_decompose(t.transpose());  // throws RankDeficient when not full row rank
  const DenseMatrix tt = t * t.transpose();
  const SymmetricEigen se = symmetric_eigen(tt);
  kappa1 = se.eigenvalues.front();
  kappa2 = se.eigenvalues.back();
}

DenseMatrix ProblemInstance::drift_matrix() const {
  if (penalty == PenaltyKind::LaplacianDrift) return drift;
  return constraint.t.transpose() * constraint.t;
}

std::vector<std::size_t> PartitionSpec::complement() const {
  std::vector<bool> in(n, false);
  for (std::size_t i : set) in[i] = true;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

PartitionSpec free_partition(std::size_t n, std::size_t m) {
  PartitionSpec p;
  p.n = n;
  for (std::size_t i = m; i < n; ++i) p.set.push_back(i);
  return p;
}

ObjectiveOracle transformed_oracle(const ProblemInstance& p) {
  const DenseMatrix q = p.constraint.qr.q;
  const DenseMatrix qt = q.transpose();
  const ObjectiveOracle& f = p.objective;
  ObjectiveOracle g;
  g.dimension = f.dimension;
  g.value = [q, f](const Vector& xp) { return f.value(q * xp); };
  g.gradient = [q, qt, f](const Vector& xp) { return qt * f.gradient(q * xp); };
  g.declared_l = f.declared_l;  // orthogonal transform preserves the constant
  g.declared_mu = f.declared_mu;
  g.convexity = f.convexity;
  g.kind = "custom";
  return g;
}

double kkt_residual(const ProblemInstance& p, const Vector& x, const Vector& lambda) {
  if (x.size() != p.n() || lambda.size() != p.m())
    throw DimensionMismatch("kkt_residual: dimension mismatch");
  const Vector g = p.objective.gradient(x);
  const Vector tl = p.constraint.t.transpose() * lambda;
  const Vector station = axpy(1.0, g, tl);
  Vector feas = p.constraint.t * x;
  for (std::size_t i = 0; i < feas.size(); ++i) feas[i] -= p.constraint.b[i];
  return std::max(max_abs(station), max_abs(feas));
}

SmoothnessEstimate estimate_smoothness(const ObjectiveOracle& o, std::size_t samples,
                                       double box_lo, double box_hi, std::uint64_t seed) {
  if (samples < 100) throw ConfigError("estimate_smoothness: need at least 100 samples");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(box_lo, box_hi);

  SmoothnessEstimate est;
  est.l_hat = -std::numeric_limits<double>::infinity();
  est.mu_hat = std::numeric_limits<double>::infinity();
  est.cocoercivity_hat = 0.0;
  Vector witness_x, witness_y;

  const bool rsi = (o.convexity == ConvexityClass::Rsi) && o.rsi_reference.has_value();
  for (std::size_t k = 0; k < samples; ++k) {
    Vector x(o.dimension), y(o.dimension);
    for (double& v : x) v = dist(rng);
    if (rsi) {
      y = *o.rsi_reference;
    } else {
      for (double& v : y) v = dist(rng);
    }
    Vector dx = x;
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] -= y[i];
    const double nx2 = dot(dx, dx);
    if (nx2 < 1e-16) continue;
    Vector dg = o.gradient(x);
    const Vector gy = o.gradient(y);
    for (std::size_t i = 0; i < dg.size(); ++i) dg[i] -= gy[i];
    const double inner = dot(dg, dx);
    const double quot = inner / nx2;
    if (quot > est.l_hat) {
      est.l_hat = quot;
      witness_x = x;
      witness_y = y;
    }
    est.mu_hat = std::min(est.mu_hat, quot);
    if (inner > 1e-14)
      est.cocoercivity_hat = std::max(est.cocoercivity_hat, dot(dg, dg) / inner);
  }

  if (est.l_hat > o.declared_l + 1e-6) {
    std::ostringstream msg;
    msg << "declared Lipschitz constant " << o.declared_l
        << " violated: secant quotient " << est.l_hat << " at x=(";
    for (std::size_t i = 0; i < witness_x.size(); ++i)
      msg << (i ? "," : "") << witness_x[i];
    msg << ") y=(";
    for (std::size_t i = 0; i < witness_y.size(); ++i)
      msg << (i ? "," : "") << witness_y[i];
    msg << ")";
    throw DeclarationViolated(msg.str());
  }
  return est;
}

std::vector<ProblemInstance> builtin_library() {
  std::vector<ProblemInstance> lib;

  {  // (a) strongly convex quadratic with a single linear constraint
    ProblemInstance p;
    p.name = "sc_quadratic";
    p.objective = quadratic_objective(DenseMatrix::identity(2), Vector{0.0, 0.0}, 1.0,
                                      ConvexityClass::PartiallyStronglyConvex);
    p.constraint = EqualityConstraint(DenseMatrix(1, 2, {1.0, 1.0}), Vector{1.0});
    p.alpha = 1.0;
    p.known_solution = KktPoint{Vector{0.5, 0.5}, Vector{-0.5}};
    lib.push_back(std::move(p));
  }
  {  // (b) convex quadratic, strongly convex only along null(T)
    DenseMatrix hess(2, 2);
    hess(1, 1) = 1.0;
    ProblemInstance p;
    p.name = "partial_sc";
    p.objective = quadratic_objective(hess, Vector{1.0, 0.0}, 1.0,
                                      ConvexityClass::PartiallyStronglyConvex);
    p.constraint = EqualityConstraint(DenseMatrix(1, 2, {1.0, 0.0}), Vector{1.0});
    p.alpha = 1.0;
    p.known_solution = KktPoint{Vector{1.0, 0.0}, Vector{-1.0}};
    lib.push_back(std::move(p));
  }
  {  // (c) zero objective, m = n
    ProblemInstance p;
    p.name = "zero_identity";
    p.objective = zero_objective(2);
    p.constraint = EqualityConstraint(DenseMatrix::identity(2), Vector{1.0, 2.0});
    p.alpha = 1.0;
    p.known_solution = KktPoint{Vector{1.0, 2.0}, Vector{0.0, 0.0}};
    lib.push_back(std::move(p));
  }
  {  // (d) affine objective, m = n (oscillation demo for the standard flow)
    ProblemInstance p;
    p.name = "affine_identity";
    p.objective = affine_objective(Vector{1.0, -1.0});
    p.constraint = EqualityConstraint(DenseMatrix::identity(2), Vector{1.0, 2.0});
    p.alpha = 1.0;
    p.known_solution = KktPoint{Vector{1.0, 2.0}, Vector{-1.0, 1.0}};
    lib.push_back(std::move(p));
  }
  {  // (e) nonconvex RSI scalar instance
    ProblemInstance p;
    p.name = "rsi_scalar";
    p.objective = rsi_scalar_objective();
    p.constraint = EqualityConstraint(DenseMatrix(1, 1, {1.0}), Vector{0.0});
    p.alpha = 1.0;
    p.known_solution = KktPoint{Vector{0.0}, Vector{0.0}};
    lib.push_back(std::move(p));
  }
  return lib;
}

ProblemInstance builtin_instance(const std::string& name) {
  for (ProblemInstance& p : builtin_library())
    if (p.name == name) return std::move(p);
  throw ConfigError("unknown library instance: " + name);
}

}  // namespace pdflow
