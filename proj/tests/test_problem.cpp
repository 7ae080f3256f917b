#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pdflow/io.hpp"
#include "pdflow/problem.hpp"

using namespace pdflow;

TEST_CASE("transformed oracle: rotation invariance of the isotropic quadratic") {
  const ProblemInstance p = builtin_instance("sc_quadratic");
  const ObjectiveOracle g = transformed_oracle(p);
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const Vector xp = oracles::random_vector(rng, 2, -3.0, 3.0);
    CHECK(g.value(xp) == doctest::Approx(0.5 * dot(xp, xp)).epsilon(1e-12));
  }
}

TEST_CASE("transformed oracle: composition f(Qx') at random points") {
  // f(x) = 0.5 x1^2 with a nontrivial Q coming from T = [1 1].
  DenseMatrix hess(2, 2);
  hess(0, 0) = 1.0;
  ProblemInstance p;
  p.objective = quadratic_objective(hess, Vector{0.0, 0.0}, 0.0, ConvexityClass::Convex);
  p.constraint = EqualityConstraint(DenseMatrix(1, 2, {1.0, 1.0}), Vector{0.0});
  const ObjectiveOracle g = transformed_oracle(p);
  const DenseMatrix q = p.constraint.qr.q;
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 10; ++rep) {
    const Vector xp = oracles::random_vector(rng, 2, -2.0, 2.0);
    CHECK(g.value(xp) == doctest::Approx(p.objective.value(q * xp)).epsilon(1e-12));
  }
}

TEST_CASE("transformed oracle: gradient matches finite differences") {
  const ProblemInstance p = builtin_instance("partial_sc");
  const ObjectiveOracle g = transformed_oracle(p);
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    const Vector xp = oracles::random_vector(rng, 2, -2.0, 2.0);
    const Vector grad = g.gradient(xp);
    const Vector fd = oracles::fd_gradient([&](const Vector& v) { return g.value(v); }, xp);
    for (std::size_t i = 0; i < 2; ++i)
      CHECK(grad[i] == doctest::Approx(fd[i]).epsilon(1e-5));
  }
}

TEST_CASE("kkt_residual: hand-solved instance and perturbations") {
  const ProblemInstance p = builtin_instance("sc_quadratic");
  CHECK(kkt_residual(p, {0.5, 0.5}, {-0.5}) <= 1e-12);

  // Infeasible by delta in the single constraint.
  const double delta = 0.37;
  CHECK(kkt_residual(p, {0.5 + delta, 0.5}, {-0.5}) >= delta - 1e-12);

  const ProblemInstance z = builtin_instance("zero_identity");
  CHECK(kkt_residual(z, {1.0, 2.0}, {0.0, 0.0}) == 0.0);
}

TEST_CASE("estimate_smoothness: quadratic quotients are exact") {
  const ObjectiveOracle o = quadratic_objective(3.0 * DenseMatrix::identity(3),
                                                Vector(3, 0.0), 3.0,
                                                ConvexityClass::PartiallyStronglyConvex);
  const SmoothnessEstimate est = estimate_smoothness(o, 500);
  CHECK(est.l_hat == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(est.mu_hat == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(est.cocoercivity_hat == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("estimate_smoothness: affine objectives have zero quotients") {
  const SmoothnessEstimate est = estimate_smoothness(affine_objective({1.0, -2.0}), 200);
  CHECK(est.l_hat == 0.0);
  CHECK(est.mu_hat == 0.0);
}

TEST_CASE("estimate_smoothness: rsi oracle stays within declared constants") {
  const ObjectiveOracle o = rsi_scalar_objective();
  const SmoothnessEstimate est = estimate_smoothness(o, 5000);
  CHECK(est.l_hat <= kRsiScalarL + 1e-6);
  // Pairs are (x, minimizer); the quotient floor is the shipped modulus.
  CHECK(est.mu_hat >= kRsiScalarMu);
  CHECK(est.mu_hat <= kRsiScalarL);
}

TEST_CASE("estimate_smoothness: declaration violations carry a witness") {
  ObjectiveOracle o = quadratic_objective(3.0 * DenseMatrix::identity(2), Vector(2, 0.0),
                                          0.0, ConvexityClass::Convex);
  o.declared_l = 1.0;  // understated on purpose
  CHECK_THROWS_AS(estimate_smoothness(o, 200), DeclarationViolated);
}

TEST_CASE("builtin library: known solutions satisfy the KKT conditions") {
  for (const ProblemInstance& p : builtin_library()) {
    REQUIRE(p.known_solution.has_value());
    CHECK(kkt_residual(p, p.known_solution->x, p.known_solution->lambda) <= 1e-8);
    CHECK(p.constraint.kappa1 > 0.0);
    CHECK(p.constraint.kappa2 >= p.constraint.kappa1);
  }
}

TEST_CASE("builtin library: fixed-by-constraint instance") {
  const ProblemInstance p = builtin_instance("zero_identity");
  CHECK(p.known_solution->x[0] == 1.0);
  CHECK(p.known_solution->x[1] == 2.0);
  CHECK(max_abs(p.known_solution->lambda) == 0.0);
}

TEST_CASE("rsi demo oracle: shipped modulus holds on a 1e4 grid") {
  const ObjectiveOracle o = rsi_scalar_objective();
  for (int k = 0; k < 10000; ++k) {
    const double x = -10.0 + 20.0 * (k + 0.5) / 10000.0;
    const double g = o.gradient({x})[0];
    CHECK(g * x >= kRsiScalarMu * x * x - 1e-12);
  }
}

TEST_CASE("orthogonal transform preserves the empirical Lipschitz estimate") {
  for (const char* name : {"sc_quadratic", "partial_sc"}) {
    const ProblemInstance p = builtin_instance(name);
    const SmoothnessEstimate base = estimate_smoothness(p.objective, 1000);
    ObjectiveOracle g = transformed_oracle(p);
    const SmoothnessEstimate turned = estimate_smoothness(g, 1000);
    CHECK(std::abs(base.l_hat - turned.l_hat) <= 1e-6);
  }
}

TEST_CASE("problem JSON: round trip for every serializable library instance") {
  std::mt19937_64 rng(77);
  for (const ProblemInstance& p : builtin_library()) {
    const Json j = problem_to_json(p);
    const ProblemInstance q = problem_from_json(j);
    CHECK(q.n() == p.n());
    CHECK(q.m() == p.m());
    CHECK((q.constraint.t - p.constraint.t).max_norm() == 0.0);
    CHECK(q.alpha == p.alpha);
    CHECK(q.objective.kind == p.objective.kind);
    CHECK(q.objective.declared_l == p.objective.declared_l);
    for (int rep = 0; rep < 5; ++rep) {
      const Vector x = oracles::random_vector(rng, p.n(), -4.0, 4.0);
      CHECK(q.objective.value(x) == doctest::Approx(p.objective.value(x)).epsilon(1e-12));
      const Vector g0 = p.objective.gradient(x);
      const Vector g1 = q.objective.gradient(x);
      for (std::size_t i = 0; i < g0.size(); ++i)
        CHECK(g1[i] == doctest::Approx(g0[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("problem JSON: parse errors carry field context") {
  Json j = problem_to_json(builtin_instance("sc_quadratic"));
  j.erase("T");
  CHECK_THROWS_WITH_AS(static_cast<void>(problem_from_json(j)),
                       doctest::Contains("'T'"), ConfigError);

  Json bad = problem_to_json(builtin_instance("sc_quadratic"));
  bad["alpha"] = -1.0;
  CHECK_THROWS_WITH_AS(static_cast<void>(problem_from_json(bad)),
                       doctest::Contains("alpha"), ConfigError);
}

TEST_CASE("library oracles: gradients match finite differences") {
  std::mt19937_64 rng(111);
  for (const ProblemInstance& p : builtin_library()) {
    const ObjectiveOracle& o = p.objective;
    for (int rep = 0; rep < 10; ++rep) {
      const Vector x = oracles::random_vector(rng, o.dimension, -3.0, 3.0);
      const Vector g = o.gradient(x);
      const Vector fd =
          oracles::fd_gradient([&](const Vector& v) { return o.value(v); }, x);
      for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(g[i] == doctest::Approx(fd[i]).epsilon(1e-5));
    }
    // Convex-class oracles: monotone secant quotients on sampled pairs.
    if (o.convexity == ConvexityClass::Convex ||
        o.convexity == ConvexityClass::PartiallyStronglyConvex) {
      const SmoothnessEstimate est = estimate_smoothness(o, 500);
      CHECK(est.mu_hat >= -1e-9);
    }
  }
}

TEST_CASE("partition spec: free coordinates complement the constrained block") {
  const PartitionSpec ps = free_partition(5, 2);
  CHECK(ps.set == std::vector<std::size_t>{2, 3, 4});
  CHECK(ps.complement() == std::vector<std::size_t>{0, 1});
}
