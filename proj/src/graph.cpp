#include "pdflow/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace pdflow {

GraphKind graph_kind_from_string(const std::string& s) {
  if (s == "path") return GraphKind::Path;
  if (s == "cycle") return GraphKind::Cycle;
  if (s == "complete") return GraphKind::Complete;
  if (s == "random_connected") return GraphKind::RandomConnected;
  throw ConfigError("unknown graph kind: " + s);
}

namespace {

bool connected(const Graph& g) {
  if (g.n_nodes == 0) return false;
  std::vector<std::vector<std::size_t>> adj(g.n_nodes);
  for (const auto& [i, j] : g.edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<bool> seen(g.n_nodes, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        stack.push_back(w);
      }
  }
  return count == g.n_nodes;
}

}  // namespace

Graph build_graph(GraphKind kind, std::size_t n_nodes, std::uint64_t seed) {
  if (n_nodes < 2) throw ConfigError("build_graph: need at least 2 nodes");
  Graph g;
  g.n_nodes = n_nodes;
  switch (kind) {
    case GraphKind::Path:
      for (std::size_t i = 0; i + 1 < n_nodes; ++i) g.edges.emplace_back(i, i + 1);
      break;
    case GraphKind::Cycle:
      for (std::size_t i = 0; i + 1 < n_nodes; ++i) g.edges.emplace_back(i, i + 1);
      g.edges.emplace_back(n_nodes - 1, 0);
      break;
    case GraphKind::Complete:
      for (std::size_t i = 0; i < n_nodes; ++i)
        for (std::size_t j = i + 1; j < n_nodes; ++j) g.edges.emplace_back(i, j);
      break;
    case GraphKind::RandomConnected: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const double p =
          std::min(1.0, 2.0 * std::log(static_cast<double>(n_nodes)) /
                            static_cast<double>(n_nodes));
      for (int attempt = 0; attempt < 10000; ++attempt) {
        g.edges.clear();
        for (std::size_t i = 0; i < n_nodes; ++i)
          for (std::size_t j = i + 1; j < n_nodes; ++j)
            if (u(rng) < p) g.edges.emplace_back(i, j);
        if (connected(g)) return g;
      }
      throw NoConvergence("build_graph: failed to draw a connected graph");
    }
  }
  return g;
}

DenseMatrix laplacian_matrix(const Graph& g) {
  DenseMatrix l(g.n_nodes, g.n_nodes);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto [i, j] = g.edges[e];
    if (i == j) throw ConfigError("laplacian_matrix: self-loop");
    if (i >= g.n_nodes || j >= g.n_nodes)
      throw ConfigError("laplacian_matrix: edge index out of range");
    const double w = g.weight(e);
    l(i, i) += w;
    l(j, j) += w;
    l(i, j) -= w;
    l(j, i) -= w;
  }
  return l;
}

LaplacianTransform laplacian_transform(const Graph& g) {
  const std::size_t n = g.n_nodes;
  LaplacianTransform t;
  t.l = laplacian_matrix(g);
  const SymmetricEigen se = symmetric_eigen(t.l);
  if (n < 2 || se.eigenvalues[1] <= 1e-10)
    throw Disconnected("laplacian_transform: second-smallest eigenvalue <= 1e-10");

  // Ascending nonzero eigenpairs first, the exact normalized kernel vector last.
  t.lambda.assign(se.eigenvalues.begin() + 1, se.eigenvalues.end());
  t.q1 = DenseMatrix(n, n - 1);
  for (std::size_t k = 1; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) t.q1(i, k - 1) = se.eigenvectors(i, k);
  t.q2 = DenseMatrix(n, 1);
  const double inv = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) t.q2(i, 0) = inv;

  t.q = DenseMatrix(n, n);
  t.q.set_block(0, 0, t.q1);
  t.q.set_block(0, n - 1, t.q2);
  return t;
}

namespace {

DenseMatrix kron_identity(const DenseMatrix& a, std::size_t d) {
  DenseMatrix out(a.rows() * d, a.cols() * d);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double v = a(i, j);
      if (v == 0.0) continue;
      for (std::size_t k = 0; k < d; ++k) out(i * d + k, j * d + k) = v;
    }
  return out;
}

ObjectiveOracle stacked_oracle(const DistributedProblem& dp) {
  const std::size_t d = dp.local_dim;
  const std::size_t total = dp.stacked_dim();
  std::vector<ObjectiveOracle> agents = dp.agents;
  ObjectiveOracle o;
  o.dimension = total;
  o.value = [agents, d](const Vector& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const Vector xi(x.begin() + i * d, x.begin() + (i + 1) * d);
      s += agents[i].value(xi);
    }
    return s;
  };
  o.gradient = [agents, d, total](const Vector& x) {
    Vector g(total);
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const Vector xi(x.begin() + i * d, x.begin() + (i + 1) * d);
      const Vector gi = agents[i].gradient(xi);
      std::copy(gi.begin(), gi.end(), g.begin() + i * d);
    }
    return g;
  };
  o.declared_l = 0.0;
  for (const ObjectiveOracle& a : agents) o.declared_l = std::max(o.declared_l, a.declared_l);
  if (o.declared_l == 0.0) o.declared_l = 1.0;
  o.declared_mu = 0.0;
  o.convexity = ConvexityClass::Custom;
  o.kind = "custom";
  return o;
}

}  // namespace

ProblemInstance stacked_instance(const DistributedProblem& dp) {
  if (dp.agents.size() < 2)
    throw ConfigError("stacked_instance: need at least 2 agents");
  for (const ObjectiveOracle& a : dp.agents)
    if (a.dimension != dp.local_dim)
      throw DimensionMismatch("stacked_instance: agent dimension mismatch");

  const LaplacianTransform lt = laplacian_transform(dp.graph);
  const std::size_t d = dp.local_dim;

  ProblemInstance p;
  p.name = "distributed_stacked";
  p.objective = stacked_oracle(dp);

  // Full-row-rank reduction of {Lx = 0}: rows (Lambda Q1^T) (x) I.
  DenseMatrix lam_q1t(lt.q1.cols(), lt.q1.rows());
  for (std::size_t i = 0; i < lt.q1.cols(); ++i)
    for (std::size_t j = 0; j < lt.q1.rows(); ++j)
      lam_q1t(i, j) = lt.lambda[i] * lt.q1(j, i);
  p.constraint = EqualityConstraint(kron_identity(lam_q1t, d),
                                    Vector((dp.agents.size() - 1) * d, 0.0));
  p.alpha = dp.alpha;
  p.penalty = PenaltyKind::LaplacianDrift;
  p.drift = kron_identity(lt.l, d);
  p.stacked = StackedGraphPayload{p.drift, dp.agents.size(), d};
  return p;
}

ProblemInstance embed_as_constrained(const DistributedProblem& dp) {
  if (dp.agents.size() < 2)
    throw ConfigError("embed_as_constrained: a single agent yields no constraint rows");
  for (const ObjectiveOracle& a : dp.agents)
    if (a.dimension != dp.local_dim)
      throw DimensionMismatch("embed_as_constrained: agent dimension mismatch");

  const LaplacianTransform lt = laplacian_transform(dp.graph);
  const std::size_t nagents = dp.agents.size();
  const std::size_t d = dp.local_dim;
  const std::size_t total = nagents * d;
  const DenseMatrix bigq = kron_identity(lt.q, d);

  // T = [Lambda (x) I, 0], full row rank since Lambda is positive definite.
  DenseMatrix t((nagents - 1) * d, total);
  for (std::size_t i = 0; i < nagents - 1; ++i)
    for (std::size_t k = 0; k < d; ++k) t(i * d + k, i * d + k) = lt.lambda[i];

  ProblemInstance p;
  p.name = "distributed_embedded";
  const ObjectiveOracle stacked = stacked_oracle(dp);
  ObjectiveOracle g;
  g.dimension = total;
  g.value = [stacked, bigq](const Vector& xp) { return stacked.value(bigq * xp); };
  const DenseMatrix bigqt = bigq.transpose();
  g.gradient = [stacked, bigq, bigqt](const Vector& xp) {
    return bigqt * stacked.gradient(bigq * xp);
  };
  g.declared_l = stacked.declared_l;
  g.declared_mu = dp.sum_mu / static_cast<double>(nagents);
  g.convexity = ConvexityClass::PartiallyStronglyConvex;
  g.kind = "custom";
  p.objective = std::move(g);

  p.constraint = EqualityConstraint(std::move(t), Vector((nagents - 1) * d, 0.0));
  p.alpha = dp.alpha;
  p.penalty = PenaltyKind::LaplacianDrift;
  // Q^T (L (x) I) Q = blkdiag(Lambda, 0) (x) I.
  DenseMatrix drift(total, total);
  for (std::size_t i = 0; i < nagents - 1; ++i)
    for (std::size_t k = 0; k < d; ++k) drift(i * d + k, i * d + k) = lt.lambda[i];
  p.drift = std::move(drift);
  return p;
}

double consensus_error(const Vector& x_stacked, std::size_t n_nodes,
                       std::size_t local_dim) {
  if (x_stacked.size() != n_nodes * local_dim)
    throw DimensionMismatch("consensus_error: stacked dimension mismatch");
  Vector mean(local_dim, 0.0);
  for (std::size_t i = 0; i < n_nodes; ++i)
    for (std::size_t k = 0; k < local_dim; ++k) mean[k] += x_stacked[i * local_dim + k];
  for (double& v : mean) v /= static_cast<double>(n_nodes);
  double s = 0.0;
  for (std::size_t i = 0; i < n_nodes; ++i)
    for (std::size_t k = 0; k < local_dim; ++k) {
      const double dvi = x_stacked[i * local_dim + k] - mean[k];
      s += dvi * dvi;
    }
  return std::sqrt(s);
}

double gradient_sum_norm(const DistributedProblem& dp, const Vector& x_stacked) {
  Vector mean(dp.local_dim, 0.0);
  for (std::size_t i = 0; i < dp.agents.size(); ++i)
    for (std::size_t k = 0; k < dp.local_dim; ++k)
      mean[k] += x_stacked[i * dp.local_dim + k];
  for (double& v : mean) v /= static_cast<double>(dp.agents.size());
  Vector g(dp.local_dim, 0.0);
  for (const ObjectiveOracle& a : dp.agents) {
    const Vector gi = a.gradient(mean);
    for (std::size_t k = 0; k < dp.local_dim; ++k) g[k] += gi[k];
  }
  return norm2(g);
}

void audit_sum_condition(const DistributedProblem& dp, std::size_t samples,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  const bool rsi = dp.sum_condition == SumCondition::Rsi;
  const Vector ref = dp.sum_minimizer.empty() ? Vector(dp.local_dim, 0.0)
                                              : dp.sum_minimizer;

  auto sum_grad = [&](const Vector& w) {
    Vector g(dp.local_dim, 0.0);
    for (const ObjectiveOracle& a : dp.agents) {
      const Vector gi = a.gradient(w);
      for (std::size_t k = 0; k < dp.local_dim; ++k) g[k] += gi[k];
    }
    return g;
  };

  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    Vector x(dp.local_dim), y = ref;
    for (double& v : x) v = u(rng);
    if (!rsi)
      for (double& v : y) v = u(rng);
    Vector dx = x;
    for (std::size_t k = 0; k < dx.size(); ++k) dx[k] -= y[k];
    const double n2 = dot(dx, dx);
    if (n2 < 1e-16) continue;
    Vector dg = sum_grad(x);
    const Vector gy = sum_grad(y);
    for (std::size_t k = 0; k < dg.size(); ++k) dg[k] -= gy[k];
    worst = std::min(worst, dot(dg, dx) / n2);
  }
  if (worst < dp.sum_mu - 1e-9)
    throw DeclarationViolated("audit_sum_condition: sampled modulus " +
                              std::to_string(worst) + " undercuts declared " +
                              std::to_string(dp.sum_mu));
}

}  // namespace pdflow
