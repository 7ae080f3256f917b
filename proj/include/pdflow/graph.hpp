#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pdflow/problem.hpp"

namespace pdflow {

/// Undirected weighted graph; no self-loops; nodes are 0-based internally
/// (serialized 1-based).
struct Graph {
  std::size_t n_nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<double> weights;  // empty means unit weights

  double weight(std::size_t e) const { return weights.empty() ? 1.0 : weights[e]; }
};

enum class GraphKind { Path, Cycle, Complete, RandomConnected };

GraphKind graph_kind_from_string(const std::string& s);

/// Deterministic construction; random_connected draws Erdos-Renyi with
/// p = 2 ln(N) / N and rejects until connected.
Graph build_graph(GraphKind kind, std::size_t n_nodes, std::uint64_t seed = 0);

DenseMatrix laplacian_matrix(const Graph& g);

/// Eigenstructure of the Laplacian with the zero mode isolated:
/// Q = [Q1 Q2], Q2 = (1/sqrt(N)) * ones, Q^T L Q = blkdiag(Lambda, 0),
/// Lambda ascending positive. Throws Disconnected when the second-smallest
/// eigenvalue is at most 1e-10.
struct LaplacianTransform {
  DenseMatrix l;       // N x N
  DenseMatrix q1;      // N x (N-1)
  DenseMatrix q2;      // N x 1
  Vector lambda;       // N-1 positive eigenvalues, ascending
  DenseMatrix q;       // [Q1 Q2]
};

LaplacianTransform laplacian_transform(const Graph& g);

/// Declared global condition on the sum objective w -> sum_i f_i(w):
/// StronglyConvex audits secant quotients over random pairs; Rsi audits
/// quotients against the declared minimizer of the sum.
enum class SumCondition { StronglyConvex, Rsi };

/// One objective per agent, all on R^local_dim. sum_mu declares the modulus of
/// the global condition on the sum objective; audited by sampling, not trusted.
struct DistributedProblem {
  std::vector<ObjectiveOracle> agents;
  Graph graph;
  std::size_t local_dim = 1;
  double alpha = 1.0;
  double sum_mu = 0.0;
  SumCondition sum_condition = SumCondition::StronglyConvex;
  Vector sum_minimizer;  // RSI reference; zeros when empty

  std::size_t stacked_dim() const { return agents.size() * local_dim; }
};

/// Instance in original stacked coordinates; carries the stacked Laplacian for
/// the PI flow and an equivalent full-row-rank constraint reduction of
/// {Lx = 0} so the standard instance invariants hold.
ProblemInstance stacked_instance(const DistributedProblem& dp);

/// Transformed-coordinate instance with T = [Lambda (x) I, 0] and objective
/// x' -> sum_i f_i((Q (x) I) x' slice i); the certification machinery applies
/// to it unchanged. Throws ConfigError for a single agent (no constraint rows).
ProblemInstance embed_as_constrained(const DistributedProblem& dp);

/// Norm of the disagreement component: ||(I - (1/N) ones ones^T (x) I) x||.
double consensus_error(const Vector& x_stacked, std::size_t n_nodes,
                       std::size_t local_dim);

/// Stationarity of the sum objective at the mean state: ||sum_i grad f_i(xbar)||.
double gradient_sum_norm(const DistributedProblem& dp, const Vector& x_stacked);

/// Audits the declared global condition of the sum objective by sampling
/// (strong convexity for convex-class sums, RSI quotients for RSI sums).
/// Throws DeclarationViolated when the sampled modulus undercuts sum_mu.
void audit_sum_condition(const DistributedProblem& dp, std::size_t samples = 1000,
                         std::uint64_t seed = 2024);

}  // namespace pdflow
