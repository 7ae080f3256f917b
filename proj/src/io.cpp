#include "pdflow/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace pdflow {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("PDFLOW_LOG");
    if (!env) return LogLevel::Error;
    const std::string s(env);
    if (s == "debug") return LogLevel::Debug;
    if (s == "info") return LogLevel::Info;
    return LogLevel::Error;
  }();
  return level;
}

void log_error(const std::string& msg) { std::cerr << "[pdflow] error: " << msg << "\n"; }

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::cerr << "[pdflow] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::Debug) std::cerr << "[pdflow] debug: " << msg << "\n";
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("atomic_write_file: cannot open " + tmp.string());
    out << content;
    if (!out) throw Error("atomic_write_file: write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trajectory_csv(const Trajectory& traj) {
  const std::size_t n = traj.xs.empty() ? 0 : traj.xs.front().size();
  const std::size_t m = traj.lambdas.empty() ? 0 : traj.lambdas.front().size();
  std::string out = "t";
  for (std::size_t i = 1; i <= n; ++i) out += ",x_" + std::to_string(i);
  for (std::size_t i = 1; i <= m; ++i) out += ",lambda_" + std::to_string(i);
  out += ",err_norm\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out += format_double(traj.times[k]);
    for (double v : traj.xs[k]) out += "," + format_double(v);
    for (double v : traj.lambdas[k]) out += "," + format_double(v);
    out += ",";
    out += traj.reference ? format_double(traj.error_norms[k]) : "nan";
    out += "\n";
  }
  return out;
}

std::string consensus_csv(const std::vector<double>& times,
                          const std::vector<double>& consensus) {
  std::string out = "t,consensus_error\n";
  for (std::size_t k = 0; k < times.size(); ++k)
    out += format_double(times[k]) + "," + format_double(consensus[k]) + "\n";
  return out;
}

namespace {

Json matrix_rowmajor(const DenseMatrix& m) {
  Json a = Json::array();
  for (double v : m.data()) a.push_back(v);
  return a;
}

DenseMatrix matrix_from_rowmajor(const Json& a, std::size_t rows, std::size_t cols,
                                 const std::string& field) {
  if (!a.is_array() || a.size() != rows * cols)
    throw ConfigError("field '" + field + "': expected " + std::to_string(rows * cols) +
                      " row-major entries");
  DenseMatrix m(rows, cols);
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!a[k].is_number()) throw ConfigError("field '" + field + "': non-numeric entry");
    m.data()[k] = a[k].get<double>();
  }
  return m;
}

Vector vector_from_json(const Json& a, const std::string& field) {
  if (!a.is_array()) throw ConfigError("field '" + field + "': expected an array");
  Vector v;
  for (const auto& e : a) {
    if (!e.is_number()) throw ConfigError("field '" + field + "': non-numeric entry");
    v.push_back(e.get<double>());
  }
  return v;
}

}  // namespace

ObjectiveOracle objective_from_json(const Json& j, std::size_t n) {
  if (!j.contains("kind")) throw ConfigError("objective: missing 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  const Json params = j.value("parameters", Json::object());
  if (kind == "zero") return zero_objective(n);
  if (kind == "affine") {
    const Vector c = vector_from_json(params.at("c"), "objective.parameters.c");
    if (c.size() != n) throw ConfigError("objective: affine 'c' has wrong dimension");
    return affine_objective(c);
  }
  if (kind == "quadratic") {
    const DenseMatrix p =
        matrix_from_rowmajor(params.at("p"), n, n, "objective.parameters.p");
    Vector q(n, 0.0);
    if (params.contains("q")) q = vector_from_json(params.at("q"), "objective.parameters.q");
    if (q.size() != n) throw ConfigError("objective: quadratic 'q' has wrong dimension");
    const double mu = params.value("mu", 0.0);
    ConvexityClass cls = ConvexityClass::Convex;
    if (params.contains("class"))
      cls = convexity_class_from_string(params.at("class").get<std::string>());
    else if (mu > 0.0)
      cls = ConvexityClass::PartiallyStronglyConvex;
    return quadratic_objective(p, q, mu, cls);
  }
  if (kind == "rsi_scalar") {
    if (n != 1) throw ConfigError("objective: rsi_scalar is one-dimensional");
    return rsi_scalar_objective();
  }
  if (kind == "sin_squared") {
    if (n != 1) throw ConfigError("objective: sin_squared is one-dimensional");
    if (!params.contains("a") || !params.at("a").is_number())
      throw ConfigError("objective: sin_squared requires numeric parameter 'a'");
    return sin_squared_objective(params.at("a").get<double>());
  }
  throw ConfigError("objective: unknown kind '" + kind + "'");
}

Json problem_to_json(const ProblemInstance& p) {
  if (p.objective.kind == "custom")
    throw ConfigError("problem_to_json: custom oracles are not serializable");
  Json j;
  j["name"] = p.name;
  j["n"] = p.n();
  j["m"] = p.m();
  j["T"] = matrix_rowmajor(p.constraint.t);
  j["b"] = p.constraint.b;
  j["alpha"] = p.alpha;
  Json obj;
  obj["kind"] = p.objective.kind;
  Json params = Json::object();
  if (p.objective.kind == "affine") params["c"] = p.objective.lin;
  if (p.objective.kind == "sin_squared") params["a"] = p.objective.lin.front();
  if (p.objective.kind == "quadratic") {
    params["p"] = matrix_rowmajor(p.objective.quad);
    params["q"] = p.objective.lin;
    params["mu"] = p.objective.declared_mu;
    params["class"] = to_string(p.objective.convexity);
  }
  obj["parameters"] = params;
  j["objective"] = obj;
  j["declared_l"] = p.objective.declared_l;
  j["declared_mu"] = p.objective.declared_mu;
  return j;
}

ProblemInstance problem_from_json(const Json& j) {
  for (const char* field : {"n", "m", "T", "b", "objective"})
    if (!j.contains(field))
      throw ConfigError(std::string("problem: missing field '") + field + "'");
  const auto n = j.at("n").get<std::size_t>();
  const auto m = j.at("m").get<std::size_t>();
  if (n == 0 || m == 0 || m > n) throw ConfigError("problem: need 1 <= m <= n");

  ProblemInstance p;
  p.name = j.value("name", std::string("unnamed"));
  p.constraint = EqualityConstraint(matrix_from_rowmajor(j.at("T"), m, n, "T"),
                                    vector_from_json(j.at("b"), "b"));
  if (p.constraint.b.size() != m) throw ConfigError("problem: 'b' has wrong dimension");
  p.alpha = j.value("alpha", 1.0);
  if (p.alpha <= 0.0) throw ConfigError("problem: 'alpha' must be positive");
  p.objective = objective_from_json(j.at("objective"), n);
  if (j.contains("declared_l")) p.objective.declared_l = j.at("declared_l").get<double>();
  if (j.contains("declared_mu")) p.objective.declared_mu = j.at("declared_mu").get<double>();
  if (p.objective.declared_l <= 0.0)
    throw ConfigError("problem: 'declared_l' must be positive");
  return p;
}

Json graph_to_json(const Graph& g) {
  Json j;
  j["n_nodes"] = g.n_nodes;
  Json edges = Json::array();
  for (const auto& [a, b] : g.edges) edges.push_back(Json::array({a + 1, b + 1}));
  j["edges"] = edges;
  if (!g.weights.empty()) j["weights"] = g.weights;
  return j;
}

Graph graph_from_json(const Json& j) {
  if (!j.contains("n_nodes") || !j.contains("edges"))
    throw ConfigError("graph: requires 'n_nodes' and 'edges'");
  Graph g;
  g.n_nodes = j.at("n_nodes").get<std::size_t>();
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2)
      throw ConfigError("graph: each edge must be a pair [i, j]");
    const auto a = e[0].get<std::size_t>();
    const auto b = e[1].get<std::size_t>();
    if (a < 1 || b < 1 || a > g.n_nodes || b > g.n_nodes)
      throw ConfigError("graph: edge index out of range (1-based)");
    if (a == b) throw ConfigError("graph: self-loops are not allowed");
    g.edges.emplace_back(a - 1, b - 1);
  }
  if (j.contains("weights")) {
    g.weights = vector_from_json(j.at("weights"), "weights");
    if (g.weights.size() != g.edges.size())
      throw ConfigError("graph: weights size must match edge count");
  }
  return g;
}

Json certificate_to_json(const RateCertificate& cert) {
  Json j;
  j["rho_certified"] = cert.rho_certified;
  j["abscissa"] = cert.abscissa;
  j["tolerance"] = cert.tolerance;
  Json grid;
  grid["min"] = cert.grid.omega_min;
  grid["max"] = cert.grid.omega_max;
  grid["points"] = cert.grid.points;
  grid["scale"] = "log";
  j["grid"] = grid;
  j["worst_margin"] = cert.worst_margin;
  j["worst_omega"] = cert.worst_omega;
  j["frame"] = to_string(cert.frame);
  return j;
}

}  // namespace pdflow
