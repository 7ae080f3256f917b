// Python bindings for the core operations: problem library, flow integration
// with rate fitting, certification, and the dense linear-algebra kernels.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "pdflow/certify.hpp"
#include "pdflow/dynamics.hpp"
#include "pdflow/graph.hpp"
#include "pdflow/io.hpp"

namespace py = pybind11;
using namespace pdflow;

namespace {

DenseMatrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return DenseMatrix();
  DenseMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols())
      throw DimensionMismatch("matrix rows must have equal length");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<std::vector<double>> rows_from_matrix(const DenseMatrix& m) {
  std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  return rows;
}

ProblemInstance problem_from_spec(const std::string& spec) {
  if (!spec.empty() && spec.front() == '{')
    return problem_from_json(Json::parse(spec));
  return builtin_instance(spec);
}

py::dict fit_dict(const std::optional<RateFit>& fit) {
  py::dict d;
  d["rho_hat"] = fit ? py::object(py::float_(fit->rho_hat)) : py::none();
  d["c_hat"] = fit ? py::object(py::float_(fit->c_hat)) : py::none();
  d["r_squared"] = fit ? py::object(py::float_(fit->r_squared)) : py::none();
  return d;
}

py::dict solve(const std::string& problem, const std::string& flow, double horizon,
               double step, std::size_t stride, double window_fraction) {
  const ProblemInstance p = problem_from_spec(problem);
  IntegrateOptions opts;
  opts.horizon = horizon;
  opts.step = step;
  opts.stride = stride;
  opts.reference = p.known_solution ? p.known_solution
                                    : std::optional<KktPoint>(equilibrium_solve(p));
  const Trajectory traj = integrate(p, flow_kind_from_string(flow),
                                    {Vector(p.n(), 0.0), Vector(p.m(), 0.0)}, opts);
  std::optional<RateFit> fit;
  try {
    fit = fit_rate(traj, window_fraction);
  } catch (const InsufficientDecay&) {
  }

  py::dict d = fit_dict(fit);
  d["x_final"] = traj.xs.back();
  d["lambda_final"] = traj.lambdas.back();
  d["kkt_residual"] = kkt_residual(p, traj.xs.back(), traj.lambdas.back());
  d["times"] = traj.times;
  d["error_norms"] = traj.error_norms;
  return d;
}

py::dict certify(const std::string& problem, const std::string& frame,
                 std::optional<double> mu, std::size_t grid_points, double tol) {
  const ProblemInstance p = problem_from_spec(problem);
  std::string fr = frame;
  if (fr == "auto") fr = (p.m() == p.n()) ? "original" : "transformed";
  GridSpec grid;
  grid.points = grid_points;
  const ErrorSystem sys =
      (frame_from_string(fr) == Frame::Original)
          ? build_error_system(p)
          : build_transformed_system(p, mu.value_or(p.objective.declared_mu));
  const RateCertificate cert = certify_rate(sys, grid, tol);
  py::dict d;
  d["rho_certified"] = cert.rho_certified;
  d["abscissa"] = cert.abscissa;
  d["worst_margin"] = cert.worst_margin;
  d["worst_omega"] = cert.worst_omega;
  d["frame"] = to_string(cert.frame);
  return d;
}

py::dict compare(const std::string& problem, double horizon, double step) {
  const ProblemInstance p = problem_from_spec(problem);
  if (p.m() != p.n()) throw ConfigError("compare requires m = n");
  IntegrateOptions opts;
  opts.horizon = horizon;
  opts.step = step;
  opts.stride = 10;
  opts.reference = p.known_solution ? p.known_solution
                                    : std::optional<KktPoint>(equilibrium_solve(p));
  const KktPoint z0{Vector(p.n(), 0.0), Vector(p.m(), 0.0)};
  py::dict d;
  for (const FlowKind flow : {FlowKind::Standard, FlowKind::Augmented}) {
    std::optional<RateFit> fit;
    try {
      fit = fit_rate(integrate(p, flow, z0, opts), 0.6);
    } catch (const InsufficientDecay&) {
    }
    d[to_string(flow).c_str()] = fit_dict(fit);
  }
  return d;
}

py::dict run_distributed(const std::vector<std::string>& agent_kinds,
                         const std::vector<double>& agent_params,
                         const std::vector<double>& x0, const std::string& graph_kind,
                         double alpha, double sum_mu, bool sum_rsi, double horizon,
                         double step) {
  if (agent_kinds.size() != agent_params.size() || agent_kinds.size() != x0.size())
    throw ConfigError("agent kinds, parameters, and x0 must have equal length");
  DistributedProblem dp;
  dp.local_dim = 1;
  dp.alpha = alpha;
  dp.sum_mu = sum_mu;
  dp.sum_condition = sum_rsi ? SumCondition::Rsi : SumCondition::StronglyConvex;
  for (std::size_t i = 0; i < agent_kinds.size(); ++i) {
    if (agent_kinds[i] == "quadratic")
      dp.agents.push_back(quadratic_objective(DenseMatrix(1, 1, {agent_params[i]}),
                                              Vector{0.0}, 0.0, ConvexityClass::Custom));
    else if (agent_kinds[i] == "sin_squared")
      dp.agents.push_back(sin_squared_objective(agent_params[i]));
    else
      throw ConfigError("unknown agent kind: " + agent_kinds[i]);
  }
  dp.graph = build_graph(graph_kind_from_string(graph_kind), dp.agents.size());
  audit_sum_condition(dp);

  const ProblemInstance stacked = stacked_instance(dp);
  IntegrateOptions opts;
  opts.horizon = horizon;
  opts.step = step;
  opts.stride = 100;
  opts.reference = equilibrium_solve(stacked);
  const Trajectory traj =
      integrate(stacked, FlowKind::DistributedPi, {x0, Vector(x0.size(), 0.0)}, opts);

  std::optional<RateFit> fit;
  try {
    fit = fit_rate(traj, 0.6);
  } catch (const InsufficientDecay&) {
  }
  py::dict d = fit_dict(fit);
  d["x_final"] = traj.xs.back();
  d["consensus_error"] = consensus_error(traj.xs.back(), dp.graph.n_nodes, 1);
  d["gradient_sum_norm"] = gradient_sum_norm(dp, traj.xs.back());
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Augmented primal-dual gradient flows: solver and rate certifier";

  py::register_exception<NotCertifiable>(m, "NotCertifiableError");
  py::register_exception<Diverged>(m, "DivergedError");
  py::register_exception<ConfigError>(m, "ConfigErrorException");

  m.def("library_names", [] {
    std::vector<std::string> names;
    for (const ProblemInstance& p : builtin_library()) names.push_back(p.name);
    return names;
  });
  m.def("problem_json", [](const std::string& name) {
    return problem_to_json(builtin_instance(name)).dump(2);
  });

  m.def("solve", &solve, py::arg("problem"), py::arg("flow") = "augmented",
        py::arg("horizon") = 30.0, py::arg("step") = 1e-3, py::arg("stride") = 10,
        py::arg("window_fraction") = 0.6);
  m.def("certify", &certify, py::arg("problem"), py::arg("frame") = "auto",
        py::arg("mu") = py::none(), py::arg("grid_points") = 200, py::arg("tol") = 1e-9);
  m.def("compare", &compare, py::arg("problem"), py::arg("horizon") = 50.0,
        py::arg("step") = 1e-3);
  m.def("run_distributed", &run_distributed, py::arg("agent_kinds"),
        py::arg("agent_params"), py::arg("x0"), py::arg("graph_kind") = "path",
        py::arg("alpha") = 1.0, py::arg("sum_mu") = 0.0, py::arg("sum_rsi") = false,
        py::arg("horizon") = 50.0, py::arg("step") = 1e-3);

  m.def("qr_factors", [](const std::vector<std::vector<double>>& rows) {
    const QRFactors f = qr_decompose(matrix_from_rows(rows));
    py::dict d;
    d["q"] = rows_from_matrix(f.q);
    d["r1"] = rows_from_matrix(f.r1);
    d["q1"] = rows_from_matrix(f.q1);
    d["q2"] = rows_from_matrix(f.q2);
    return d;
  });
  m.def("symmetric_eigenvalues", [](const std::vector<std::vector<double>>& rows) {
    return symmetric_eigen(matrix_from_rows(rows)).eigenvalues;
  });
  m.def("spectral_abscissa", [](const std::vector<std::vector<double>>& rows) {
    return spectral_abscissa(matrix_from_rows(rows));
  });
  m.def("hurwitz_check", [](const std::vector<std::vector<double>>& f,
                            const std::vector<std::vector<double>>& t) {
    const HurwitzReport r = hurwitz_check(matrix_from_rows(f), matrix_from_rows(t));
    return py::make_tuple(r.structural, r.abscissa);
  });
}
