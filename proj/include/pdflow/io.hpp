#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "pdflow/certify.hpp"
#include "pdflow/dynamics.hpp"
#include "pdflow/graph.hpp"
#include "pdflow/problem.hpp"

namespace pdflow {

using Json = nlohmann::ordered_json;

// ---- logging ---------------------------------------------------------------
// Level comes from PDFLOW_LOG in {error, info, debug}; default error.
enum class LogLevel { Error = 0, Info = 1, Debug = 2 };
LogLevel log_level();
void log_error(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

// ---- files -----------------------------------------------------------------
/// Writes content to path atomically (temp file in the same directory + rename).
void atomic_write_file(const std::string& path, const std::string& content);

/// 17 significant digits, locale-independent.
std::string format_double(double v);

// ---- trajectory CSV --------------------------------------------------------
// Header: t,x_1..x_n,lambda_1..lambda_m,err_norm; one row per recorded sample;
// err_norm is nan when no reference equilibrium is attached.
std::string trajectory_csv(const Trajectory& traj);

/// CSV with header t,consensus_error.
std::string consensus_csv(const std::vector<double>& times,
                          const std::vector<double>& consensus);

// ---- problem JSON ----------------------------------------------------------
// {name, n, m, T (row-major), b, alpha, objective: {kind, parameters},
//  declared_l, declared_mu}
Json problem_to_json(const ProblemInstance& p);
ProblemInstance problem_from_json(const Json& j);

ObjectiveOracle objective_from_json(const Json& j, std::size_t n);

// ---- graph JSON ------------------------------------------------------------
// {n_nodes, edges: [[i, j], ...], weights optional}; indices 1-based.
Json graph_to_json(const Graph& g);
Graph graph_from_json(const Json& j);

// ---- certificate JSON ------------------------------------------------------
// {rho_certified, abscissa, tolerance, grid: {min, max, points, scale},
//  worst_margin, worst_omega, frame}
Json certificate_to_json(const RateCertificate& cert);

}  // namespace pdflow
