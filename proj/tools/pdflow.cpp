// Experiment runner: load a problem, integrate a flow, fit rates, issue
// certificates, and run the distributed demos. One JSON config file plus flag
// overrides (flags win). Exit codes: 0 success, 2 config, 3 divergence,
// 4 not-certifiable.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "pdflow/certify.hpp"
#include "pdflow/dynamics.hpp"
#include "pdflow/graph.hpp"
#include "pdflow/io.hpp"

namespace fs = std::filesystem;
using namespace pdflow;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<double> horizon;
  std::optional<double> step;
  std::optional<double> alpha;
  std::optional<std::size_t> grid_points;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> frame;
};

struct Experiment {
  Json config = Json::object();
  std::string out_dir = "out";
  double horizon = 40.0;
  double step = 1e-3;
  std::size_t stride = 10;
  double window_fraction = 0.6;
  GridSpec grid;
  double tolerance = 1e-9;
  std::uint64_t seed = 0;
  std::string frame = "auto";
  std::optional<double> alpha_override;
  std::optional<double> mu_override;
};

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
}

double require_positive(const Json& j, const char* field, double fallback) {
  const double v = j.value(field, fallback);
  if (!(v > 0.0)) throw ConfigError(std::string("field '") + field + "' must be positive");
  return v;
}

Experiment make_experiment(const Overrides& ov) {
  Experiment e;
  if (!ov.config_path.empty()) e.config = load_json_file(ov.config_path);
  if (!e.config.is_object()) throw ConfigError("config root must be a JSON object");

  e.out_dir = e.config.value("out", std::string("out"));
  e.horizon = require_positive(e.config, "horizon", 40.0);
  e.step = require_positive(e.config, "step", 1e-3);
  e.stride = e.config.value("stride", std::size_t{10});
  e.window_fraction = require_positive(e.config, "window_fraction", 0.6);
  e.tolerance = e.config.value("tolerance", 1e-9);
  e.seed = e.config.value("seed", std::uint64_t{0});
  e.frame = e.config.value("frame", std::string("auto"));
  if (e.config.contains("alpha")) e.alpha_override = e.config.at("alpha").get<double>();
  if (e.config.contains("mu")) e.mu_override = e.config.at("mu").get<double>();
  if (e.config.contains("grid")) {
    const Json& g = e.config.at("grid");
    e.grid.omega_min = require_positive(g, "omega_min", e.grid.omega_min);
    e.grid.omega_max = require_positive(g, "omega_max", e.grid.omega_max);
    e.grid.points = g.value("points", e.grid.points);
  }

  if (ov.out) e.out_dir = *ov.out;
  if (ov.horizon) {
    if (!(*ov.horizon > 0.0)) throw ConfigError("field 'horizon' must be positive");
    e.horizon = *ov.horizon;
  }
  if (ov.step) {
    if (!(*ov.step > 0.0)) throw ConfigError("field 'step' must be positive");
    e.step = *ov.step;
  }
  if (ov.alpha) e.alpha_override = *ov.alpha;
  if (ov.grid_points) e.grid.points = *ov.grid_points;
  if (ov.seed) e.seed = *ov.seed;
  if (ov.frame) e.frame = *ov.frame;
  if (e.grid.points < 2) throw ConfigError("field 'grid.points' must be at least 2");
  return e;
}

ProblemInstance load_problem(const Experiment& e) {
  if (!e.config.contains("problem"))
    throw ConfigError("config requires a 'problem' (library name, file path, or inline)");
  const Json& pj = e.config.at("problem");
  ProblemInstance p = [&] {
    if (pj.is_string()) {
      const std::string s = pj.get<std::string>();
      try {
        return builtin_instance(s);
      } catch (const ConfigError&) {
        if (fs::exists(s)) return problem_from_json(load_json_file(s));
        throw;
      }
    }
    if (pj.is_object()) return problem_from_json(pj);
    throw ConfigError("field 'problem' must be a string or an object");
  }();
  if (e.alpha_override) {
    if (!(*e.alpha_override > 0.0)) throw ConfigError("field 'alpha' must be positive");
    p.alpha = *e.alpha_override;
  }
  return p;
}

KktPoint initial_state(const Experiment& e, std::size_t n, std::size_t m,
                       bool zero_dual = false) {
  KktPoint z0{Vector(n, 0.0), Vector(m, 0.0)};
  if (!e.config.contains("z0")) return z0;
  const Json& j = e.config.at("z0");
  if (j.is_string() && j.get<std::string>() == "random") {
    std::mt19937_64 rng(e.seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (double& v : z0.x) v = u(rng);
    if (!zero_dual)
      for (double& v : z0.lambda) v = u(rng);
    return z0;
  }
  if (!j.is_object()) throw ConfigError("field 'z0' must be \"random\" or an object");
  if (j.contains("x")) {
    z0.x = j.at("x").get<Vector>();
    if (z0.x.size() != n) throw ConfigError("field 'z0.x' has wrong dimension");
  }
  if (j.contains("lambda") && !zero_dual) {
    z0.lambda = j.at("lambda").get<Vector>();
    if (z0.lambda.size() != m) throw ConfigError("field 'z0.lambda' has wrong dimension");
  }
  return z0;
}

std::optional<KktPoint> resolve_reference(const ProblemInstance& p) {
  if (p.known_solution) return p.known_solution;
  try {
    return equilibrium_solve(p);
  } catch (const NoConvergence&) {
    return std::nullopt;
  }
}

Json fit_to_json(const std::optional<RateFit>& fit) {
  Json j;
  j["rho_hat"] = fit ? Json(fit->rho_hat) : Json(nullptr);
  j["c_hat"] = fit ? Json(fit->c_hat) : Json(nullptr);
  j["r_squared"] = fit ? Json(fit->r_squared) : Json(nullptr);
  return j;
}

int cmd_solve(const Experiment& e) {
  const ProblemInstance p = load_problem(e);
  const FlowKind flow = flow_kind_from_string(
      e.config.value("flow", std::string("augmented")));
  const bool pi = (flow == FlowKind::DistributedPi);
  if (pi && !p.stacked.has_value())
    throw ConfigError("distributed_pi needs a graph problem; use the distributed command");

  IntegrateOptions opts;
  opts.horizon = e.horizon;
  opts.step = e.step;
  opts.stride = e.stride;
  opts.reference = resolve_reference(p);

  const KktPoint z0 = initial_state(e, p.n(), pi ? p.n() : p.m(), pi);
  const Trajectory traj = integrate(p, flow, z0, opts);

  std::optional<RateFit> fit;
  if (opts.reference) {
    try {
      fit = fit_rate(traj, e.window_fraction);
    } catch (const InsufficientDecay&) {
    }
  }

  Json summary;
  summary["x_final"] = traj.xs.back();
  summary["lambda_final"] = traj.lambdas.back();
  summary["kkt_residual"] = flow_kkt_residual(p, traj.xs.back(), traj.lambdas.back());
  summary.update(fit_to_json(fit));

  atomic_write_file(e.out_dir + "/trajectory.csv", trajectory_csv(traj));
  atomic_write_file(e.out_dir + "/summary.json", summary.dump(2) + "\n");
  std::cout << "kkt_residual=" << format_double(summary["kkt_residual"].get<double>())
            << "\n";
  log_info("solve: wrote " + e.out_dir + "/trajectory.csv and summary.json");
  return 0;
}

int cmd_certify(const Experiment& e) {
  const ProblemInstance p = load_problem(e);
  std::string frame = e.frame;
  if (frame == "auto") frame = (p.m() == p.n()) ? "original" : "transformed";

  ErrorSystem sys;
  if (frame_from_string(frame) == Frame::Original) {
    sys = build_error_system(p);
  } else {
    const double mu = e.mu_override.value_or(p.objective.declared_mu);
    sys = build_transformed_system(p, mu);
  }
  const RateCertificate cert = certify_rate(sys, e.grid, e.tolerance);
  atomic_write_file(e.out_dir + "/certificate.json",
                    certificate_to_json(cert).dump(2) + "\n");
  std::cout << "rho_certified=" << format_double(cert.rho_certified) << "\n";
  return 0;
}

int cmd_compare(const Experiment& e) {
  const ProblemInstance p = load_problem(e);
  if (p.m() != p.n())
    throw ConfigError("compare requires m = n (square constraint)");
  if (p.objective.kind != "zero" && p.objective.kind != "affine")
    throw ConfigError("compare requires a zero or affine objective");

  IntegrateOptions opts;
  opts.horizon = e.horizon;
  opts.step = e.step;
  opts.stride = e.stride;
  opts.reference = resolve_reference(p);
  const KktPoint z0 = initial_state(e, p.n(), p.m());

  const Trajectory std_traj = integrate(p, FlowKind::Standard, z0, opts);
  const Trajectory aug_traj = integrate(p, FlowKind::Augmented, z0, opts);
  std::optional<RateFit> std_fit, aug_fit;
  if (opts.reference) {
    try {
      std_fit = fit_rate(std_traj, e.window_fraction);
    } catch (const InsufficientDecay&) {
    }
    try {
      aug_fit = fit_rate(aug_traj, e.window_fraction);
    } catch (const InsufficientDecay&) {
    }
  }

  atomic_write_file(e.out_dir + "/standard.csv", trajectory_csv(std_traj));
  atomic_write_file(e.out_dir + "/augmented.csv", trajectory_csv(aug_traj));
  Json summary;
  summary["standard"] = fit_to_json(std_fit);
  summary["augmented"] = fit_to_json(aug_fit);
  atomic_write_file(e.out_dir + "/compare.json", summary.dump(2) + "\n");

  std::cout << "standard rho_hat="
            << (std_fit ? format_double(std_fit->rho_hat) : "nan") << "\n";
  std::cout << "augmented rho_hat="
            << (aug_fit ? format_double(aug_fit->rho_hat) : "nan") << "\n";
  return 0;
}

DistributedProblem load_distributed(const Experiment& e) {
  if (!e.config.contains("distributed"))
    throw ConfigError("config requires a 'distributed' section");
  const Json& d = e.config.at("distributed");
  DistributedProblem dp;
  dp.local_dim = d.value("local_dim", std::size_t{1});
  if (dp.local_dim == 0) throw ConfigError("field 'distributed.local_dim' must be positive");
  dp.alpha = e.alpha_override.value_or(d.value("alpha", 1.0));
  if (!(dp.alpha > 0.0)) throw ConfigError("field 'alpha' must be positive");
  dp.sum_mu = d.value("sum_mu", 0.0);
  const std::string cond = d.value("sum_condition", std::string("strongly_convex"));
  if (cond == "rsi")
    dp.sum_condition = SumCondition::Rsi;
  else if (cond != "strongly_convex")
    throw ConfigError("field 'distributed.sum_condition' must be strongly_convex or rsi");
  if (d.contains("sum_minimizer"))
    dp.sum_minimizer = d.at("sum_minimizer").get<Vector>();

  if (!d.contains("graph")) throw ConfigError("field 'distributed.graph' is required");
  const Json& gj = d.at("graph");
  if (gj.contains("kind")) {
    dp.graph = build_graph(graph_kind_from_string(gj.at("kind").get<std::string>()),
                           gj.value("n_nodes", std::size_t{0}),
                           gj.value("seed", e.seed));
  } else {
    dp.graph = graph_from_json(gj);
  }

  if (!d.contains("agents") || !d.at("agents").is_array() || d.at("agents").empty())
    throw ConfigError("field 'distributed.agents' must be a non-empty array");
  for (const Json& aj : d.at("agents"))
    dp.agents.push_back(objective_from_json(aj, dp.local_dim));
  if (dp.agents.size() != dp.graph.n_nodes)
    throw ConfigError("agent count must match the graph node count");
  return dp;
}

int cmd_distributed(const Experiment& e) {
  const DistributedProblem dp = load_distributed(e);
  audit_sum_condition(dp, 1000, e.seed + 1);
  const ProblemInstance stacked = stacked_instance(dp);
  const std::size_t total = dp.stacked_dim();

  IntegrateOptions opts;
  opts.horizon = e.horizon;
  opts.step = e.step;
  opts.stride = e.stride;
  opts.reference = resolve_reference(stacked);

  const KktPoint z0 = initial_state(e, total, total, /*zero_dual=*/true);
  const Trajectory traj = integrate(stacked, FlowKind::DistributedPi, z0, opts);

  std::vector<double> cons(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k)
    cons[k] = consensus_error(traj.xs[k], dp.graph.n_nodes, dp.local_dim);

  std::optional<RateFit> fit;
  if (opts.reference) {
    try {
      fit = fit_rate(traj, e.window_fraction);
    } catch (const InsufficientDecay&) {
    }
  }

  // Certificate for the embedded transformed instance.
  const ProblemInstance embedded = embed_as_constrained(dp);
  std::optional<RateCertificate> cert;
  std::string cert_failure;
  try {
    const ErrorSystem sys = build_transformed_system(
        embedded, e.mu_override.value_or(embedded.objective.declared_mu));
    cert = certify_rate(sys, e.grid, e.tolerance);
  } catch (const NotCertifiable& ex) {
    cert_failure = ex.what();
  }

  Json summary;
  summary["x_final"] = traj.xs.back();
  summary["consensus_error"] = cons.back();
  summary["gradient_sum_norm"] = gradient_sum_norm(dp, traj.xs.back());
  summary["kkt_residual"] = flow_kkt_residual(stacked, traj.xs.back(), traj.lambdas.back());
  summary.update(fit_to_json(fit));
  summary["rho_certified"] = cert ? Json(cert->rho_certified) : Json(nullptr);
  if (!cert) summary["certificate_error"] = cert_failure;

  atomic_write_file(e.out_dir + "/trajectory.csv", trajectory_csv(traj));
  atomic_write_file(e.out_dir + "/consensus.csv", consensus_csv(traj.times, cons));
  if (cert)
    atomic_write_file(e.out_dir + "/certificate.json",
                      certificate_to_json(*cert).dump(2) + "\n");
  atomic_write_file(e.out_dir + "/summary.json", summary.dump(2) + "\n");
  std::cout << "consensus_error=" << format_double(cons.back()) << "\n";
  if (cert) std::cout << "rho_certified=" << format_double(cert->rho_certified) << "\n";
  return 0;
}

int dispatch(const std::string& cmd, const Overrides& ov) {
  try {
    const Experiment e = make_experiment(ov);
    if (cmd == "solve") return cmd_solve(e);
    if (cmd == "certify") return cmd_certify(e);
    if (cmd == "compare") return cmd_compare(e);
    if (cmd == "distributed") return cmd_distributed(e);
    throw ConfigError("unknown command: " + cmd);
  } catch (const NotCertifiable& ex) {
    std::cerr << "not certifiable: " << ex.what() << "\n";
    return 4;
  } catch (const Singular& ex) {
    std::cerr << "not certifiable: " << ex.what() << "\n";
    return 4;
  } catch (const Diverged& ex) {
    std::cerr << "diverged: " << ex.what() << "\n";
    return 3;
  } catch (const NonFiniteGradient& ex) {
    std::cerr << "diverged: " << ex.what() << "\n";
    return 3;
  } catch (const NoConvergence& ex) {
    std::cerr << "diverged: " << ex.what() << "\n";
    return 3;
  } catch (const Error& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver and certifier for augmented primal-dual gradient flows"};
  app.require_subcommand(1);

  Overrides ov;
  std::string out_flag, frame_flag;
  double horizon_flag = 0, step_flag = 0, alpha_flag = 0;
  std::size_t grid_flag = 0;
  std::uint64_t seed_flag = 0;

  std::vector<CLI::App*> subs;
  for (const char* name : {"solve", "certify", "compare", "distributed"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", ov.config_path, "experiment config (JSON)");
    sub->add_option("--out", out_flag, "output directory");
    sub->add_option("--horizon", horizon_flag, "integration horizon (s)");
    sub->add_option("--step", step_flag, "integration step (s)");
    sub->add_option("--alpha", alpha_flag, "penalty parameter override");
    sub->add_option("--rho-grid-points", grid_flag, "frequency grid points");
    sub->add_option("--seed", seed_flag, "random seed");
    sub->add_option("--frame", frame_flag, "certificate frame {original,transformed}")
        ->check(CLI::IsMember({"original", "transformed"}));
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  CLI::App* active = nullptr;
  for (CLI::App* sub : subs)
    if (sub->parsed()) active = sub;
  if (!active) {
    std::cerr << "config error: a subcommand is required\n";
    return 2;
  }
  if (active->count("--out")) ov.out = out_flag;
  if (active->count("--horizon")) ov.horizon = horizon_flag;
  if (active->count("--step")) ov.step = step_flag;
  if (active->count("--alpha")) ov.alpha = alpha_flag;
  if (active->count("--rho-grid-points")) ov.grid_points = grid_flag;
  if (active->count("--seed")) ov.seed = seed_flag;
  if (active->count("--frame")) ov.frame = frame_flag;

  return dispatch(active->get_name(), ov);
}
