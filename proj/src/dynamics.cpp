#include "pdflow/dynamics.hpp"

#include <cmath>
#include <limits>

namespace pdflow {

std::string to_string(FlowKind f) {
  switch (f) {
    case FlowKind::Augmented: return "augmented";
    case FlowKind::Standard: return "standard";
    case FlowKind::DistributedPi: return "distributed_pi";
  }
  return "augmented";
}

FlowKind flow_kind_from_string(const std::string& s) {
  if (s == "augmented") return FlowKind::Augmented;
  if (s == "standard") return FlowKind::Standard;
  if (s == "distributed_pi") return FlowKind::DistributedPi;
  throw ConfigError("unknown flow kind: " + s);
}

namespace {

constexpr double kDivergenceGuard = 1e8;

struct FlowRhs {
  const ProblemInstance& p;
  FlowKind flow;
  std::size_t nx;
  std::size_t nl;

  // z = (x, lambda) packed in one vector.
  Vector operator()(const Vector& z) const {
    Vector x(z.begin(), z.begin() + nx);
    Vector lam(z.begin() + nx, z.end());
    Vector g = p.objective.gradient(x);
    if (!all_finite(g)) throw NonFiniteGradient("flow: objective gradient not finite");

    Vector out(nx + nl, 0.0);
    if (flow == FlowKind::DistributedPi) {
      const DenseMatrix& bl = p.stacked->big_l;
      const Vector lx = bl * x;
      const Vector ll = bl * lam;
      for (std::size_t i = 0; i < nx; ++i)
        out[i] = -g[i] - p.alpha * lx[i] - ll[i];
      for (std::size_t i = 0; i < nl; ++i) out[nx + i] = lx[i];
      return out;
    }

    const DenseMatrix& t = p.constraint.t;
    Vector resid = t * x;
    for (std::size_t i = 0; i < nl; ++i) resid[i] -= p.constraint.b[i];
    const Vector ttl = t.transpose() * lam;
    for (std::size_t i = 0; i < nx; ++i) out[i] = -g[i] - ttl[i];
    if (flow == FlowKind::Augmented) {
      if (p.penalty == PenaltyKind::LaplacianDrift) {
        const Vector dx = p.drift * x;
        for (std::size_t i = 0; i < nx; ++i) out[i] -= p.alpha * dx[i];
      } else {
        const Vector tr = t.transpose() * resid;
        for (std::size_t i = 0; i < nx; ++i) out[i] -= p.alpha * tr[i];
      }
    }
    for (std::size_t i = 0; i < nl; ++i) out[nx + i] = resid[i];
    return out;
  }
};

Vector rk4_step(const FlowRhs& rhs, const Vector& z, double h) {
  const Vector k1 = rhs(z);
  const Vector k2 = rhs(axpy(0.5 * h, k1, z));
  const Vector k3 = rhs(axpy(0.5 * h, k2, z));
  const Vector k4 = rhs(axpy(h, k3, z));
  Vector out = z;
  for (std::size_t i = 0; i < z.size(); ++i)
    out[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

void check_state(const Vector& z) {
  if (!all_finite(z)) throw Diverged("flow: state is not finite");
  if (norm2(z) > kDivergenceGuard)
    throw Diverged("flow: state norm exceeded divergence guard 1e8");
}

double error_norm(const Vector& z, const KktPoint& ref) {
  double s = 0.0;
  const std::size_t nx = ref.x.size();
  for (std::size_t i = 0; i < nx; ++i) s += (z[i] - ref.x[i]) * (z[i] - ref.x[i]);
  for (std::size_t i = 0; i < ref.lambda.size(); ++i)
    s += (z[nx + i] - ref.lambda[i]) * (z[nx + i] - ref.lambda[i]);
  return std::sqrt(s);
}

}  // namespace

Trajectory integrate(const ProblemInstance& p, FlowKind flow, const KktPoint& z0,
                     const IntegrateOptions& opts) {
  if (opts.horizon <= 0.0) throw ConfigError("integrate: horizon must be positive");
  if (opts.step <= 0.0) throw ConfigError("integrate: step must be positive");
  const std::size_t nx = p.n();

  std::size_t nl = p.m();
  if (flow == FlowKind::DistributedPi) {
    if (!p.stacked.has_value())
      throw ConfigError("integrate: distributed_pi requires a stacked graph instance");
    nl = nx;  // dual has the primal dimension in the PI flow
  }
  if (z0.x.size() != nx || z0.lambda.size() != nl)
    throw DimensionMismatch("integrate: initial state dimension mismatch");
  if (flow == FlowKind::DistributedPi) {
    // lambda(0) = 0 pins the unobservable dual drift along the consensus
    // direction; any dual with zero consensus component keeps that invariant.
    const std::size_t nodes = p.stacked->n_nodes;
    const std::size_t d = p.stacked->local_dim;
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < nodes; ++i) s += z0.lambda[i * d + j];
      if (std::abs(s) > 1e-12 * std::max(1.0, max_abs(z0.lambda)))
        throw ConfigError(
            "integrate: distributed_pi requires lambda(0) = 0 (no consensus component)");
    }
  }

  const FlowRhs rhs{p, flow, nx, nl};
  Trajectory traj;
  traj.reference = opts.reference;

  Vector z(nx + nl);
  std::copy(z0.x.begin(), z0.x.end(), z.begin());
  std::copy(z0.lambda.begin(), z0.lambda.end(), z.begin() + nx);

  auto record = [&](double t, const Vector& state) {
    traj.times.push_back(t);
    traj.xs.emplace_back(state.begin(), state.begin() + nx);
    traj.lambdas.emplace_back(state.begin() + nx, state.end());
    if (traj.reference) traj.error_norms.push_back(error_norm(state, *traj.reference));
  };
  record(0.0, z);

  if (!opts.adaptive) {
    const auto steps = static_cast<std::size_t>(std::llround(opts.horizon / opts.step));
    const std::size_t stride = std::max<std::size_t>(1, opts.stride);
    for (std::size_t k = 0; k < steps; ++k) {
      z = rk4_step(rhs, z, opts.step);
      check_state(z);
      if ((k + 1) % stride == 0 || k + 1 == steps)
        record(static_cast<double>(k + 1) * opts.step, z);
    }
    return traj;
  }

  // Step-doubling: compare one h step against two h/2 steps; the RK4 local
  // error estimate is their difference / 15.
  double t = 0.0;
  double h = opts.step;
  std::size_t accepted = 0;
  const std::size_t stride = std::max<std::size_t>(1, opts.stride);
  while (t < opts.horizon - 1e-15 * opts.horizon) {
    h = std::min(h, opts.horizon - t);
    const Vector full = rk4_step(rhs, z, h);
    const Vector half = rk4_step(rhs, rk4_step(rhs, z, 0.5 * h), 0.5 * h);
    double err = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
      err = std::max(err, std::abs(full[i] - half[i]) / 15.0);
    if (err > opts.adaptive_tol && h > 1e-12) {
      h *= 0.5;
      continue;
    }
    z = half;
    t += h;
    check_state(z);
    ++accepted;
    if (accepted % stride == 0) record(t, z);
    if (err < opts.adaptive_tol / 32.0) h = std::min(2.0 * h, opts.step * 100.0);
  }
  if (traj.times.back() != t) record(t, z);
  return traj;
}

RateFit fit_rate(const Trajectory& traj, double window_fraction) {
  if (!traj.reference.has_value())
    throw ConfigError("fit_rate: trajectory has no reference equilibrium");
  if (window_fraction <= 0.0 || window_fraction > 1.0)
    throw ConfigError("fit_rate: window fraction must lie in (0, 1]");
  if (traj.size() < 2) throw InsufficientDecay("fit_rate: trajectory too short");

  const double t0 = traj.times.front();
  const double t1 = traj.times.back();
  const double w0 = t1 - window_fraction * (t1 - t0);

  // First in-window sample decides whether there is anything left to fit.
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.times[i] >= w0) {
      if (traj.error_norms[i] < 1e-12)
        throw InsufficientDecay("fit_rate: error already below 1e-12 at window start");
      break;
    }
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.times[i] < w0) continue;
    if (traj.error_norms[i] <= 1e-14) continue;  // saturated samples carry no signal
    const double y = std::log(traj.error_norms[i]);
    pts.emplace_back(traj.times[i], y);
    sx += traj.times[i];
    sy += y;
    sxx += traj.times[i] * traj.times[i];
    sxy += traj.times[i] * y;
    ++n;
  }
  if (n < 10) throw InsufficientDecay("fit_rate: fewer than 10 usable samples in window");

  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) throw InsufficientDecay("fit_rate: degenerate time window");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;

  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / n;
  for (const auto& [x, y] : pts) {
    const double f = slope * x + intercept;
    ss_res += (y - f) * (y - f);
    ss_tot += (y - ybar) * (y - ybar);
  }

  RateFit fit;
  fit.rho_hat = -slope;
  fit.c_hat = std::exp(intercept);
  fit.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  fit.window_start = w0;
  fit.window_end = t1;
  fit.samples = n;
  return fit;
}

double flow_kkt_residual(const ProblemInstance& p, const Vector& x, const Vector& lambda) {
  if (p.stacked.has_value() && lambda.size() == x.size()) {
    const DenseMatrix& bl = p.stacked->big_l;
    const Vector g = p.objective.gradient(x);
    const Vector ll = bl * lambda;
    Vector station = g;
    for (std::size_t i = 0; i < station.size(); ++i) station[i] += ll[i];
    return std::max(max_abs(station), max_abs(bl * x));
  }
  return kkt_residual(p, x, lambda);
}

KktPoint equilibrium_solve(const ProblemInstance& p) {
  const std::size_t n = p.n();

  // Quadratic family with a plain constraint: direct KKT solve.
  const std::string& kind = p.objective.kind;
  if (!p.stacked.has_value() &&
      (kind == "zero" || kind == "affine" || kind == "quadratic")) {
    const std::size_t m = p.m();
    DenseMatrix kkt(n + m, n + m);
    if (kind == "quadratic") kkt.set_block(0, 0, p.objective.quad);
    kkt.set_block(0, n, p.constraint.t.transpose());
    kkt.set_block(n, 0, p.constraint.t);
    Vector rhs(n + m, 0.0);
    if (kind != "zero")
      for (std::size_t i = 0; i < n && i < p.objective.lin.size(); ++i)
        rhs[i] = -p.objective.lin[i];
    for (std::size_t i = 0; i < m; ++i) rhs[n + i] = p.constraint.b[i];
    try {
      const Vector sol = solve_linear(kkt, rhs);
      KktPoint out{Vector(sol.begin(), sol.begin() + n),
                   Vector(sol.begin() + n, sol.end())};
      if (kkt_residual(p, out.x, out.lambda) <= 1e-8) return out;
    } catch (const Singular&) {
      // fall through to the dynamic path
    }
  }

  // Dynamic path: integrate in chunks, then damped first-order polish.
  const FlowKind flow = p.stacked.has_value() ? FlowKind::DistributedPi
                                              : FlowKind::Augmented;
  const std::size_t nl = p.stacked.has_value() ? n : p.m();
  const FlowRhs rhs{p, flow, n, nl};
  Vector z(n + nl, 0.0);

  IntegrateOptions opts;
  opts.horizon = 100.0;
  opts.step = 1e-3;
  opts.stride = 1000000;  // endpoints only

  KktPoint cur{Vector(n, 0.0), Vector(nl, 0.0)};
  for (int round = 0; round < 20; ++round) {
    const Trajectory t = integrate(p, flow, cur, opts);
    cur.x = t.xs.back();
    cur.lambda = t.lambdas.back();
    if (flow_kkt_residual(p, cur.x, cur.lambda) <= 1e-10) return cur;

    // Damped fixed-point polish: explicit relaxation toward the equilibrium,
    // halving the relaxation factor whenever the residual grows.
    std::copy(cur.x.begin(), cur.x.end(), z.begin());
    std::copy(cur.lambda.begin(), cur.lambda.end(), z.begin() + n);
    double gamma = 0.05;
    double best = flow_kkt_residual(p, cur.x, cur.lambda);
    for (int it = 0; it < 200000 && gamma > 1e-6; ++it) {
      const Vector dz = rhs(z);
      Vector znew = axpy(gamma, dz, z);
      KktPoint cand{Vector(znew.begin(), znew.begin() + n),
                    Vector(znew.begin() + n, znew.end())};
      const double res = flow_kkt_residual(p, cand.x, cand.lambda);
      if (!std::isfinite(res) || res > 10.0 * best) {
        gamma *= 0.5;
        continue;
      }
      z = std::move(znew);
      best = std::min(best, res);
      if (res <= 1e-10) return cand;
    }
    cur.x.assign(z.begin(), z.begin() + n);
    cur.lambda.assign(z.begin() + n, z.end());
    if (flow_kkt_residual(p, cur.x, cur.lambda) <= 1e-10) return cur;
  }
  throw NoConvergence("equilibrium_solve: budget exhausted before residual <= 1e-10");
}

}  // namespace pdflow
