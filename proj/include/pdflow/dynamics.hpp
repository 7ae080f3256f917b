#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdflow/problem.hpp"

namespace pdflow {

enum class FlowKind { Augmented, Standard, DistributedPi };

std::string to_string(FlowKind f);
FlowKind flow_kind_from_string(const std::string& s);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> xs;
  std::vector<Vector> lambdas;
  std::optional<KktPoint> reference;
  std::vector<double> error_norms;  // ||z(t) - z*||, filled when reference present

  std::size_t size() const { return times.size(); }
};

struct IntegrateOptions {
  double horizon = 10.0;
  double step = 1e-3;
  std::size_t stride = 10;  // record every `stride` accepted steps
  bool adaptive = false;    // step-doubling with local tolerance below
  double adaptive_tol = 1e-8;
  std::optional<KktPoint> reference;  // for error norms
};

/// Integrates one of the three flows with classic fixed-step RK4 (or the
/// optional step-doubling variant). Throws Diverged past ||z|| = 1e8 and
/// NonFiniteGradient when the oracle returns non-finite values.
Trajectory integrate(const ProblemInstance& p, FlowKind flow, const KktPoint& z0,
                     const IntegrateOptions& opts);

struct RateFit {
  double rho_hat = 0.0;    // 1/s
  double c_hat = 0.0;      // fitted intercept, error ~ c_hat * exp(-rho_hat t)
  double r_squared = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  std::size_t samples = 0;
};

/// Least-squares line fit of ln||z(t)-z*|| over the trailing window
/// (window_fraction of the horizon). Throws InsufficientDecay when the error
/// at the window start is below 1e-12 or fewer than 10 usable samples remain.
RateFit fit_rate(const Trajectory& traj, double window_fraction = 0.6);

/// KKT point of the instance: direct linear solve for quadratic-family
/// objectives, otherwise long-horizon integration followed by a damped
/// fixed-point polish until the KKT residual falls below 1e-10.
KktPoint equilibrium_solve(const ProblemInstance& p);

/// Stationarity/feasibility residual that is also valid for instances carrying
/// a stacked graph Laplacian (where the flow dual has primal dimension).
double flow_kkt_residual(const ProblemInstance& p, const Vector& x, const Vector& lambda);

}  // namespace pdflow
