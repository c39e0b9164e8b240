#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "inertial_flow/core.hpp"
#include "inertial_flow/discrete.hpp"
#include "inertial_flow/ode.hpp"

namespace inertial_flow {

/// Axis-aligned box [lo, hi] that experiment trajectories must stay inside.
struct Box {
  Vector lo;
  Vector hi;

  bool contains(const Vector& x) const {
    return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
  }
};

struct ProblemSpec {
  std::string id;
  Objective objective;
  /// Parameter-table rows (alpha, beta, gamma, t0) with u0/v0 set to the first start.
  std::vector<SystemParams> default_params;
  /// (u0, v0) pairs.
  std::vector<std::pair<Vector, Vector>> default_starts;
  /// Replaces the perturbed-gradient dynamics when set (reduced ODE of the periodic example).
  std::optional<Acceleration> reduced_dynamics;
  /// Exact position x(t), when known.
  std::function<double(double)> exact_solution;
  /// Region on which objective.lipschitz is valid.
  std::optional<Box> domain;
};

/// g(x, y) = 2x^2 + 5y^2 - 4x + 10y + 7, minimizer (1, -1), L_g = 10.
ProblemSpec quadratic_problem();

/// g(x, y) = x^4 + 5y^2 - 4x - 10y + 8, minimizer (1, 1). The gradient is only
/// locally Lipschitz; L_g = 1200 is the Hessian bound on [-10, 10]^2.
ProblemSpec quartic_problem();

/// g(x) = alpha/(-2 beta) x^2 with gamma = 0, whose trajectories are
/// x(t) = sin(sqrt(alpha/-beta) t). Throws Errc::InvalidConfig unless alpha > 0, beta < 0.
ProblemSpec periodic_problem(double alpha = 1.0, double beta = -1.0);

/// Start time of the periodic problem (the exact solution is started at t = 0).
inline constexpr double kPeriodicStart = 1e-6;

/// Problem ids addressable from the command line.
std::vector<std::string> problem_ids();

/// Looks up "quadratic-fig1", "quartic-fig2" or "periodic" (with its alpha, beta).
/// Throws Errc::InvalidConfig for unknown ids.
ProblemSpec find_problem(const std::string& id, double periodic_alpha = 1.0,
                         double periodic_beta = -1.0);

/// params with u0/v0 replaced by the given start.
SystemParams with_start(SystemParams params, const std::pair<Vector, Vector>& start);

/// Integrates the problem's dynamics (reduced if present) and, if the problem
/// declares a domain, throws Errc::OutsideDomain when a sample leaves it.
Trajectory simulate(const ProblemSpec& problem, const SystemParams& params,
                    const IntegratorConfig& cfg);

/// Fixed-seed sparse regression toy: g(x) = 1/2 |A x - b|^2 with A 20x5, and
/// f = weight |.|_1 handled by a proximal operator.
struct LassoToy {
  Eigen::MatrixXd design;
  Vector target;
  Objective smooth;
  double weight = 0.1;
};

LassoToy lasso_toy(unsigned long long seed, double weight = 0.1);

/// Seed from INERTIAL_FLOW_SEED, default 42.
unsigned long long lasso_seed_from_env();

}  // namespace inertial_flow
