#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "inertial_flow/core.hpp"

namespace inertial_flow {

/// Parameters of the inertial iteration
///   y_n = x_n + n/(n+alpha) (x_n - x_{n-1})
///   z_n = x_n + (gamma n + beta)/(n+alpha) (x_n - x_{n-1})
///   x_{n+1} = y_n - s grad g(z_n)
///
/// For the proximal variant the pair (x_minus1, x0) is read as (x_0, x_1) and
/// the iteration starts at n = 1.
struct AlgoParams {
  double alpha = 3.0;
  double beta = 0.0;
  double gamma = 1.0;
  double s = 0.1;
  long n_max = 1000;
  Vector x0;
  Vector x_minus1;

  /// Throws Errc::InvalidConfig on alpha <= 0, gamma < 0, s <= 0, n_max < 0 or size mismatch.
  void validate() const;
};

enum class StepRegime { Standard, Experimental };

/// Standard when s <= 1/L_g (or L_g == 0), experimental otherwise.
StepRegime classify_step(const AlgoParams& params, const Objective& obj);

/// 1/L_g, or 1 when L_g == 0.
double default_step(const Objective& obj);

struct InertialStep {
  Vector y;
  Vector z;
  Vector x_next;
};

struct IterateRecord {
  long n = 0;
  Vector x;
  Vector y;
  Vector z;
  /// g(x_n) for the inertial iteration, g(x_n) + f(x_n) for the proximal one.
  double value = 0.0;
};

enum class StopReason { GradientTolerance, IterationBudget };

std::string_view to_string(StopReason reason);

struct IterateHistory {
  std::vector<IterateRecord> records;
  StopReason stop = StopReason::IterationBudget;
  std::vector<std::string> warnings;
};

/// One step of the inertial iteration. Evaluates the gradient exactly once.
/// Throws Errc::NonFiniteState (carrying n) on a non-finite gradient.
InertialStep inertial_step(long n, const Vector& x_n, const Vector& x_prev,
                           const AlgoParams& params, const Objective& obj);

/// Iterates from (x0, x_minus1) until |grad g(x_n)| <= grad_tol or n == n_max.
IterateHistory run_inertial(const AlgoParams& params, const Objective& obj, double grad_tol);

/// prox_{lambda f}. `value` evaluates f itself (used to report g + f).
struct ProxOperator {
  double lambda = 1.0;
  std::function<Vector(const Vector&)> apply;
  std::function<double(const Vector&)> value;
};

/// f = weight |.|_1, prox is soft-thresholding at lambda * weight.
ProxOperator soft_threshold(double lambda, double weight = 1.0);
/// f = indicator of [lo, hi], prox is the projection.
ProxOperator box_projection(double lambda, Vector lo, Vector hi);
/// f = 0
ProxOperator identity_prox(double lambda);

/// One step of the proximal variant (n >= 1):
///   y_n = x_n + ((1-gamma) n - alpha)/n (x_n - x_{n-1})
///   z_n = x_n + (gamma n + beta)/n (x_n - x_{n-1})
///   x_{n+1} = y_n / 2 + prox(z_n - lambda grad g(z_n)) / 2
InertialStep prox_inertial_step(long n, const Vector& x_n, const Vector& x_prev,
                                const AlgoParams& params, const Objective& obj,
                                const ProxOperator& prox);

/// Iterates the proximal variant from n = 1 until the prox-gradient residual
/// |x - prox(x - lambda grad g(x))| / lambda <= tol or n == n_max.
IterateHistory run_prox_inertial(const AlgoParams& params, const Objective& obj,
                                 const ProxOperator& prox, double tol);

/// Runs the raw explicit discretization of the continuous system with step h
/// (t_n = n h) from n_start = t0/h for n_span steps and returns
/// max_n |x_n - x(t_n)| against a tightly integrated trajectory.
/// x_{n_start - 1} is initialised as u0 - h v0.
double discretization_consistency(const SystemParams& params, double h, long n_span,
                                  const Objective& obj);

}  // namespace inertial_flow
