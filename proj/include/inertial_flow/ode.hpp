#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "inertial_flow/core.hpp"

namespace inertial_flow {

struct IntegratorConfig {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_init = 1e-3;
  double h_max = 0.5;
  long max_steps = 10'000'000;
  double t_end = 100.0;

  /// Throws Errc::InvalidConfig unless 0 < rtol, 0 < atol, 0 < h_init <= h_max and t_end >= t0.
  void validate(double t0) const;
};

/// Right-hand side of the first-order system X' = F(t, X) with X = (x, x').
/// Returns (dx, dv). Throws Errc::NonFiniteState if the gradient is not finite.
std::pair<Vector, Vector> vector_field(double t, const SystemState& state,
                                       const SystemParams& params, const Objective& obj);

/// Lipschitz modulus of F(t, ., .):
/// sqrt(1 + 4 Lg^2 + 2 (alpha/t)^2 + 4 Lg^2 (gamma + beta/t)^2).
double lipschitz_modulus(double t, const SystemParams& params, const Objective& obj);

/// Acceleration x'' = a(t, x, x') of a second-order system.
using Acceleration = std::function<Vector(double, const Vector&, const Vector&)>;

/// Time-ordered accepted states of an adaptive integration together with the
/// per-step continuous extension (4th-order Dormand-Prince dense output).
class Trajectory {
 public:
  Trajectory(SystemParams params, SystemState initial);

  const SystemParams& params() const { return params_; }
  const std::vector<SystemState>& samples() const { return samples_; }
  std::size_t dim() const { return static_cast<std::size_t>(samples_.front().x.size()); }
  double t_begin() const { return samples_.front().t; }
  double t_end() const { return samples_.back().t; }
  std::size_t steps() const { return segments_.size(); }

  /// Dense-output state at t in [t_begin, t_end]. Sample times return the stored sample.
  SystemState at(double t) const;

  /// Appends one accepted step ending in `end`. `coeffs` holds the five
  /// interpolation vectors (stacked (x, v)) as columns.
  void append_step(SystemState end, Eigen::MatrixXd coeffs);

 private:
  struct Segment {
    double t;
    double h;
    Eigen::MatrixXd coeffs;
  };

  SystemParams params_;
  std::vector<SystemState> samples_;
  std::vector<Segment> segments_;
};

/// Dormand-Prince 5(4) with PI step control for x'' = accel(t, x, x') from
/// (params.t0, params.u0, params.v0) to cfg.t_end.
/// Errors: MaxStepsExceeded, StepUnderflow, NonFiniteState.
Trajectory integrate_second_order(const SystemParams& params, const Acceleration& accel,
                                  const IntegratorConfig& cfg);

/// Integrates the perturbed-gradient system defined by params and obj.
Trajectory integrate(const SystemParams& params, const Objective& obj,
                     const IntegratorConfig& cfg);

}  // namespace inertial_flow
