#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "inertial_flow/core.hpp"
#include "inertial_flow/energy.hpp"
#include "inertial_flow/ode.hpp"

namespace inertial_flow {

enum class ErrorKind {
  ShiftedGap,  // g(x + (gamma + beta/t) x') - g*
  PlainGap,    // g(x) - g*
  Speed,       // |x'|
};

std::string_view to_string(ErrorKind kind);

struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

struct RateReport {
  double envelope_sup = 0.0;  // max of t^p * error(t) over the window
  double argsup = 0.0;        // time at which the sup is attained
  double fitted_slope = 0.0;  // least-squares slope of log error against log t
  Window window;
  double p = 2.0;
  std::size_t samples = 0;
};

/// Envelope and log-log slope of an arbitrary error series. Samples with
/// error <= 1e-15 are excluded from the fit. Throws Errc::EmptyWindow.
RateReport rate_envelope(std::span<const double> t, std::span<const double> error, double p,
                         Window window);

/// Error of the given kind at every trajectory sample.
std::vector<double> error_series(const Trajectory& traj, const Objective& obj, ErrorKind kind);

/// Same as above on the trajectory samples inside the window.
/// Throws Errc::MissingMinimizer for the gap kinds without minimizer data.
RateReport rate_envelope(const Trajectory& traj, const Objective& obj, ErrorKind kind, double p,
                         Window window);

/// Cumulative trapezoidal integral, starting at 0.
std::vector<double> trapezoid_cumulative(std::span<const double> t, std::span<const double> f);

struct Accumulators {
  std::vector<double> t;
  std::vector<double> value_integral;     // int t (g(shifted) - g*)
  std::vector<double> gradient_integral;  // int t^w |grad g(shifted)|^2
  std::vector<double> speed_integral;     // int t |x'|^2
  double gradient_weight_power = 2.0;     // w: 2, or 1 when gamma == 0
  double tail_start = 0.0;
  double value_tail = 0.0;
  double gradient_tail = 0.0;
  double speed_tail = 0.0;

  double value_total() const { return value_integral.back(); }
  double gradient_total() const { return gradient_integral.back(); }
  double speed_total() const { return speed_integral.back(); }
};

/// Partial sums on the sample grid (plus the tail start, inserted via dense
/// output). The tail defaults to the last quarter of the span.
Accumulators integral_accumulators(const Trajectory& traj, const SystemParams& params,
                                   const Objective& obj,
                                   std::optional<double> tail_start = std::nullopt);

/// K = max{ max_t (Lg + (alpha + Lg |beta|)/t^2), max_t (alpha/t + Lg |gamma + beta/t|) }, t >= t0.
double third_derivative_constant(const SystemParams& params, const Objective& obj);

struct ThirdDerivativeReport {
  double constant = 0.0;
  double max_ratio = 0.0;
  double argmax = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};

/// max over samples of |x'''| / (K (|x'| + |x''|)), with x'' from the vector
/// field and x''' from central differences of x'' at step 1e-4.
ThirdDerivativeReport third_derivative_check(const Trajectory& traj, const SystemParams& params,
                                             const Objective& obj);

struct LimitPoint {
  Vector estimate;
  double residual = 0.0;        // |grad g(estimate)|
  double tail_deviation = 0.0;  // max over the last 10% of the span of |x(t) - estimate|
  bool converged = false;
};

LimitPoint limit_point(const Trajectory& traj, const Objective& obj, double tol = 1e-2);

struct MonotonicityReport {
  bool nonincreasing = true;
  double worst_relative_increase = 0.0;
  double worst_t = 0.0;
  std::size_t samples = 0;
  double start_energy = 0.0;
  /// max over t >= t_from of a(t) (g(shifted) - g*) / E(t_from).
  double bound_ratio = 0.0;
};

/// Checks E(t_{k+1}) <= E(t_k) + rel_slack |E(t_k)| over the samples with t >= t_from.
MonotonicityReport energy_monotonicity(const Trajectory& traj, const EnergyScheme& scheme,
                                       const Objective& obj, double t_from, double rel_slack);

}  // namespace inertial_flow
