#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace inertial_flow {

using Vector = Eigen::VectorXd;

enum class Errc {
  InvalidConfig,
  MissingMinimizer,
  NonFiniteState,
  MaxStepsExceeded,
  StepUnderflow,
  OutsideDomain,
  DenominatorSingular,
  DenominatorNonpositive,
  NoValidThreshold,
  EmptyWindow,
};

std::string_view to_string(Errc code);

/// Configuration errors map to CLI exit code 1, everything else to 2.
bool is_config_error(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::optional<double> t = std::nullopt)
      : std::runtime_error(what), code_(code), t_(t) {}

  Errc code() const noexcept { return code_; }
  /// Time (or iteration index) at which a numerical failure happened, if known.
  std::optional<double> time() const noexcept { return t_; }

 private:
  Errc code_;
  std::optional<double> t_;
};

/// One instance of the damped system x'' + (alpha/t) x' + grad g(x + (gamma + beta/t) x') = 0.
struct SystemParams {
  double alpha = 3.0;
  double beta = 0.0;
  double gamma = 0.0;
  double t0 = 1.0;
  Vector u0;
  Vector v0;
};

/// Smooth convex objective with an analytic gradient. eval and grad must be pure.
struct Objective {
  int dim = 0;
  std::function<double(const Vector&)> eval;
  std::function<Vector(const Vector&)> grad;
  double lipschitz = 0.0;
  std::optional<Vector> minimizer;
  std::optional<double> min_value;

  bool has_minimizer() const { return minimizer.has_value() && min_value.has_value(); }
  /// Throws Errc::MissingMinimizer when either piece of minimizer data is absent.
  void require_minimizer(std::string_view who) const;
};

struct SystemState {
  double t = 0.0;
  Vector x;
  Vector v;
};

enum class Regime {
  RateAndConvergence,           // alpha > 3, gamma > 0
  RateAndConvergenceGammaZero,  // alpha > 3, gamma = 0, beta >= 0
  RateOnlyCritical,             // alpha = 3, gamma = 0, beta >= 0
  Unsupported,                  // gamma = 0, beta < 0 (periodic solutions possible)
  General,
};

std::string_view to_string(Regime regime);

/// Throws Errc::InvalidConfig for alpha <= 0, gamma < 0, t0 <= 0 or mismatched u0/v0.
Regime validate_params(const SystemParams& params);

/// x + (gamma + beta/t) v, the point at which the gradient is evaluated.
Vector shifted_point(const SystemState& state, const SystemParams& params);

/// gamma + beta/t
inline double shift_factor(double t, const SystemParams& params) {
  return params.gamma + params.beta / t;
}

bool all_finite(const Vector& v);

}  // namespace inertial_flow
