#include "inertial_flow/core.hpp"

#include <cmath>

namespace inertial_flow {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::MissingMinimizer: return "MissingMinimizer";
    case Errc::NonFiniteState: return "NonFiniteState";
    case Errc::MaxStepsExceeded: return "MaxStepsExceeded";
    case Errc::StepUnderflow: return "StepUnderflow";
    case Errc::OutsideDomain: return "OutsideDomain";
    case Errc::DenominatorSingular: return "DenominatorSingular";
    case Errc::DenominatorNonpositive: return "DenominatorNonpositive";
    case Errc::NoValidThreshold: return "NoValidThreshold";
    case Errc::EmptyWindow: return "EmptyWindow";
  }
  return "Unknown";
}

bool is_config_error(Errc code) {
  return code == Errc::InvalidConfig || code == Errc::MissingMinimizer ||
         code == Errc::EmptyWindow;
}

void Objective::require_minimizer(std::string_view who) const {
  if (!has_minimizer()) {
    throw Error(Errc::MissingMinimizer,
                std::string(who) + ": objective has no known minimizer / minimum value");
  }
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::RateAndConvergence: return "RateAndConvergence";
    case Regime::RateAndConvergenceGammaZero: return "RateAndConvergenceGammaZero";
    case Regime::RateOnlyCritical: return "RateOnlyCritical";
    case Regime::Unsupported: return "Unsupported";
    case Regime::General: return "General";
  }
  return "Unknown";
}

Regime validate_params(const SystemParams& params) {
  if (!(params.alpha > 0.0)) {
    throw Error(Errc::InvalidConfig, "alpha must be > 0");
  }
  if (!(params.gamma >= 0.0)) {
    throw Error(Errc::InvalidConfig, "gamma must be >= 0");
  }
  if (!(params.t0 > 0.0)) {
    throw Error(Errc::InvalidConfig, "t0 must be > 0");
  }
  if (!std::isfinite(params.beta)) {
    throw Error(Errc::InvalidConfig, "beta must be finite");
  }
  if (params.u0.size() != params.v0.size()) {
    throw Error(Errc::InvalidConfig, "u0 and v0 must have the same dimension");
  }

  const double a = params.alpha;
  const double b = params.beta;
  const double g = params.gamma;
  if (g == 0.0 && b < 0.0) return Regime::Unsupported;
  if (a > 3.0 && g > 0.0) return Regime::RateAndConvergence;
  if (a > 3.0 && g == 0.0) return Regime::RateAndConvergenceGammaZero;
  if (a == 3.0 && g == 0.0) return Regime::RateOnlyCritical;
  return Regime::General;
}

Vector shifted_point(const SystemState& state, const SystemParams& params) {
  return state.x + shift_factor(state.t, params) * state.v;
}

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace inertial_flow
