#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string_view>

#include "inertial_flow/core.hpp"

namespace inertial_flow {

/// A scalar coefficient function of time together with its derivative.
struct Coefficient {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

enum class SchemeLabel { RateScheme, ConvergenceScheme, Custom };

std::string_view to_string(SchemeLabel label);

/// Coefficients of the Lyapunov candidate
///   E(t) = a (g(x + beta(t) x') - g*) + 1/2 |b (x - x*) + c x'|^2 + d/2 |x - x*|^2
/// with beta(t) = gamma + beta/t.
struct EnergyScheme {
  SchemeLabel label = SchemeLabel::Custom;
  Coefficient a;
  Coefficient b;
  Coefficient c;
  Coefficient d;
  /// Largest real root of t^2 - alpha gamma t - beta (alpha + 1); -inf if none.
  double singular_root = -std::numeric_limits<double>::infinity();
  /// First time from which all coefficient conditions hold (see find_valid_from).
  std::optional<double> valid_from;
};

/// Largest real root of t^2 - alpha gamma t - beta (alpha + 1), or -inf.
double singular_root(const SystemParams& params);

/// Closed-form a(t) of the rate scheme (b = alpha - 1, c = t, d = 0).
/// Throws Errc::DenominatorSingular at or below the singular root plus margin.
double rate_scheme_a(double t, const SystemParams& params);
double rate_scheme_a_derivative(double t, const SystemParams& params);

/// a(t) = (c^2 - b c beta(t)) / (1 - alpha gamma / t - (alpha beta + beta) / t^2) for
/// arbitrary coefficient values b, c at time t. Throws Errc::DenominatorNonpositive.
double general_a(double t, double b_val, double c_val, const SystemParams& params);

/// b = alpha - 1 (equal to 2 at alpha = 3), c = t, d = 0.
EnergyScheme rate_scheme(const SystemParams& params);

/// Constant b in (2, alpha - 1), c = t, d = b (alpha - 1 - b). Defaults to the
/// midpoint of the interval. Throws Errc::InvalidConfig if b is outside it.
EnergyScheme convergence_scheme(const SystemParams& params,
                                std::optional<double> b = std::nullopt);

EnergyScheme custom_scheme(Coefficient a, Coefficient b, Coefficient c, Coefficient d);

/// Requires obj minimizer data (Errc::MissingMinimizer).
double energy_value(const EnergyScheme& scheme, const SystemState& state,
                    const SystemParams& params, const Objective& obj);

/// Residuals of the six sufficient conditions for E' <= 0. Index 0 corresponds to
/// a' - b c <= 0, index 5 to c (b + c' - c alpha/t) <= 0; indices 2 and 4 are equalities.
struct ConditionReport {
  double t = 0.0;
  double a = 0.0;
  std::array<double, 6> residual{};
  std::array<bool, 6> holds{};
  /// False if a(t) could not be evaluated (singular denominator).
  bool evaluable = true;

  bool all_hold() const;
  static constexpr std::array<bool, 6> kIsEquality{false, false, true, false, true, false};
};

ConditionReport check_conditions(const EnergyScheme& scheme, double t, const SystemParams& params);

/// Smallest point of the geometric grid (ratio 1.01) starting at
/// max(t0, singular root + margin) from which every later grid point up to
/// t_scan_end satisfies all conditions with a(t) > 0.
/// Throws Errc::NoValidThreshold if no such point exists.
double find_valid_from(const EnergyScheme& scheme, const SystemParams& params, double t_scan_end);

/// Copy of scheme with valid_from filled in by find_valid_from.
EnergyScheme with_valid_from(EnergyScheme scheme, const SystemParams& params, double t_scan_end);

}  // namespace inertial_flow
