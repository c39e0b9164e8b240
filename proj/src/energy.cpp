#include "inertial_flow/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace inertial_flow {

namespace {

double singular_margin(double root) { return 1e-9 + 1e-12 * std::abs(root); }

void guard_singular(double t, const SystemParams& params) {
  const double root = singular_root(params);
  if (std::isfinite(root) && t <= root + singular_margin(root)) {
    std::ostringstream msg;
    msg << "t=" << t << " too close to or below singular root " << root;
    throw Error(Errc::DenominatorSingular, msg.str(), t);
  }
}

// t^2 - alpha gamma t - beta (alpha + 1)
double denominator(double t, const SystemParams& p) {
  return t * t - p.alpha * p.gamma * t - p.beta * (p.alpha + 1.0);
}

double denominator_derivative(double t, const SystemParams& p) {
  return 2.0 * t - p.alpha * p.gamma;
}

Coefficient constant(double value) {
  return {[value](double) { return value; }, [](double) { return 0.0; }};
}

Coefficient identity() {
  return {[](double t) { return t; }, [](double) { return 1.0; }};
}

double rate_b(const SystemParams& params) {
  return params.alpha == 3.0 ? 2.0 : params.alpha - 1.0;
}

}  // namespace

std::string_view to_string(SchemeLabel label) {
  switch (label) {
    case SchemeLabel::RateScheme: return "RateScheme";
    case SchemeLabel::ConvergenceScheme: return "ConvergenceScheme";
    case SchemeLabel::Custom: return "Custom";
  }
  return "Unknown";
}

double singular_root(const SystemParams& params) {
  const double p = params.alpha * params.gamma;
  const double q = params.beta * (params.alpha + 1.0);
  const double disc = p * p + 4.0 * q;
  if (disc < 0.0) return -std::numeric_limits<double>::infinity();
  return 0.5 * (p + std::sqrt(disc));
}

double rate_scheme_a(double t, const SystemParams& params) {
  guard_singular(t, params);
  const double al = params.alpha;
  const double be = params.beta;
  const double ga = params.gamma;
  const double poly = t * t + ga * t + 2.0 * be + al * ga * ga;
  const double k1 = 3.0 * al * be * ga + al * al * ga * ga * ga + be * ga;
  const double k0 = be * (al + 1.0) * (2.0 * be + al * ga * ga);
  return poly + (k1 * t + k0) / denominator(t, params);
}

double rate_scheme_a_derivative(double t, const SystemParams& params) {
  guard_singular(t, params);
  const double al = params.alpha;
  const double be = params.beta;
  const double ga = params.gamma;
  const double k1 = 3.0 * al * be * ga + al * al * ga * ga * ga + be * ga;
  const double k0 = be * (al + 1.0) * (2.0 * be + al * ga * ga);
  const double den = denominator(t, params);
  const double num = k1 * t + k0;
  return 2.0 * t + ga + (k1 * den - num * denominator_derivative(t, params)) / (den * den);
}

double general_a(double t, double b_val, double c_val, const SystemParams& params) {
  const double al = params.alpha;
  const double be = params.beta;
  const double ga = params.gamma;
  const double den = 1.0 - al * ga / t - (al * be + be) / (t * t);
  if (!(den > 0.0)) {
    std::ostringstream msg;
    msg << "denominator " << den << " not positive at t=" << t;
    throw Error(Errc::DenominatorNonpositive, msg.str(), t);
  }
  return (c_val * c_val - b_val * c_val * shift_factor(t, params)) / den;
}

EnergyScheme rate_scheme(const SystemParams& params) {
  EnergyScheme scheme;
  scheme.label = SchemeLabel::RateScheme;
  scheme.a = {[params](double t) { return rate_scheme_a(t, params); },
              [params](double t) { return rate_scheme_a_derivative(t, params); }};
  scheme.b = constant(rate_b(params));
  scheme.c = identity();
  scheme.d = constant(0.0);
  scheme.singular_root = singular_root(params);
  return scheme;
}

EnergyScheme convergence_scheme(const SystemParams& params, std::optional<double> b) {
  const double lo = 2.0;
  const double hi = params.alpha - 1.0;
  const double b_val = b.value_or(0.5 * (lo + hi));
  if (!(b_val > lo && b_val < hi)) {
    std::ostringstream msg;
    msg << "convergence scheme needs 2 < b < alpha - 1, got b=" << b_val
        << " with alpha=" << params.alpha;
    throw Error(Errc::InvalidConfig, msg.str());
  }

  // a(t) = t^2 (t^2 - b gamma t - b beta) / (t^2 - alpha gamma t - beta (alpha + 1))
  auto value = [params, b_val](double t) {
    guard_singular(t, params);
    const double num = t * t * (t * t - b_val * params.gamma * t - b_val * params.beta);
    return num / denominator(t, params);
  };
  auto derivative = [params, b_val](double t) {
    guard_singular(t, params);
    const double bg = b_val * params.gamma;
    const double bb = b_val * params.beta;
    const double num = t * t * (t * t - bg * t - bb);
    const double num_d = 4.0 * t * t * t - 3.0 * bg * t * t - 2.0 * bb * t;
    const double den = denominator(t, params);
    return (num_d * den - num * denominator_derivative(t, params)) / (den * den);
  };

  EnergyScheme scheme;
  scheme.label = SchemeLabel::ConvergenceScheme;
  scheme.a = {value, derivative};
  scheme.b = constant(b_val);
  scheme.c = identity();
  scheme.d = constant(b_val * (params.alpha - 1.0 - b_val));
  scheme.singular_root = singular_root(params);
  return scheme;
}

EnergyScheme custom_scheme(Coefficient a, Coefficient b, Coefficient c, Coefficient d) {
  EnergyScheme scheme;
  scheme.label = SchemeLabel::Custom;
  scheme.a = std::move(a);
  scheme.b = std::move(b);
  scheme.c = std::move(c);
  scheme.d = std::move(d);
  return scheme;
}

double energy_value(const EnergyScheme& scheme, const SystemState& state,
                    const SystemParams& params, const Objective& obj) {
  obj.require_minimizer("energy_value");
  const double t = state.t;
  const Vector& xs = *obj.minimizer;
  const Vector dx = state.x - xs;
  const double gap = obj.eval(shifted_point(state, params)) - *obj.min_value;
  const double b = scheme.b.value(t);
  const double c = scheme.c.value(t);
  const double d = scheme.d.value(t);
  return scheme.a.value(t) * gap + 0.5 * (b * dx + c * state.v).squaredNorm() +
         0.5 * d * dx.squaredNorm();
}

bool ConditionReport::all_hold() const {
  return evaluable && std::all_of(holds.begin(), holds.end(), [](bool h) { return h; });
}

ConditionReport check_conditions(const EnergyScheme& scheme, double t,
                                 const SystemParams& params) {
  ConditionReport report;
  report.t = t;
  double a = 0.0;
  double a_d = 0.0;
  try {
    a = scheme.a.value(t);
    a_d = scheme.a.derivative(t);
  } catch (const Error& e) {
    if (e.code() != Errc::DenominatorSingular && e.code() != Errc::DenominatorNonpositive) {
      throw;
    }
    report.evaluable = false;
    report.residual.fill(std::numeric_limits<double>::quiet_NaN());
    report.holds.fill(false);
    return report;
  }
  const double b = scheme.b.value(t);
  const double b_d = scheme.b.derivative(t);
  const double c = scheme.c.value(t);
  const double c_d = scheme.c.derivative(t);
  const double d = scheme.d.value(t);
  const double d_d = scheme.d.derivative(t);

  const double damping = params.alpha / t;            // alpha(t)
  const double shift = shift_factor(t, params);       // beta(t)
  const double shift_d = -params.beta / (t * t);      // beta'(t)

  report.a = a;
  auto& r = report.residual;
  r[0] = a_d - b * c;
  r[1] = -a * shift;
  r[2] = -a * damping * shift + a * shift_d + a - c * c + b * c * shift;
  r[3] = b_d * b + 0.5 * d_d;
  r[4] = b_d * c + b * (b + c_d - c * damping) + d;
  r[5] = c * (b + c_d - c * damping);

  const double eq_tol = 1e-9 * std::max(1.0, std::abs(a));
  const double ineq_tol =
      1e-12 * std::max({1.0, std::abs(a), std::abs(a_d), c * c, std::abs(b * c)});
  for (std::size_t i = 0; i < r.size(); ++i) {
    const bool finite = std::isfinite(r[i]);
    report.holds[i] = finite && (ConditionReport::kIsEquality[i] ? std::abs(r[i]) <= eq_tol
                                                                 : r[i] <= ineq_tol);
  }
  return report;
}

double find_valid_from(const EnergyScheme& scheme, const SystemParams& params,
                       double t_scan_end) {
  if (!(t_scan_end > params.t0)) {
    throw Error(Errc::InvalidConfig, "t_scan_end must exceed t0");
  }
  double start = params.t0;
  if (std::isfinite(scheme.singular_root)) {
    const double guard = scheme.singular_root + singular_margin(scheme.singular_root);
    if (start <= guard) start = std::nextafter(guard, std::numeric_limits<double>::infinity());
  }
  if (start >= t_scan_end) {
    throw Error(Errc::NoValidThreshold, "scan range empty above the singular root");
  }

  std::vector<double> grid;
  for (int k = 0;; ++k) {
    const double t = start * std::pow(1.01, k);
    if (t > t_scan_end) break;
    grid.push_back(t);
  }

  std::optional<std::size_t> last_fail;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ConditionReport rep = check_conditions(scheme, grid[i], params);
    if (!rep.all_hold() || !(rep.a > 0.0)) last_fail = i;
  }
  if (!last_fail) return grid.front();
  if (*last_fail + 1 >= grid.size()) {
    std::ostringstream msg;
    msg << to_string(scheme.label) << ": conditions never hold simultaneously on ["
        << start << ", " << t_scan_end << "]";
    throw Error(Errc::NoValidThreshold, msg.str());
  }
  return grid[*last_fail + 1];
}

EnergyScheme with_valid_from(EnergyScheme scheme, const SystemParams& params,
                             double t_scan_end) {
  scheme.valid_from = find_valid_from(scheme, params, t_scan_end);
  return scheme;
}

}  // namespace inertial_flow
