#include "inertial_flow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace inertial_flow {

namespace {

constexpr double kFitFloor = 1e-15;

double error_at(const SystemState& s, const SystemParams& params, const Objective& obj,
                ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ShiftedGap: return obj.eval(shifted_point(s, params)) - *obj.min_value;
    case ErrorKind::PlainGap: return obj.eval(s.x) - *obj.min_value;
    case ErrorKind::Speed: return s.v.norm();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ShiftedGap: return "shifted_gap";
    case ErrorKind::PlainGap: return "plain_gap";
    case ErrorKind::Speed: return "speed";
  }
  return "unknown";
}

RateReport rate_envelope(std::span<const double> t, std::span<const double> error, double p,
                         Window window) {
  if (t.size() != error.size()) {
    throw Error(Errc::InvalidConfig, "rate_envelope: series lengths differ");
  }
  RateReport report;
  report.window = window;
  report.p = p;
  if (!(window.lo < window.hi)) {
    throw Error(Errc::EmptyWindow, "rate_envelope: window must satisfy t_lo < t_hi");
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t fit_count = 0;
  bool first = true;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window.lo || t[i] > window.hi) continue;
    ++report.samples;
    const double scaled = std::pow(t[i], p) * error[i];
    if (first || scaled > report.envelope_sup) {
      report.envelope_sup = scaled;
      report.argsup = t[i];
      first = false;
    }
    if (error[i] > kFitFloor) {
      const double lx = std::log(t[i]);
      const double ly = std::log(error[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++fit_count;
    }
  }
  if (report.samples == 0) {
    std::ostringstream msg;
    msg << "no samples in window [" << window.lo << ", " << window.hi << "]";
    throw Error(Errc::EmptyWindow, msg.str());
  }
  if (fit_count >= 2) {
    const double n = static_cast<double>(fit_count);
    report.fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  } else {
    report.fitted_slope = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

std::vector<double> error_series(const Trajectory& traj, const Objective& obj, ErrorKind kind) {
  if (kind != ErrorKind::Speed) obj.require_minimizer("error_series");
  std::vector<double> out;
  out.reserve(traj.samples().size());
  for (const SystemState& s : traj.samples()) out.push_back(error_at(s, traj.params(), obj, kind));
  return out;
}

RateReport rate_envelope(const Trajectory& traj, const Objective& obj, ErrorKind kind, double p,
                         Window window) {
  if (window.lo < traj.t_begin() || window.hi > traj.t_end()) {
    throw Error(Errc::EmptyWindow, "rate_envelope: window exceeds the trajectory span");
  }
  const std::vector<double> err = error_series(traj, obj, kind);
  std::vector<double> t;
  t.reserve(err.size());
  for (const SystemState& s : traj.samples()) t.push_back(s.t);
  return rate_envelope(t, err, p, window);
}

std::vector<double> trapezoid_cumulative(std::span<const double> t, std::span<const double> f) {
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) {
    out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
  }
  return out;
}

Accumulators integral_accumulators(const Trajectory& traj, const SystemParams& params,
                                   const Objective& obj, std::optional<double> tail_start) {
  obj.require_minimizer("integral_accumulators");
  Accumulators acc;
  acc.gradient_weight_power = params.gamma == 0.0 ? 1.0 : 2.0;
  const double t_lo = traj.t_begin();
  const double t_hi = traj.t_end();
  acc.tail_start = tail_start.value_or(t_hi - 0.25 * (t_hi - t_lo));
  acc.tail_start = std::clamp(acc.tail_start, t_lo, t_hi);

  std::vector<SystemState> grid;
  grid.reserve(traj.samples().size() + 1);
  bool inserted = false;
  for (const SystemState& s : traj.samples()) {
    if (!inserted && s.t >= acc.tail_start) {
      if (s.t > acc.tail_start) grid.push_back(traj.at(acc.tail_start));
      inserted = true;
    }
    grid.push_back(s);
  }

  std::vector<double> f1, f2, f3;
  for (const SystemState& s : grid) {
    const Vector shifted = shifted_point(s, params);
    const double gap = obj.eval(shifted) - *obj.min_value;
    acc.t.push_back(s.t);
    f1.push_back(s.t * gap);
    f2.push_back(std::pow(s.t, acc.gradient_weight_power) * obj.grad(shifted).squaredNorm());
    f3.push_back(s.t * s.v.squaredNorm());
  }
  acc.value_integral = trapezoid_cumulative(acc.t, f1);
  acc.gradient_integral = trapezoid_cumulative(acc.t, f2);
  acc.speed_integral = trapezoid_cumulative(acc.t, f3);

  const auto tail_idx = static_cast<std::size_t>(
      std::lower_bound(acc.t.begin(), acc.t.end(), acc.tail_start) - acc.t.begin());
  acc.value_tail = acc.value_total() - acc.value_integral[tail_idx];
  acc.gradient_tail = acc.gradient_total() - acc.gradient_integral[tail_idx];
  acc.speed_tail = acc.speed_total() - acc.speed_integral[tail_idx];
  return acc;
}

double third_derivative_constant(const SystemParams& params, const Objective& obj) {
  const double lg = obj.lipschitz;
  const double t0 = params.t0;
  const double k_velocity = lg + (params.alpha + lg * std::abs(params.beta)) / (t0 * t0);
  // alpha u + Lg |gamma + beta u| is convex in u = 1/t, so its max over
  // u in (0, 1/t0] sits at an endpoint.
  const double k_accel = std::max(params.alpha / t0 + lg * std::abs(shift_factor(t0, params)),
                                  lg * params.gamma);
  return std::max(k_velocity, k_accel);
}

ThirdDerivativeReport third_derivative_check(const Trajectory& traj, const SystemParams& params,
                                             const Objective& obj) {
  constexpr double kDelta = 1e-4;
  constexpr double kFloor = 1e-12;
  ThirdDerivativeReport report;
  report.constant = third_derivative_constant(params, obj);

  auto accel_at = [&](double t) {
    const SystemState s = traj.at(t);
    return vector_field(t, s, params, obj).second;
  };

  for (const SystemState& s : traj.samples()) {
    const Vector accel = vector_field(s.t, s, params, obj).second;
    const double denom = report.constant * (s.v.norm() + accel.norm());
    if (denom < kFloor) {
      ++report.skipped;
      continue;
    }
    const double lo = std::max(s.t - kDelta, traj.t_begin());
    const double hi = std::min(s.t + kDelta, traj.t_end());
    if (!(hi > lo)) {
      ++report.skipped;
      continue;
    }
    const Vector jerk = (accel_at(hi) - accel_at(lo)) / (hi - lo);
    const double ratio = jerk.norm() / denom;
    ++report.evaluated;
    if (ratio > report.max_ratio) {
      report.max_ratio = ratio;
      report.argmax = s.t;
    }
  }
  return report;
}

LimitPoint limit_point(const Trajectory& traj, const Objective& obj, double tol) {
  constexpr int kGrid = 400;
  LimitPoint lp;
  lp.estimate = traj.samples().back().x;
  lp.residual = obj.grad(lp.estimate).norm();

  const double t_hi = traj.t_end();
  const double t_lo = t_hi - 0.1 * (t_hi - traj.t_begin());
  double worst = 0.0;
  for (const SystemState& s : traj.samples()) {
    if (s.t >= t_lo) worst = std::max(worst, (s.x - lp.estimate).norm());
  }
  if (t_hi > t_lo) {
    for (int i = 0; i <= kGrid; ++i) {
      const double t = t_lo + (t_hi - t_lo) * i / kGrid;
      worst = std::max(worst, (traj.at(t).x - lp.estimate).norm());
    }
  }
  lp.tail_deviation = worst;
  lp.converged = worst <= tol;
  return lp;
}

MonotonicityReport energy_monotonicity(const Trajectory& traj, const EnergyScheme& scheme,
                                       const Objective& obj, double t_from, double rel_slack) {
  obj.require_minimizer("energy_monotonicity");
  const SystemParams& params = traj.params();
  MonotonicityReport report;

  std::vector<SystemState> states;
  if (t_from > traj.t_begin() && t_from <= traj.t_end()) states.push_back(traj.at(t_from));
  for (const SystemState& s : traj.samples()) {
    if (s.t >= t_from && (states.empty() || s.t > states.back().t)) states.push_back(s);
  }
  if (states.empty()) {
    throw Error(Errc::EmptyWindow, "energy_monotonicity: no samples after t_from");
  }

  report.start_energy = energy_value(scheme, states.front(), params, obj);
  double prev = report.start_energy;
  report.samples = states.size();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const SystemState& s = states[i];
    const double energy = i == 0 ? prev : energy_value(scheme, s, params, obj);
    if (i > 0) {
      const double increase = (energy - prev) / std::max(std::abs(prev), 1e-300);
      if (increase > report.worst_relative_increase) {
        report.worst_relative_increase = increase;
        report.worst_t = s.t;
      }
      if (energy - prev > rel_slack * std::abs(prev)) report.nonincreasing = false;
    }
    const double weighted_gap =
        scheme.a.value(s.t) * (obj.eval(shifted_point(s, params)) - *obj.min_value);
    if (report.start_energy > 0.0) {
      report.bound_ratio = std::max(report.bound_ratio, weighted_gap / report.start_energy);
    }
    prev = energy;
  }
  return report;
}

}  // namespace inertial_flow
