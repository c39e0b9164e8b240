#include "inertial_flow/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace inertial_flow {

void IntegratorConfig::validate(double t0) const {
  if (!(rtol > 0.0) || !(atol > 0.0)) {
    throw Error(Errc::InvalidConfig, "rtol and atol must be > 0");
  }
  if (!(h_init > 0.0) || !(h_init <= h_max)) {
    throw Error(Errc::InvalidConfig, "need 0 < h_init <= h_max");
  }
  if (max_steps <= 0) {
    throw Error(Errc::InvalidConfig, "max_steps must be positive");
  }
  if (!(t_end >= t0)) {
    throw Error(Errc::InvalidConfig, "t_end must not precede t0");
  }
}

std::pair<Vector, Vector> vector_field(double t, const SystemState& state,
                                       const SystemParams& params, const Objective& obj) {
  const SystemState at_t{t, state.x, state.v};
  Vector grad = obj.grad(shifted_point(at_t, params));
  if (!grad.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite gradient at t=" << t;
    throw Error(Errc::NonFiniteState, msg.str(), t);
  }
  Vector dv = -(params.alpha / t) * state.v - grad;
  return {state.v, std::move(dv)};
}

double lipschitz_modulus(double t, const SystemParams& params, const Objective& obj) {
  const double lg2 = obj.lipschitz * obj.lipschitz;
  const double damping = params.alpha / t;
  const double shift = shift_factor(t, params);
  return std::sqrt(1.0 + 4.0 * lg2 + 2.0 * damping * damping + 4.0 * lg2 * shift * shift);
}

// ---------------------------------------------------------------------------
// Trajectory

Trajectory::Trajectory(SystemParams params, SystemState initial) : params_(std::move(params)) {
  samples_.push_back(std::move(initial));
}

void Trajectory::append_step(SystemState end, Eigen::MatrixXd coeffs) {
  const double t_start = samples_.back().t;
  segments_.push_back({t_start, end.t - t_start, std::move(coeffs)});
  samples_.push_back(std::move(end));
}

SystemState Trajectory::at(double t) const {
  const double lo = t_begin();
  const double hi = t_end();
  const double slack = 1e-12 * std::max(1.0, std::abs(hi));
  if (t < lo - slack || t > hi + slack) {
    std::ostringstream msg;
    msg << "t=" << t << " outside trajectory span [" << lo << ", " << hi << "]";
    throw Error(Errc::InvalidConfig, msg.str());
  }
  t = std::clamp(t, lo, hi);

  // index of the first sample with time > t
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                             [](double value, const SystemState& s) { return value < s.t; });
  auto idx = static_cast<std::size_t>(it - samples_.begin());
  if (idx > 0 && samples_[idx - 1].t == t) {
    return samples_[idx - 1];
  }
  if (idx == 0) return samples_.front();
  if (idx >= samples_.size()) return samples_.back();

  const Segment& seg = segments_[idx - 1];
  const double theta = (t - seg.t) / seg.h;
  const double theta1 = 1.0 - theta;
  const auto& c = seg.coeffs;
  Vector y = c.col(0) +
             theta * (c.col(1) + theta1 * (c.col(2) + theta * (c.col(3) + theta1 * c.col(4))));
  const Eigen::Index m = y.size() / 2;
  return {t, y.head(m), y.tail(m)};
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

namespace {

constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// difference between the 5th and 4th order weights
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// dense output
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// PI controller (Gustafsson), exponents for a method of order 5
constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 5.0;
constexpr double kExpI = 0.7 / 5.0;
constexpr double kExpP = 0.4 / 5.0;

}  // namespace

Trajectory integrate_second_order(const SystemParams& params, const Acceleration& accel,
                                  const IntegratorConfig& cfg) {
  validate_params(params);
  cfg.validate(params.t0);

  const Eigen::Index m = params.u0.size();
  const Eigen::Index n = 2 * m;

  auto rhs = [&](double t, const Vector& y) {
    Vector dy(n);
    dy.head(m) = y.tail(m);
    dy.tail(m) = accel(t, y.head(m), y.tail(m));
    if (!dy.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite derivative at t=" << t;
      throw Error(Errc::NonFiniteState, msg.str(), t);
    }
    return dy;
  };

  Trajectory traj(params, SystemState{params.t0, params.u0, params.v0});
  if (cfg.t_end == params.t0) return traj;

  Vector y(n);
  y << params.u0, params.v0;
  if (!y.allFinite()) {
    throw Error(Errc::NonFiniteState, "non-finite initial state", params.t0);
  }

  double t = params.t0;
  double h = std::min(cfg.h_init, cfg.t_end - t);
  double err_prev = 1e-4;
  bool last_rejected = false;
  Vector k1 = rhs(t, y);
  Vector k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y_new(n), err(n);

  for (long step = 0;; ++step) {
    if (step >= cfg.max_steps) {
      std::ostringstream msg;
      msg << "max_steps=" << cfg.max_steps << " exceeded at t=" << t;
      throw Error(Errc::MaxStepsExceeded, msg.str(), t);
    }
    if (h < 1e-14 * std::abs(t)) {
      std::ostringstream msg;
      msg << "step size " << h << " underflow at t=" << t;
      throw Error(Errc::StepUnderflow, msg.str(), t);
    }
    const bool final_step = t + h >= cfg.t_end;
    if (final_step) h = cfg.t_end - t;

    k2 = rhs(t + c2 * h, y + h * (a21 * k1));
    k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const double t_new = final_step ? cfg.t_end : t + h;
    k6 = rhs(t_new, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    k7 = rhs(t_new, y_new);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double scale = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      const double r = err[i] / scale;
      sum += r * r;
    }
    const double err_norm = std::sqrt(sum / static_cast<double>(n));
    if (!std::isfinite(err_norm)) {
      throw Error(Errc::NonFiniteState, "non-finite error estimate", t);
    }

    if (err_norm <= 1.0) {
      Eigen::MatrixXd coeffs(n, 5);
      const Vector ydiff = y_new - y;
      const Vector bspl = h * k1 - ydiff;
      coeffs.col(0) = y;
      coeffs.col(1) = ydiff;
      coeffs.col(2) = bspl;
      coeffs.col(3) = ydiff - h * k7 - bspl;
      coeffs.col(4) = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      traj.append_step(SystemState{t_new, y_new.head(m), y_new.tail(m)}, std::move(coeffs));

      t = t_new;
      y = y_new;
      k1 = k7;  // first-same-as-last
      if (final_step) break;

      double factor = err_norm == 0.0
                          ? kFacMax
                          : kSafety * std::pow(err_norm, -kExpI) * std::pow(err_prev, kExpP);
      factor = std::clamp(factor, kFacMin, kFacMax);
      if (last_rejected) factor = std::min(factor, 1.0);
      err_prev = std::max(err_norm, 1e-4);
      h = std::min(h * factor, cfg.h_max);
      last_rejected = false;
    } else {
      const double factor = std::clamp(kSafety * std::pow(err_norm, -0.2), kFacMin, 1.0);
      h *= factor;
      last_rejected = true;
    }
  }
  return traj;
}

Trajectory integrate(const SystemParams& params, const Objective& obj,
                     const IntegratorConfig& cfg) {
  Acceleration accel = [&params, &obj](double t, const Vector& x, const Vector& v) {
    return vector_field(t, SystemState{t, x, v}, params, obj).second;
  };
  return integrate_second_order(params, accel, cfg);
}

}  // namespace inertial_flow
