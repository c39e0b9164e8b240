#include "inertial_flow/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "inertial_flow/ode.hpp"

namespace inertial_flow {

namespace {

Vector checked_grad(const Objective& obj, const Vector& at, long n) {
  Vector grad = obj.grad(at);
  if (!grad.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite gradient at iteration " << n;
    throw Error(Errc::NonFiniteState, msg.str(), static_cast<double>(n));
  }
  return grad;
}

}  // namespace

void AlgoParams::validate() const {
  if (!(alpha > 0.0)) throw Error(Errc::InvalidConfig, "alpha must be > 0");
  if (!(gamma >= 0.0)) throw Error(Errc::InvalidConfig, "gamma must be >= 0");
  if (!(s > 0.0)) throw Error(Errc::InvalidConfig, "step size s must be > 0");
  if (!std::isfinite(beta)) throw Error(Errc::InvalidConfig, "beta must be finite");
  if (n_max < 0) throw Error(Errc::InvalidConfig, "n_max must be >= 0");
  if (x0.size() == 0 || x0.size() != x_minus1.size()) {
    throw Error(Errc::InvalidConfig, "initial iterates must be non-empty and of equal size");
  }
}

StepRegime classify_step(const AlgoParams& params, const Objective& obj) {
  if (obj.lipschitz > 0.0 && params.s > 1.0 / obj.lipschitz) return StepRegime::Experimental;
  return StepRegime::Standard;
}

double default_step(const Objective& obj) {
  return obj.lipschitz > 0.0 ? 1.0 / obj.lipschitz : 1.0;
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::GradientTolerance: return "GradientTolerance";
    case StopReason::IterationBudget: return "IterationBudget";
  }
  return "Unknown";
}

InertialStep inertial_step(long n, const Vector& x_n, const Vector& x_prev,
                           const AlgoParams& params, const Objective& obj) {
  const double nd = static_cast<double>(n);
  const double denom = nd + params.alpha;
  const Vector delta = x_n - x_prev;
  InertialStep step;
  step.y = x_n + (nd / denom) * delta;
  step.z = x_n + ((params.gamma * nd + params.beta) / denom) * delta;
  step.x_next = step.y - params.s * checked_grad(obj, step.z, n);
  return step;
}

IterateHistory run_inertial(const AlgoParams& params, const Objective& obj, double grad_tol) {
  params.validate();
  IterateHistory history;
  if (classify_step(params, obj) == StepRegime::Experimental) {
    history.warnings.push_back("step size s exceeds 1/L_g; run is experimental");
  }

  Vector x_prev = params.x_minus1;
  Vector x = params.x0;
  for (long n = 0;; ++n) {
    const double nd = static_cast<double>(n);
    const double denom = nd + params.alpha;
    const Vector delta = x - x_prev;
    IterateRecord rec;
    rec.n = n;
    rec.x = x;
    rec.y = x + (nd / denom) * delta;
    rec.z = x + ((params.gamma * nd + params.beta) / denom) * delta;
    rec.value = obj.eval(x);
    history.records.push_back(rec);

    if (checked_grad(obj, x, n).norm() <= grad_tol) {
      history.stop = StopReason::GradientTolerance;
      break;
    }
    if (n >= params.n_max) {
      history.stop = StopReason::IterationBudget;
      break;
    }
    InertialStep step = inertial_step(n, x, x_prev, params, obj);
    x_prev = std::move(x);
    x = std::move(step.x_next);
  }
  return history;
}

ProxOperator soft_threshold(double lambda, double weight) {
  const double thr = lambda * weight;
  ProxOperator prox;
  prox.lambda = lambda;
  prox.apply = [thr](const Vector& x) {
    return x.unaryExpr([thr](double v) {
      const double mag = std::max(std::abs(v) - thr, 0.0);
      return v < 0.0 ? -mag : mag;
    }).eval();
  };
  prox.value = [weight](const Vector& x) { return weight * x.lpNorm<1>(); };
  return prox;
}

ProxOperator box_projection(double lambda, Vector lo, Vector hi) {
  ProxOperator prox;
  prox.lambda = lambda;
  prox.apply = [lo, hi](const Vector& x) { return x.cwiseMax(lo).cwiseMin(hi).eval(); };
  prox.value = [lo, hi](const Vector& x) {
    const bool inside = (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
    return inside ? 0.0 : std::numeric_limits<double>::infinity();
  };
  return prox;
}

ProxOperator identity_prox(double lambda) {
  ProxOperator prox;
  prox.lambda = lambda;
  prox.apply = [](const Vector& x) { return x; };
  prox.value = [](const Vector&) { return 0.0; };
  return prox;
}

InertialStep prox_inertial_step(long n, const Vector& x_n, const Vector& x_prev,
                                const AlgoParams& params, const Objective& obj,
                                const ProxOperator& prox) {
  if (n < 1) {
    throw Error(Errc::InvalidConfig, "proximal iteration index must be >= 1");
  }
  const double nd = static_cast<double>(n);
  const Vector delta = x_n - x_prev;
  InertialStep step;
  step.y = x_n + (((1.0 - params.gamma) * nd - params.alpha) / nd) * delta;
  step.z = x_n + ((params.gamma * nd + params.beta) / nd) * delta;
  const Vector forward = step.z - prox.lambda * checked_grad(obj, step.z, n);
  step.x_next = 0.5 * step.y + 0.5 * prox.apply(forward);
  return step;
}

IterateHistory run_prox_inertial(const AlgoParams& params, const Objective& obj,
                                 const ProxOperator& prox, double tol) {
  params.validate();
  if (!(prox.lambda > 0.0)) throw Error(Errc::InvalidConfig, "prox lambda must be > 0");
  IterateHistory history;
  if (params.alpha < params.beta) {
    history.warnings.push_back("alpha < beta: outside the stated parameter range");
  }

  Vector x_prev = params.x_minus1;
  Vector x = params.x0;
  const long n_last = std::max(params.n_max, 1L);
  for (long n = 1;; ++n) {
    const double nd = static_cast<double>(n);
    const Vector delta = x - x_prev;
    IterateRecord rec;
    rec.n = n;
    rec.x = x;
    rec.y = x + (((1.0 - params.gamma) * nd - params.alpha) / nd) * delta;
    rec.z = x + ((params.gamma * nd + params.beta) / nd) * delta;
    rec.value = obj.eval(x) + prox.value(x);
    history.records.push_back(rec);

    const Vector mapped = prox.apply(x - prox.lambda * checked_grad(obj, x, n));
    if ((x - mapped).norm() / prox.lambda <= tol) {
      history.stop = StopReason::GradientTolerance;
      break;
    }
    if (n >= n_last) {
      history.stop = StopReason::IterationBudget;
      break;
    }
    InertialStep step = prox_inertial_step(n, x, x_prev, params, obj, prox);
    x_prev = std::move(x);
    x = std::move(step.x_next);
  }
  return history;
}

double discretization_consistency(const SystemParams& params, double h, long n_span,
                                  const Objective& obj) {
  validate_params(params);
  if (!(h > 0.0) || n_span < 1) {
    throw Error(Errc::InvalidConfig, "need h > 0 and n_span >= 1");
  }
  const long n_start = std::lround(params.t0 / h);
  if (n_start < 1 ||
      std::abs(static_cast<double>(n_start) * h - params.t0) > 1e-9 * std::max(1.0, params.t0)) {
    throw Error(Errc::InvalidConfig, "t0 must be a positive integer multiple of h");
  }

  IntegratorConfig cfg;
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;
  cfg.t_end = static_cast<double>(n_start + n_span) * h;
  const Trajectory traj = integrate(params, obj, cfg);

  Vector x_prev = params.u0 - h * params.v0;
  Vector x = params.u0;
  double worst = 0.0;
  for (long n = n_start; n < n_start + n_span; ++n) {
    const double nd = static_cast<double>(n);
    const Vector delta = x - x_prev;
    const Vector z = x + (params.gamma / h + params.beta / (nd * h * h)) * delta;
    Vector x_next = x + (1.0 - params.alpha / nd) * delta - h * h * checked_grad(obj, z, n);
    x_prev = std::move(x);
    x = std::move(x_next);
    const double t_next = static_cast<double>(n + 1) * h;
    worst = std::max(worst, (x - traj.at(std::min(t_next, traj.t_end())).x).norm());
  }
  return worst;
}

}  // namespace inertial_flow
