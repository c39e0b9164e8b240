// Prints the empirical constants frozen into tests/calibrated.hpp.
// Continuous runs use rtol=1e-10, atol=1e-12.

#include <cmath>
#include <cstdio>

#include <fmt/format.h>

#include "inertial_flow/analysis.hpp"
#include "inertial_flow/discrete.hpp"
#include "inertial_flow/energy.hpp"
#include "inertial_flow/problems.hpp"

using namespace inertial_flow;

int main() {
  IntegratorConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  cfg.t_end = 100.0;

  const ProblemSpec quad = quadratic_problem();
  const Objective& obj = quad.objective;
  SystemParams p = quad.default_params[2];  // alpha 3.1, beta 0, gamma 0.5
  const Trajectory traj = simulate(quad, p, cfg);

  const RateReport shifted = rate_envelope(traj, obj, ErrorKind::ShiftedGap, 2.0, {10.0, 100.0});
  const RateReport plain = rate_envelope(traj, obj, ErrorKind::PlainGap, 2.0, {10.0, 100.0});
  const double valid_from = find_valid_from(rate_scheme(p), p, 100.0);
  const RateReport speed = rate_envelope(traj, obj, ErrorKind::Speed, 1.0, {valid_from, 100.0});
  fmt::print("shifted_gap  sup t^2 err {:.17g}  slope {:.6f}\n", shifted.envelope_sup,
             shifted.fitted_slope);
  fmt::print("plain_gap    sup t^2 err {:.17g}  slope {:.6f}\n", plain.envelope_sup,
             plain.fitted_slope);
  fmt::print("rate valid_from {:.17g}\n", valid_from);
  fmt::print("speed        sup t |x'|  {:.17g}\n", speed.envelope_sup);

  const Accumulators acc = integral_accumulators(traj, p, obj, 75.0);
  fmt::print("tails        value {:.6e}  gradient {:.6e}  speed {:.6e}\n",
             acc.value_tail / acc.value_total(), acc.gradient_tail / acc.gradient_total(),
             acc.speed_tail / acc.speed_total());

  const ThirdDerivativeReport third = third_derivative_check(traj, p, obj);
  fmt::print("third derivative ratio {:.6f} at t={:.4f}\n", third.max_ratio, third.argmax);

  for (const ProblemSpec* spec : {&quad}) {
    for (std::size_t s = 0; s < spec->default_starts.size(); ++s) {
      for (std::size_t r = 0; r < spec->default_params.size(); ++r) {
        const SystemParams row = with_start(spec->default_params[r], spec->default_starts[s]);
        const Trajectory t = simulate(*spec, row, cfg);
        fmt::print("{} start {} row {}  |x(100) - x*| {:.6e}\n", spec->id, s + 1, r + 1,
                   (t.samples().back().x - *spec->objective.minimizer).norm());
      }
    }
  }
  const ProblemSpec quart = quartic_problem();
  for (std::size_t s = 0; s < quart.default_starts.size(); ++s) {
    for (std::size_t r = 0; r < quart.default_params.size(); ++r) {
      const SystemParams row = with_start(quart.default_params[r], quart.default_starts[s]);
      const Trajectory t = simulate(quart, row, cfg);
      fmt::print("{} start {} row {}  |x(100) - x*| {:.6e}\n", quart.id, s + 1, r + 1,
                 (t.samples().back().x - *quart.objective.minimizer).norm());
    }
  }

  AlgoParams ap;
  ap.alpha = 3.0;
  ap.beta = 0.0;
  ap.gamma = 1.0;
  ap.s = 0.1;
  ap.n_max = 10000;
  ap.x0 = Vector::Zero(2);
  ap.x_minus1 = Vector::Zero(2);
  const IterateHistory hist = run_inertial(ap, obj, 0.0);
  double sup = 0.0;
  for (const IterateRecord& rec : hist.records) {
    if (rec.n < 10) continue;
    const double n = static_cast<double>(rec.n);
    sup = std::max(sup, n * n * (obj.eval(rec.x) - *obj.min_value));
  }
  fmt::print("nesterov     sup n^2 gap {:.17g}  final gap {:.6e}\n", sup,
             obj.eval(hist.records.back().x) - *obj.min_value);

  for (double h : {0.01, 0.005, 0.0025, 0.00125}) {
    SystemParams dp = p;
    dp.u0 = quad.default_starts[0].first;
    dp.v0 = quad.default_starts[0].second;
    const long span = std::lround(1.0 / h);
    fmt::print("discretization h={} deviation {:.6e}\n", h,
               discretization_consistency(dp, h, span, obj));
  }
  return 0;
}
