#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "inertial_flow/ode.hpp"
#include "inertial_flow/problems.hpp"
#include "oracles.hpp"

using namespace inertial_flow;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Objective half_square() {
  Objective obj;
  obj.dim = 1;
  obj.eval = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  obj.grad = [](const Vector& x) { return x; };
  obj.lipschitz = 1.0;
  obj.minimizer = Vector::Zero(1);
  obj.min_value = 0.0;
  return obj;
}

SystemParams quad_row(double alpha, double beta, double gamma) {
  SystemParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  p.t0 = 1.0;
  p.u0 = v2(-5, 30);
  p.v0 = v2(-5, 30);
  return p;
}

// Max deviation of (x, v) from the RK4 oracle at h=1e-4 over [1, 10], sampled every 0.01.
double rk4_deviation(const IntegratorConfig& cfg) {
  static const std::vector<oracle::State> ref = [] {
    const Objective obj = quadratic_problem().objective;
    return oracle::rk4(3.1, 0.0, 0.5, 1.0, v2(-5, 30), v2(-5, 30), obj.grad, 1e-4, 10.0, 100);
  }();
  const Trajectory traj = integrate(quad_row(3.1, 0.0, 0.5), quadratic_problem().objective, cfg);
  double worst = 0.0;
  for (const oracle::State& s : ref) {
    const SystemState a = traj.at(s.t);
    worst = std::max(worst, std::max((a.x - s.x).norm(), (a.v - s.v).norm()));
  }
  return worst;
}

}  // namespace

TEST_CASE("vector_field at the minimizer is zero") {
  const ProblemSpec quad = quadratic_problem();
  const auto [dx, dv] = vector_field(1.0, {1.0, v2(1, -1), v2(0, 0)}, quad_row(3.1, 0, 0.5),
                                     quad.objective);
  CHECK(dx.norm() == 0.0);
  CHECK(dv.norm() == 0.0);
  for (const ProblemSpec& spec : {quadratic_problem(), quartic_problem(), periodic_problem()}) {
    SystemParams p = spec.default_params.front();
    const Vector zero = Vector::Zero(spec.objective.dim);
    const auto field = vector_field(3.0, {3.0, *spec.objective.minimizer, zero}, p, spec.objective);
    CHECK(field.first.norm() == 0.0);
    CHECK(field.second.norm() == 0.0);
  }
}

TEST_CASE("vector_field hand substitution") {
  SystemParams p;
  p.alpha = 1.0;
  p.beta = -1.0;
  p.gamma = 0.0;
  const Vector x = Vector::Zero(1);
  const Vector v = Vector::Ones(1);
  const auto [dx, dv] = vector_field(1.0, {1.0, x, v}, p, half_square());
  CHECK(dx[0] == 1.0);
  CHECK(dv[0] == 0.0);
}

TEST_CASE("vector_field with zero velocity is minus the gradient") {
  const ProblemSpec quart = quartic_problem();
  const Vector x = v2(0.3, -2.0);
  const auto [dx, dv] =
      vector_field(2.0, {2.0, x, v2(0, 0)}, quad_row(3.1, 0.7, 0.2), quart.objective);
  CHECK(dx.norm() == 0.0);
  CHECK((dv + quart.objective.grad(x)).norm() == 0.0);
}

TEST_CASE("vector_field reports non-finite gradients with their time") {
  Objective bad = half_square();
  bad.grad = [](const Vector& x) { return Vector::Constant(x.size(), std::nan("")); };
  SystemParams p;
  try {
    vector_field(4.5, {4.5, Vector::Zero(1), Vector::Zero(1)}, p, bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonFiniteState);
    REQUIRE(e.time());
    CHECK(*e.time() == 4.5);
  }
}

TEST_CASE("lipschitz_modulus examples") {
  Objective flat = half_square();
  flat.lipschitz = 0.0;
  SystemParams p;
  p.alpha = 3.0;
  CHECK(lipschitz_modulus(3.0, p, flat) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));

  const Objective quad = quadratic_problem().objective;
  const SystemParams q = quad_row(3.1, 0.0, 0.5);
  CHECK(lipschitz_modulus(1e12, q, quad) == doctest::Approx(std::sqrt(501.0)).epsilon(1e-12));
  double prev = std::numeric_limits<double>::infinity();
  for (double t = 1.0; t < 1000.0; t *= 1.1) {
    const double l = lipschitz_modulus(t, q, quad);
    CHECK(l <= prev);
    prev = l;
  }
}

TEST_CASE("integrate reproduces the exact periodic solution") {
  const ProblemSpec per = periodic_problem(1.0, -1.0);
  IntegratorConfig cfg;
  cfg.t_end = 20.0;
  const Trajectory traj = simulate(per, per.default_params.front(), cfg);
  double worst = 0.0;
  for (const SystemState& s : traj.samples()) worst = std::max(worst, std::abs(s.x[0] - std::sin(s.t)));
  for (int i = 0; i <= 2000; ++i) {
    const double t = traj.t_begin() + (traj.t_end() - traj.t_begin()) * i / 2000.0;
    worst = std::max(worst, std::abs(traj.at(t).x[0] - std::sin(t)));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("frequency of the periodic problem") {
  const ProblemSpec per = periodic_problem(4.0, -1.0);
  IntegratorConfig cfg;
  cfg.t_end = 10.0;
  const Trajectory traj = simulate(per, per.default_params.front(), cfg);
  for (const SystemState& s : traj.samples()) CHECK(std::abs(s.x[0] - std::sin(2.0 * s.t)) <= 1e-6);
}

TEST_CASE("quadratic trajectory approaches the minimizer") {
  IntegratorConfig cfg;
  const Trajectory traj = integrate(quad_row(3.1, 0.0, 0.5), quadratic_problem().objective, cfg);
  CHECK(traj.t_end() == 100.0);
  CHECK((traj.samples().back().x - v2(1, -1)).norm() <= 1e-2);
}

TEST_CASE("empty integration interval gives the initial sample") {
  IntegratorConfig cfg;
  cfg.t_end = 1.0;
  const Trajectory traj = integrate(quad_row(3.1, 0.0, 0.5), quadratic_problem().objective, cfg);
  REQUIRE(traj.samples().size() == 1);
  CHECK(traj.samples().front().x == v2(-5, 30));
  CHECK(traj.steps() == 0);
}

TEST_CASE("samples increase strictly and dense output hits the samples") {
  IntegratorConfig cfg;
  const Trajectory traj = integrate(quad_row(3.1, 1.0, 1.0), quadratic_problem().objective, cfg);
  const auto& s = traj.samples();
  for (std::size_t i = 1; i < s.size(); ++i) {
    CHECK(s[i].t > s[i - 1].t);
    CHECK(s[i].t >= traj.params().t0);
  }
  for (std::size_t i = 0; i < s.size(); i += 7) {
    const SystemState a = traj.at(s[i].t);
    CHECK((a.x - s[i].x).norm() <= 1e-12 * std::max(1.0, s[i].x.norm()));
    CHECK((a.v - s[i].v).norm() <= 1e-12 * std::max(1.0, s[i].v.norm()));
  }
}

TEST_CASE("dense output segment ends agree with the stored samples") {
  IntegratorConfig cfg;
  const Trajectory traj = integrate(quad_row(3.1, 0.0, 0.5), quadratic_problem().objective, cfg);
  const auto& s = traj.samples();
  for (std::size_t i = 1; i < s.size(); i += 5) {
    // approach the sample from inside the previous segment
    const double t = std::nextafter(s[i].t, s[i - 1].t);
    const SystemState a = traj.at(t);
    CHECK((a.x - s[i].x).norm() <= 1e-12 * std::max(1.0, s[i].x.norm()) + 1e-12);
  }
}

TEST_CASE("adaptive trajectory matches fixed-step RK4") {
  IntegratorConfig cfg;
  cfg.t_end = 10.0;
  CHECK(rk4_deviation(cfg) <= 1e-5);
}

TEST_CASE("halving the tolerances never increases the RK4 deviation") {
  IntegratorConfig cfg;
  cfg.t_end = 10.0;
  double prev = rk4_deviation(cfg);
  for (int k = 0; k < 4; ++k) {
    cfg.rtol /= 2.0;
    cfg.atol /= 2.0;
    const double dev = rk4_deviation(cfg);
    CHECK(dev <= prev);
    prev = dev;
  }
}

TEST_CASE("heavy-ball mechanical energy is nonincreasing") {
  const Objective obj = quadratic_problem().objective;
  for (const auto& start : quadratic_problem().default_starts) {
    SystemParams p = quad_row(3.0, 0.0, 0.0);
    p.u0 = start.first;
    p.v0 = start.second;
    IntegratorConfig cfg;
    const Trajectory traj = integrate(p, obj, cfg);
    double prev = std::numeric_limits<double>::infinity();
    for (const SystemState& s : traj.samples()) {
      const double w = 0.5 * s.v.squaredNorm() + obj.eval(s.x);
      CHECK(w <= prev + 1e-8 * std::abs(prev));
      prev = w;
    }
  }
}

TEST_CASE("integrator configuration is validated") {
  const SystemParams p = quad_row(3.1, 0, 0.5);
  const Objective obj = quadratic_problem().objective;
  auto code_of = [&](IntegratorConfig cfg) {
    try {
      integrate(p, obj, cfg);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::EmptyWindow;
  };
  IntegratorConfig cfg;
  cfg.rtol = 0.0;
  CHECK(code_of(cfg) == Errc::InvalidConfig);
  cfg = {};
  cfg.atol = -1.0;
  CHECK(code_of(cfg) == Errc::InvalidConfig);
  cfg = {};
  cfg.h_init = 1.0;
  cfg.h_max = 0.5;
  CHECK(code_of(cfg) == Errc::InvalidConfig);
  cfg = {};
  cfg.t_end = 0.5;
  CHECK(code_of(cfg) == Errc::InvalidConfig);
  cfg = {};
  cfg.max_steps = 5;
  CHECK(code_of(cfg) == Errc::MaxStepsExceeded);
}

TEST_CASE("step underflow at a finite-time singularity") {
  SystemParams p;
  p.t0 = 1.0;
  p.u0 = Vector::Zero(1);
  p.v0 = Vector::Zero(1);
  // x'' = (2 - t)^-3 blows up at t = 2
  const Acceleration accel = [](double t, const Vector&, const Vector&) {
    return Vector::Constant(1, 1.0 / ((2.0 - t) * (2.0 - t) * (2.0 - t)));
  };
  IntegratorConfig cfg;
  cfg.t_end = 3.0;
  try {
    integrate_second_order(p, accel, cfg);
    FAIL("expected a numerical failure");
  } catch (const Error& e) {
    CHECK_FALSE(is_config_error(e.code()));
    REQUIRE(e.time());
    CHECK(*e.time() < 2.0);
    CHECK(*e.time() > 1.9);
  }
}
