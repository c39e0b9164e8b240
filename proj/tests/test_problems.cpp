#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "inertial_flow/problems.hpp"
#include "oracles.hpp"

using namespace inertial_flow;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// expanded textbook forms, used only away from the minimizer
double quad_expanded(const Vector& x) {
  return 2 * x[0] * x[0] + 5 * x[1] * x[1] - 4 * x[0] + 10 * x[1] + 7;
}
double quart_expanded(const Vector& x) {
  return std::pow(x[0], 4) + 5 * x[1] * x[1] - 4 * x[0] - 10 * x[1] + 8;
}

}  // namespace

TEST_CASE("objective values and minimizers") {
  const Objective q = quadratic_problem().objective;
  const Objective r = quartic_problem().objective;
  CHECK(q.eval(v2(0, 0)) == doctest::Approx(7.0));
  CHECK(r.eval(v2(0, 0)) == doctest::Approx(8.0));
  CHECK(q.eval(v2(1, -1)) == 0.0);
  CHECK(r.eval(v2(1, 1)) == 0.0);
  CHECK(q.grad(v2(1, -1)).norm() == 0.0);
  CHECK(r.grad(v2(1, 1)).norm() == 0.0);
  CHECK(q.has_minimizer());
  CHECK(r.has_minimizer());
  CHECK(*q.minimizer == v2(1, -1));
  CHECK(*r.minimizer == v2(1, 1));
}

TEST_CASE("stable forms agree with the expanded polynomials") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  const Objective q = quadratic_problem().objective;
  const Objective r = quartic_problem().objective;
  for (int k = 0; k < 100; ++k) {
    const Vector x = v2(u(rng), u(rng));
    CHECK(q.eval(x) == doctest::Approx(quad_expanded(x)).epsilon(1e-12));
    CHECK(r.eval(x) == doctest::Approx(quart_expanded(x)).epsilon(1e-12));
  }
}

TEST_CASE("gradients match central differences") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-5, 5);
  for (const ProblemSpec& spec : {quadratic_problem(), quartic_problem(), periodic_problem(2, -3)}) {
    const Objective& obj = spec.objective;
    for (int k = 0; k < 100; ++k) {
      Vector x(obj.dim);
      for (int i = 0; i < obj.dim; ++i) x[i] = u(rng);
      const Vector fd = oracle::central_gradient(obj.eval, x);
      const Vector g = obj.grad(x);
      CHECK((fd - g).norm() <= 1e-6 * std::max(1.0, g.norm()));
    }
  }
}

TEST_CASE("declared Lipschitz constants") {
  const Objective q = quadratic_problem().objective;
  CHECK(q.lipschitz == 10.0);
  CHECK(oracle::sampled_lipschitz(q.grad, 2, 50, 10000, 1) <= 10.0 * (1 + 1e-12));

  const ProblemSpec quart = quartic_problem();
  CHECK(oracle::sampled_lipschitz(quart.objective.grad, 2, 10, 10000, 2) <=
        quart.objective.lipschitz);
  // Hessian diag(12x^2, 10) is PSD everywhere
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int k = 0; k < 1000; ++k) {
    const Vector x = v2(u(rng), u(rng));
    const Vector y = v2(u(rng), u(rng));
    CHECK((quart.objective.grad(x) - quart.objective.grad(y)).dot(x - y) >= 0.0);
  }
  REQUIRE(quart.domain);
  CHECK(quart.domain->contains(v2(10, -10)));
  CHECK_FALSE(quart.domain->contains(v2(10.5, 0)));
}

TEST_CASE("parameter tables and starts") {
  const ProblemSpec q = quadratic_problem();
  REQUIRE(q.default_params.size() == 5);
  REQUIRE(q.default_starts.size() == 2);
  CHECK(q.default_starts[0].first == v2(-5, 30));
  CHECK(q.default_starts[1].first == v2(5, -30));
  const double qrows[5][3] = {{3, 0, 0}, {3.1, 1, 0}, {3.1, 0, 0.5}, {3.1, 1, 1}, {3.1, -1, 1}};
  for (int i = 0; i < 5; ++i) {
    CHECK(q.default_params[i].alpha == qrows[i][0]);
    CHECK(q.default_params[i].beta == qrows[i][1]);
    CHECK(q.default_params[i].gamma == qrows[i][2]);
    CHECK(q.default_params[i].t0 == 1.0);
    CHECK(q.default_params[i].u0 == v2(-5, 30));
  }
  const ProblemSpec r = quartic_problem();
  REQUIRE(r.default_params.size() == 5);
  CHECK(r.default_starts[0].first == v2(-1, 5));
  CHECK(r.default_starts[1].first == v2(2, -2));
  const double rrows[5][3] = {{3.1, 0, 0}, {3.1, 2, 0}, {3.1, 0, 1}, {3.1, 0.5, 0.5}, {3.1, -0.5, 1}};
  for (int i = 0; i < 5; ++i) {
    CHECK(r.default_params[i].alpha == rrows[i][0]);
    CHECK(r.default_params[i].beta == rrows[i][1]);
    CHECK(r.default_params[i].gamma == rrows[i][2]);
  }
  const SystemParams moved = with_start(q.default_params[2], q.default_starts[1]);
  CHECK(moved.u0 == v2(5, -30));
  CHECK(moved.v0 == v2(5, -30));
  CHECK(moved.gamma == 0.5);
}

TEST_CASE("periodic problem") {
  CHECK_THROWS_AS(periodic_problem(1.0, 0.0), Error);
  CHECK_THROWS_AS(periodic_problem(1.0, 0.5), Error);
  CHECK_THROWS_AS(periodic_problem(0.0, -1.0), Error);
  const ProblemSpec p = periodic_problem(4.0, -1.0);
  CHECK(p.exact_solution(0.3) == doctest::Approx(std::sin(0.6)));
  CHECK(p.objective.lipschitz == 4.0);
  REQUIRE(p.reduced_dynamics);
  CHECK((*p.reduced_dynamics)(1.0, Vector::Constant(1, 0.5), Vector::Zero(1))[0] == -2.0);
  const SystemParams& row = p.default_params.front();
  CHECK(row.t0 == kPeriodicStart);
  CHECK(row.gamma == 0.0);
  CHECK(row.u0[0] == doctest::Approx(std::sin(2 * kPeriodicStart)));
  CHECK(row.v0[0] == doctest::Approx(2 * std::cos(2 * kPeriodicStart)));
}

TEST_CASE("registry lookup") {
  CHECK(problem_ids().size() == 3);
  for (const std::string& id : problem_ids()) CHECK(find_problem(id).id == id);
  try {
    find_problem("rosenbrock");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidConfig);
  }
  CHECK(find_problem("periodic", 9.0, -1.0).exact_solution(1.0) == doctest::Approx(std::sin(3.0)));
}

TEST_CASE("simulate enforces the declared domain") {
  const ProblemSpec quart = quartic_problem();
  IntegratorConfig cfg;
  cfg.t_end = 5.0;
  SystemParams p = quart.default_params[0];
  p.u0 = v2(20, 0);
  try {
    simulate(quart, p, cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::OutsideDomain);
  }
  CHECK_NOTHROW(simulate(quart, quart.default_params[0], cfg));
}

TEST_CASE("lasso toy") {
  const LassoToy a = lasso_toy(42);
  const LassoToy b = lasso_toy(42);
  const LassoToy c = lasso_toy(7);
  CHECK(a.design == b.design);
  CHECK(a.target == b.target);
  CHECK(a.design != c.design);
  CHECK(a.design.rows() == 20);
  CHECK(a.design.cols() == 5);
  CHECK(a.weight == 0.1);
  CHECK(oracle::sampled_lipschitz(a.smooth.grad, 5, 5, 2000, 4) <= a.smooth.lipschitz * (1 + 1e-9));
  CHECK_FALSE(a.smooth.has_minimizer());

  ::unsetenv("INERTIAL_FLOW_SEED");
  CHECK(lasso_seed_from_env() == 42);
  ::setenv("INERTIAL_FLOW_SEED", "1234", 1);
  CHECK(lasso_seed_from_env() == 1234);
  ::setenv("INERTIAL_FLOW_SEED", "abc", 1);
  CHECK_THROWS_AS(lasso_seed_from_env(), Error);
  ::unsetenv("INERTIAL_FLOW_SEED");
}
