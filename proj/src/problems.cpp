#include "inertial_flow/problems.hpp"

#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

namespace inertial_flow {

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

SystemParams row(double alpha, double beta, double gamma, const std::pair<Vector, Vector>& start) {
  SystemParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  p.t0 = 1.0;
  p.u0 = start.first;
  p.v0 = start.second;
  return p;
}

}  // namespace

ProblemSpec quadratic_problem() {
  ProblemSpec spec;
  spec.id = "quadratic-fig1";
  Objective& obj = spec.objective;
  obj.dim = 2;
  // 2(x-1)^2 + 5(y+1)^2: the expanded form loses the gap to cancellation near x*.
  obj.eval = [](const Vector& x) {
    const double dx = x[0] - 1.0;
    const double dy = x[1] + 1.0;
    return 2.0 * dx * dx + 5.0 * dy * dy;
  };
  obj.grad = [](const Vector& x) { return vec2(4.0 * (x[0] - 1.0), 10.0 * (x[1] + 1.0)); };
  obj.lipschitz = 10.0;
  obj.minimizer = vec2(1.0, -1.0);
  obj.min_value = 0.0;

  spec.default_starts = {{vec2(-5.0, 30.0), vec2(-5.0, 30.0)}, {vec2(5.0, -30.0), vec2(5.0, -30.0)}};
  const auto& s = spec.default_starts.front();
  spec.default_params = {row(3.0, 0.0, 0.0, s), row(3.1, 1.0, 0.0, s), row(3.1, 0.0, 0.5, s),
                         row(3.1, 1.0, 1.0, s), row(3.1, -1.0, 1.0, s)};
  return spec;
}

ProblemSpec quartic_problem() {
  ProblemSpec spec;
  spec.id = "quartic-fig2";
  Objective& obj = spec.objective;
  obj.dim = 2;
  // x^4 - 4x + 3 = (x-1)^2 (x^2 + 2x + 3), plus 5(y-1)^2
  obj.eval = [](const Vector& x) {
    const double dx = x[0] - 1.0;
    const double dy = x[1] - 1.0;
    return dx * dx * (x[0] * x[0] + 2.0 * x[0] + 3.0) + 5.0 * dy * dy;
  };
  obj.grad = [](const Vector& x) {
    return vec2(4.0 * x[0] * x[0] * x[0] - 4.0, 10.0 * x[1] - 10.0);
  };
  // sup of |Hessian| = max(12 x^2, 10) over the declared box
  constexpr double kHalfWidth = 10.0;
  obj.lipschitz = 12.0 * kHalfWidth * kHalfWidth;
  obj.minimizer = vec2(1.0, 1.0);
  obj.min_value = 0.0;
  spec.domain = Box{vec2(-kHalfWidth, -kHalfWidth), vec2(kHalfWidth, kHalfWidth)};

  spec.default_starts = {{vec2(-1.0, 5.0), vec2(-1.0, 5.0)}, {vec2(2.0, -2.0), vec2(2.0, -2.0)}};
  const auto& s = spec.default_starts.front();
  spec.default_params = {row(3.1, 0.0, 0.0, s), row(3.1, 2.0, 0.0, s), row(3.1, 0.0, 1.0, s),
                         row(3.1, 0.5, 0.5, s), row(3.1, -0.5, 1.0, s)};
  return spec;
}

ProblemSpec periodic_problem(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta < 0.0)) {
    std::ostringstream msg;
    msg << "periodic problem needs alpha > 0 and beta < 0 (got alpha=" << alpha
        << ", beta=" << beta << ")";
    throw Error(Errc::InvalidConfig, msg.str());
  }
  const double omega2 = alpha / -beta;
  const double omega = std::sqrt(omega2);

  ProblemSpec spec;
  spec.id = "periodic";
  Objective& obj = spec.objective;
  obj.dim = 1;
  obj.eval = [omega2](const Vector& x) { return 0.5 * omega2 * x[0] * x[0]; };
  obj.grad = [omega2](const Vector& x) { return (omega2 * x).eval(); };
  obj.lipschitz = omega2;
  obj.minimizer = Vector::Zero(1);
  obj.min_value = 0.0;

  // With gamma = 0 the damping term cancels against the beta/t part of the
  // gradient argument, leaving x'' + (alpha/-beta) x = 0.
  spec.reduced_dynamics = [omega2](double, const Vector& x, const Vector&) {
    return (-omega2 * x).eval();
  };
  spec.exact_solution = [omega](double t) { return std::sin(omega * t); };

  const double t0 = kPeriodicStart;
  Vector u0(1);
  Vector v0(1);
  u0 << std::sin(omega * t0);
  v0 << omega * std::cos(omega * t0);
  spec.default_starts = {{u0, v0}};
  SystemParams p = row(alpha, beta, 0.0, spec.default_starts.front());
  p.t0 = t0;
  spec.default_params = {p};
  return spec;
}

std::vector<std::string> problem_ids() { return {"quadratic-fig1", "quartic-fig2", "periodic"}; }

ProblemSpec find_problem(const std::string& id, double periodic_alpha, double periodic_beta) {
  if (id == "quadratic-fig1") return quadratic_problem();
  if (id == "quartic-fig2") return quartic_problem();
  if (id == "periodic") return periodic_problem(periodic_alpha, periodic_beta);
  throw Error(Errc::InvalidConfig, "unknown problem id '" + id + "'");
}

SystemParams with_start(SystemParams params, const std::pair<Vector, Vector>& start) {
  params.u0 = start.first;
  params.v0 = start.second;
  return params;
}

Trajectory simulate(const ProblemSpec& problem, const SystemParams& params,
                    const IntegratorConfig& cfg) {
  Trajectory traj = problem.reduced_dynamics
                        ? integrate_second_order(params, *problem.reduced_dynamics, cfg)
                        : integrate(params, problem.objective, cfg);
  if (problem.domain) {
    for (const SystemState& s : traj.samples()) {
      if (!problem.domain->contains(s.x)) {
        std::ostringstream msg;
        msg << problem.id << ": trajectory left the declared domain at t=" << s.t;
        throw Error(Errc::OutsideDomain, msg.str(), s.t);
      }
    }
  }
  return traj;
}

LassoToy lasso_toy(unsigned long long seed, double weight) {
  constexpr int kRows = 20;
  constexpr int kCols = 5;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  LassoToy toy;
  toy.weight = weight;
  toy.design.resize(kRows, kCols);
  for (int i = 0; i < kRows; ++i) {
    for (int j = 0; j < kCols; ++j) toy.design(i, j) = normal(rng) / std::sqrt(double(kRows));
  }
  Vector x_true(kCols);
  x_true << 1.0, 0.0, -0.5, 0.0, 0.0;
  toy.target = toy.design * x_true;
  for (int i = 0; i < kRows; ++i) toy.target[i] += 0.1 * normal(rng);

  const Eigen::MatrixXd gram = toy.design.transpose() * toy.design;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);

  Objective& obj = toy.smooth;
  obj.dim = kCols;
  obj.lipschitz = eig.eigenvalues().maxCoeff();
  obj.eval = [a = toy.design, b = toy.target](const Vector& x) {
    return 0.5 * (a * x - b).squaredNorm();
  };
  obj.grad = [a = toy.design, b = toy.target](const Vector& x) {
    return (a.transpose() * (a * x - b)).eval();
  };
  return toy;
}

unsigned long long lasso_seed_from_env() {
  if (const char* env = std::getenv("INERTIAL_FLOW_SEED")) {
    char* end = nullptr;
    const unsigned long long seed = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return seed;
    throw Error(Errc::InvalidConfig, std::string("INERTIAL_FLOW_SEED is not an integer: ") + env);
  }
  return 42;
}

}  // namespace inertial_flow
