#include "inertial_flow/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "inertial_flow/analysis.hpp"
#include "inertial_flow/discrete.hpp"
#include "inertial_flow/energy.hpp"
#include "inertial_flow/output.hpp"
#include "inertial_flow/problems.hpp"

namespace inertial_flow {

namespace fs = std::filesystem;

namespace {

constexpr double kSlopeLimit = -1.7;
constexpr double kTailFraction = 0.05;
constexpr double kThirdDerivativeSlack = 1.1;
constexpr double kMonotoneSlack = 1e-6;
constexpr double kLimitTol = 1e-2;

struct Continuous {
  ProblemSpec problem;
  SystemParams params;
  IntegratorConfig integrator;
};

void check_formats(const RunConfig& cfg) {
  for (const std::string& f : cfg.formats) {
    if (f != "csv" && f != "svg" && f != "report") {
      throw Error(Errc::InvalidConfig, "unknown format '" + f + "' (expected csv, svg or report)");
    }
  }
}

bool wants(const RunConfig& cfg, const char* format) { return cfg.formats.count(format) > 0; }

void check_dim(const Vector& v, int dim, const char* flag) {
  if (v.size() != dim) {
    throw Error(Errc::InvalidConfig, fmt::format("{} has {} components, the problem has dimension {}",
                                                 flag, v.size(), dim));
  }
}

Continuous resolve_continuous(const RunConfig& cfg) {
  if (cfg.problem_id.empty()) throw Error(Errc::InvalidConfig, "missing --problem");
  Continuous out;
  const bool periodic = cfg.problem_id == "periodic";
  if (periodic) {
    if (cfg.gamma && *cfg.gamma != 0.0) {
      throw Error(Errc::InvalidConfig, "the periodic problem requires gamma = 0");
    }
    out.problem = periodic_problem(cfg.alpha.value_or(1.0), cfg.beta.value_or(-1.0));
    out.params = out.problem.default_params.front();
    if (cfg.t0) {
      const double omega = std::sqrt(out.params.alpha / -out.params.beta);
      out.params.t0 = *cfg.t0;
      out.params.u0 = Vector::Constant(1, std::sin(omega * *cfg.t0));
      out.params.v0 = Vector::Constant(1, omega * std::cos(omega * *cfg.t0));
    }
  } else {
    out.problem = find_problem(cfg.problem_id);
    if (cfg.start < 1 || cfg.start > static_cast<int>(out.problem.default_starts.size())) {
      throw Error(Errc::InvalidConfig, fmt::format("--start must be 1..{}",
                                                   out.problem.default_starts.size()));
    }
    out.params = with_start(out.problem.default_params.front(),
                            out.problem.default_starts[cfg.start - 1]);
    if (cfg.alpha) out.params.alpha = *cfg.alpha;
    if (cfg.beta) out.params.beta = *cfg.beta;
    if (cfg.gamma) out.params.gamma = *cfg.gamma;
    if (cfg.t0) out.params.t0 = *cfg.t0;
  }
  if (cfg.u0) {
    out.params.u0 = *cfg.u0;
    if (!cfg.v0) out.params.v0 = Vector::Zero(cfg.u0->size());
  }
  if (cfg.v0) out.params.v0 = *cfg.v0;
  check_dim(out.params.u0, out.problem.objective.dim, "--u0");
  check_dim(out.params.v0, out.problem.objective.dim, "--v0");
  validate_params(out.params);

  out.integrator = cfg.integrator;
  out.integrator.t_end = cfg.t_end.value_or(periodic ? 20.0 : 100.0);
  out.integrator.validate(out.params.t0);
  return out;
}

std::string params_label(const SystemParams& p) {
  return fmt::format("alpha={} beta={} gamma={}", p.alpha, p.beta, p.gamma);
}

std::string verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string vector_text(const Vector& v) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt::format("{:.10g}", v[i]);
  }
  return out + ")";
}

void append_conditions(std::string& out, const EnergyScheme& scheme, const SystemParams& params,
                       double lo, double hi) {
  constexpr int kGrid = 200;
  std::array<double, 6> rmin;
  std::array<double, 6> rmax;
  rmin.fill(std::numeric_limits<double>::infinity());
  rmax.fill(-std::numeric_limits<double>::infinity());
  int evaluated = 0;
  int failing = 0;
  for (int i = 0; i <= kGrid; ++i) {
    const double t = lo * std::pow(hi / lo, static_cast<double>(i) / kGrid);
    const ConditionReport rep = check_conditions(scheme, t, params);
    if (!rep.evaluable) continue;
    ++evaluated;
    if (!rep.all_hold()) ++failing;
    for (int k = 0; k < 6; ++k) {
      rmin[k] = std::min(rmin[k], rep.residual[k]);
      rmax[k] = std::max(rmax[k], rep.residual[k]);
    }
  }
  out += fmt::format("  conditions on [{:.6g}, {:.6g}]: {} grid points, {} failing\n", lo, hi,
                     evaluated, failing);
  if (evaluated == 0) return;
  for (int k = 0; k < 6; ++k) {
    out += fmt::format("    c{} {} residual in [{:.6e}, {:.6e}]\n", k + 1,
                       ConditionReport::kIsEquality[k] ? "==0" : "<=0", rmin[k], rmax[k]);
  }
}

std::string build_report(const Continuous& run, const Trajectory& traj) {
  const SystemParams& params = run.params;
  const Objective& obj = run.problem.objective;
  obj.require_minimizer("check");
  const double t_end = traj.t_end();
  bool overall = true;

  std::string out;
  out += fmt::format("problem    {}\n", run.problem.id);
  out += fmt::format("params     alpha={} beta={} gamma={} t0={} t_end={}\n", params.alpha,
                     params.beta, params.gamma, params.t0, t_end);
  out += fmt::format("start      u0={} v0={}\n", vector_text(params.u0), vector_text(params.v0));
  out += fmt::format("integrator rtol={} atol={} steps={}\n", run.integrator.rtol,
                     run.integrator.atol, traj.steps());
  out += fmt::format("regime     {}\n", to_string(validate_params(params)));

  std::optional<EnergyScheme> rate_valid;
  out += "\n[energy schemes]\n";
  for (int which = 0; which < 2; ++which) {
    const char* name = which == 0 ? "RateScheme" : "ConvergenceScheme";
    EnergyScheme scheme;
    try {
      scheme = which == 0 ? rate_scheme(params) : convergence_scheme(params);
    } catch (const Error& e) {
      out += fmt::format("{}: not applicable ({})\n", name, e.what());
      continue;
    }
    const double scan_lo =
        std::max(params.t0, std::isfinite(scheme.singular_root) ? scheme.singular_root * 1.001 + 1e-6
                                                                : params.t0);
    try {
      const EnergyScheme valid = with_valid_from(scheme, params, t_end);
      out += fmt::format("{}: valid_from = {:.6g}\n", name, *valid.valid_from);
      append_conditions(out, valid, params, std::min(*valid.valid_from, t_end), t_end);
      if (which == 0) rate_valid = valid;
    } catch (const Error& e) {
      if (e.code() != Errc::NoValidThreshold) throw;
      out += fmt::format("{}: NoValidThreshold\n", name);
      if (scan_lo < t_end) append_conditions(out, scheme, params, scan_lo, t_end);
    }
  }

  out += "\n[energy monotonicity]\n";
  if (rate_valid && *rate_valid->valid_from < t_end) {
    const MonotonicityReport mono =
        energy_monotonicity(traj, *rate_valid, obj, *rate_valid->valid_from, kMonotoneSlack);
    out += fmt::format(
        "RateScheme E(t) nonincreasing on [{:.6g}, {:.6g}] (relative slack {}): {}\n"
        "  worst relative increase {:.3e} at t={:.6g}, samples {}\n",
        *rate_valid->valid_from, t_end, kMonotoneSlack, verdict(mono.nonincreasing),
        mono.worst_relative_increase, mono.worst_t, mono.samples);
    overall = overall && mono.nonincreasing;
  } else {
    out += "skipped: RateScheme has no valid threshold inside the span\n";
    overall = false;
  }

  out += "\n[rates]\n";
  const double w_lo = t_end > 10.0 && params.t0 < 10.0 ? 10.0
                                                       : params.t0 + 0.1 * (t_end - params.t0);
  const Window window{w_lo, t_end};
  if (!(window.lo < window.hi)) {
    out += "skipped: empty span\n";
    overall = false;
  } else {
    for (ErrorKind kind : {ErrorKind::ShiftedGap, ErrorKind::PlainGap}) {
      const RateReport r = rate_envelope(traj, obj, kind, 2.0, window);
      const bool ok = r.fitted_slope <= kSlopeLimit;
      out += fmt::format(
          "{}: sup t^2 err = {:.6g} at t={:.6g}, log-log slope {:.4f} on [{:.6g}, {:.6g}] "
          "(<= {}): {}\n",
          to_string(kind), r.envelope_sup, r.argsup, r.fitted_slope, window.lo, window.hi,
          kSlopeLimit, verdict(ok));
      overall = overall && ok;
    }
    const double s_lo = rate_valid ? std::clamp(*rate_valid->valid_from, traj.t_begin(), w_lo)
                                   : traj.t_begin();
    const RateReport speed = rate_envelope(traj, obj, ErrorKind::Speed, 1.0, {s_lo, t_end});
    const bool ok = std::isfinite(speed.envelope_sup);
    out += fmt::format("speed: sup t |x'| = {:.6g} at t={:.6g} on [{:.6g}, {:.6g}]: {}\n",
                       speed.envelope_sup, speed.argsup, s_lo, t_end, verdict(ok));
    overall = overall && ok;
  }

  out += "\n[integrals]\n";
  const Accumulators acc = integral_accumulators(traj, params, obj);
  const auto tail_line = [&](const char* name, double tail, double total) {
    const double frac = total > 0.0 ? tail / total : 0.0;
    const bool ok = frac <= kTailFraction;
    overall = overall && ok;
    return fmt::format("{}: total {:.6g}, tail on [{:.6g}, {:.6g}] {:.6g} ({:.3f}% <= {}%): {}\n",
                       name, total, acc.tail_start, t_end, tail, 100.0 * frac,
                       100.0 * kTailFraction, verdict(ok));
  };
  out += tail_line("int t gap_shifted", acc.value_tail, acc.value_total());
  out += tail_line(acc.gradient_weight_power == 2.0 ? "int t^2 |grad|^2" : "int t |grad|^2",
                   acc.gradient_tail, acc.gradient_total());
  out += tail_line("int t |x'|^2", acc.speed_tail, acc.speed_total());

  out += "\n[third derivative]\n";
  const ThirdDerivativeReport third = third_derivative_check(traj, params, obj);
  const bool third_ok = third.max_ratio <= kThirdDerivativeSlack;
  overall = overall && third_ok;
  out += fmt::format("K = {:.6g}, max |x'''| / (K (|x'| + |x''|)) = {:.6f} at t={:.6g} "
                     "({} samples, {} skipped) (<= {}): {}\n",
                     third.constant, third.max_ratio, third.argmax, third.evaluated, third.skipped,
                     kThirdDerivativeSlack, verdict(third_ok));

  out += "\n[limit point]\n";
  const LimitPoint lp = limit_point(traj, obj, kLimitTol);
  overall = overall && lp.converged;
  out += fmt::format(
      "estimate {} , distance to minimizer {:.6g}, gradient residual {:.6g}\n"
      "tail deviation over last 10% {:.6g} (<= {}): convergence {}\n",
      vector_text(lp.estimate), (lp.estimate - *obj.minimizer).norm(), lp.residual,
      lp.tail_deviation, kLimitTol, verdict(lp.converged));

  out += fmt::format("\noverall {}\n", verdict(overall));
  return out;
}

fs::path write_output(const RunConfig& cfg, const std::string& name, const std::string& content,
                      std::vector<fs::path>& written) {
  const fs::path path = cfg.out_dir / name;
  write_file(path, content);
  written.push_back(path);
  return path;
}

void make_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) {
    throw Error(Errc::InvalidConfig,
                "cannot create output directory " + cfg.out_dir.string() + ": " + ec.message());
  }
}

Vector to_vector(const std::vector<double>& values) {
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

std::vector<fs::path> cmd_simulate(const RunConfig& cfg, std::ostream&) {
  RunConfig effective = cfg;
  if (effective.formats.empty()) effective.formats = {"csv"};
  effective.formats.insert("csv");
  check_formats(effective);
  const Continuous run = resolve_continuous(effective);

  const Trajectory traj = simulate(run.problem, run.params, run.integrator);
  std::vector<fs::path> written;
  make_out_dir(effective);
  const std::string stem = "simulate_" + run.problem.id;
  write_output(effective, stem + ".csv", trajectory_csv(traj, run.problem.objective), written);
  if (wants(effective, "svg")) {
    const std::string svg =
        render_svg(run.problem.id + ", " + params_label(run.params),
                   error_panels({&traj}, {params_label(run.params)}, run.problem.objective));
    write_output(effective, stem + ".svg", svg, written);
  }
  if (wants(effective, "report")) {
    write_output(effective, stem + ".txt", build_report(run, traj), written);
  }
  return written;
}

std::vector<fs::path> cmd_experiment(const RunConfig& cfg, std::ostream&) {
  RunConfig effective = cfg;
  if (effective.formats.empty()) effective.formats = {"csv", "svg"};
  check_formats(effective);
  if (effective.figure != "fig1" && effective.figure != "fig2") {
    throw Error(Errc::InvalidConfig, "--figure must be fig1 or fig2");
  }
  const ProblemSpec problem =
      effective.figure == "fig1" ? quadratic_problem() : quartic_problem();
  if (effective.start < 1 || effective.start > static_cast<int>(problem.default_starts.size())) {
    throw Error(Errc::InvalidConfig, "--start must be 1 or 2");
  }
  IntegratorConfig integ = effective.integrator;
  integ.t_end = effective.t_end.value_or(100.0);

  std::vector<SystemParams> rows;
  for (const SystemParams& row : problem.default_params) {
    rows.push_back(with_start(row, problem.default_starts[effective.start - 1]));
    validate_params(rows.back());
    integ.validate(rows.back().t0);
  }

  std::vector<Trajectory> trajs;
  trajs.reserve(rows.size());
  for (const SystemParams& row : rows) trajs.push_back(simulate(problem, row, integ));

  std::vector<fs::path> written;
  make_out_dir(effective);
  const std::string stem = fmt::format("{}_start{}", effective.figure, effective.start);
  if (wants(effective, "csv")) {
    for (std::size_t k = 0; k < trajs.size(); ++k) {
      write_output(effective, fmt::format("{}_row{}.csv", stem, k + 1),
                   trajectory_csv(trajs[k], problem.objective), written);
    }
  }
  if (wants(effective, "svg")) {
    std::vector<const Trajectory*> ptrs;
    std::vector<std::string> labels;
    for (const Trajectory& t : trajs) {
      ptrs.push_back(&t);
      labels.push_back(params_label(t.params()));
    }
    const Vector& u0 = problem.default_starts[effective.start - 1].first;
    const std::string title =
        fmt::format("{}, u0 = v0 = {}", problem.id, vector_text(u0));
    write_output(effective, stem + ".svg",
                 render_svg(title, error_panels(ptrs, labels, problem.objective)), written);
  }
  if (wants(effective, "report")) {
    std::string text;
    for (std::size_t k = 0; k < trajs.size(); ++k) {
      text += fmt::format("==== row {} ====\n", k + 1);
      text += build_report({problem, rows[k], integ}, trajs[k]);
      text += "\n";
    }
    write_output(effective, stem + ".txt", text, written);
  }
  return written;
}

std::vector<fs::path> cmd_discrete(const RunConfig& cfg, std::ostream& log) {
  RunConfig effective = cfg;
  if (effective.formats.empty()) effective.formats = {"csv"};
  effective.formats.insert("csv");
  check_formats(effective);
  if (effective.problem_id.empty()) throw Error(Errc::InvalidConfig, "missing --problem");
  if (effective.variant != "inertial" && effective.variant != "prox") {
    throw Error(Errc::InvalidConfig, "--variant must be inertial or prox");
  }
  const bool prox_variant = effective.variant == "prox";

  Objective obj;
  if (effective.problem_id == "lasso-toy") {
    obj = lasso_toy(lasso_seed_from_env(), effective.weight).smooth;
  } else {
    obj = find_problem(effective.problem_id, effective.alpha.value_or(1.0),
                       effective.beta.value_or(-1.0))
              .objective;
  }

  AlgoParams p;
  p.alpha = effective.alpha.value_or(3.0);
  p.beta = effective.beta.value_or(0.0);
  p.gamma = effective.gamma.value_or(prox_variant ? 0.5 : 1.0);
  p.n_max = effective.n_max;
  const Vector u0 = effective.u0.value_or(Vector::Zero(obj.dim));
  check_dim(u0, obj.dim, "--u0");
  if (effective.v0) check_dim(*effective.v0, obj.dim, "--v0");

  std::optional<ProxOperator> prox;
  if (prox_variant) {
    if (!(effective.lambda > 0.0)) throw Error(Errc::InvalidConfig, "--lambda must be positive");
    if (effective.prox_f == "l1") {
      if (!(effective.weight >= 0.0)) {
        throw Error(Errc::InvalidConfig, "--weight must be nonnegative");
      }
      prox = soft_threshold(effective.lambda, effective.weight);
    } else if (effective.prox_f == "box") {
      if (!(effective.box_radius > 0.0)) {
        throw Error(Errc::InvalidConfig, "--box-radius must be positive");
      }
      prox = box_projection(effective.lambda, Vector::Constant(obj.dim, -effective.box_radius),
                            Vector::Constant(obj.dim, effective.box_radius));
    } else if (effective.prox_f == "none") {
      prox = identity_prox(effective.lambda);
    } else {
      throw Error(Errc::InvalidConfig, "--f must be l1, box or none");
    }
    p.s = effective.lambda;
    p.x_minus1 = u0;
    p.x0 = effective.v0.value_or(u0);
  } else {
    p.s = effective.step.value_or(default_step(obj));
    if (!(p.s > 0.0)) throw Error(Errc::InvalidConfig, "--step must be positive");
    p.x0 = u0;
    p.x_minus1 = u0 - std::sqrt(p.s) * effective.v0.value_or(Vector::Zero(obj.dim));
  }
  p.validate();
  if (effective.compare && (prox_variant || !obj.has_minimizer())) {
    throw Error(Errc::InvalidConfig,
                "--compare needs the inertial variant on a problem with a known minimizer");
  }
  if (!(effective.tol >= 0.0)) throw Error(Errc::InvalidConfig, "--tol must be nonnegative");

  const IterateHistory history = prox ? run_prox_inertial(p, obj, *prox, effective.tol)
                                      : run_inertial(p, obj, effective.tol);
  for (const std::string& w : history.warnings) log << "warning: " << w << "\n";

  std::optional<Trajectory> continuous;
  if (effective.compare) {
    const double h = std::sqrt(p.s);
    SystemParams sp;
    sp.alpha = p.alpha;
    sp.beta = p.beta;
    sp.gamma = p.gamma;
    sp.t0 = h;
    sp.u0 = p.x0;
    sp.v0 = (p.x0 - p.x_minus1) / h;
    validate_params(sp);
    IntegratorConfig integ = effective.integrator;
    integ.t_end = h * static_cast<double>(std::max<long>(history.records.back().n, 1));
    integ.h_max = std::min(integ.h_max, std::max(h, 1e-3));
    continuous = integrate(sp, obj, integ);
  }

  std::vector<fs::path> written;
  make_out_dir(effective);
  const std::string stem = fmt::format("discrete_{}_{}", effective.problem_id, effective.variant);
  std::optional<double> min_value;
  if (!prox || effective.prox_f == "none") min_value = obj.min_value;
  write_output(effective, stem + ".csv",
               iterate_csv(history, obj, prox ? &*prox : nullptr, min_value), written);

  if (wants(effective, "svg") || continuous) {
    std::vector<PlotPanel> panels;
    PlotPanel value{"objective", "n", "log10 value", {}};
    PlotPanel grad{"gradient norm at z_n", "n", "log10 norm", {}};
    PlotSeries vs{effective.variant, palette()[0], {}, {}};
    PlotSeries gs{effective.variant, palette()[0], {}, {}};
    for (const IterateRecord& r : history.records) {
      const double v = r.value - min_value.value_or(0.0);
      vs.x.push_back(static_cast<double>(r.n));
      vs.y.push_back(v);
      gs.x.push_back(static_cast<double>(r.n));
      gs.y.push_back(obj.grad(r.z).norm());
    }
    if (min_value) value.title = "objective gap";
    value.series.push_back(std::move(vs));
    grad.series.push_back(std::move(gs));
    if (continuous) {
      // Overlay on the time axis t_n = n sqrt(s).
      const double h = std::sqrt(p.s);
      value.x_label = "t = n sqrt(s)";
      grad.title = "iterate error |x - x*|";
      grad.x_label = value.x_label;
      grad.series.clear();
      PlotSeries di{"discrete", palette()[0], {}, {}};
      for (const IterateRecord& r : history.records) {
        di.x.push_back(h * static_cast<double>(r.n));
        di.y.push_back((r.x - *obj.minimizer).norm());
      }
      value.series.front().x = di.x;
      PlotSeries cv{"continuous", palette()[1], {}, {}};
      PlotSeries ci{"continuous", palette()[1], {}, {}};
      for (const SystemState& s : continuous->samples()) {
        cv.x.push_back(s.t);
        cv.y.push_back(obj.eval(s.x) - *obj.min_value);
        ci.x.push_back(s.t);
        ci.y.push_back((s.x - *obj.minimizer).norm());
      }
      value.series.front().label = "discrete";
      value.series.push_back(std::move(cv));
      grad.series.push_back(std::move(di));
      grad.series.push_back(std::move(ci));
    }
    panels.push_back(std::move(value));
    panels.push_back(std::move(grad));
    const std::string title = fmt::format("{} ({} variant), alpha={} beta={} gamma={} s={}",
                                          effective.problem_id, effective.variant, p.alpha, p.beta,
                                          p.gamma, p.s);
    write_output(effective, stem + ".svg", render_svg(title, panels), written);
  }
  if (wants(effective, "report")) {
    const IterateRecord& last = history.records.back();
    std::string text = fmt::format("problem {}\nvariant {}\nalpha={} beta={} gamma={} s={}\n",
                                   effective.problem_id, effective.variant, p.alpha, p.beta,
                                   p.gamma, p.s);
    text += fmt::format("iterations {}\nstop {}\nfinal x {}\nfinal value {:.17g}\n", last.n,
                        to_string(history.stop), vector_text(last.x), last.value);
    for (const std::string& w : history.warnings) text += "warning: " + w + "\n";
    write_output(effective, stem + ".txt", text, written);
  }
  return written;
}

std::string check_report(const RunConfig& cfg) {
  const Continuous run = resolve_continuous(cfg);
  run.problem.objective.require_minimizer("check");
  const Trajectory traj = simulate(run.problem, run.params, run.integrator);
  return build_report(run, traj);
}

std::vector<fs::path> cmd_check(const RunConfig& cfg, std::ostream&) {
  RunConfig effective = cfg;
  if (effective.formats.empty()) effective.formats = {"report"};
  check_formats(effective);
  const Continuous run = resolve_continuous(effective);
  const Trajectory traj = simulate(run.problem, run.params, run.integrator);
  const std::string report = build_report(run, traj);

  std::vector<fs::path> written;
  make_out_dir(effective);
  const std::string stem = "check_" + run.problem.id;
  write_output(effective, stem + ".txt", report, written);
  if (wants(effective, "csv")) {
    write_output(effective, stem + ".csv", trajectory_csv(traj, run.problem.objective), written);
  }
  if (wants(effective, "svg")) {
    write_output(effective, stem + ".svg",
                 render_svg(run.problem.id + ", " + params_label(run.params),
                            error_panels({&traj}, {params_label(run.params)},
                                         run.problem.objective)),
                 written);
  }
  return written;
}

namespace {

struct Parser {
  CLI::App app{"Simulation and diagnostics of inertial dynamics with a perturbed gradient argument",
               "inertial_flow"};
  RunConfig cfg;
  std::optional<double> alpha, beta, gamma, t0, t_end, step;
  std::vector<double> u0, v0;
  std::vector<std::string> formats;
  std::string out_dir = "out";
  std::string config_path;

  Parser() {
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    auto* simulate = app.add_subcommand("simulate", "integrate one configuration");
    auto* experiment = app.add_subcommand("experiment", "run all parameter rows of a figure");
    auto* discrete = app.add_subcommand("discrete", "run the inertial iteration");
    auto* check = app.add_subcommand("check", "write a diagnostics report");

    for (CLI::App* sub : {simulate, experiment, discrete, check}) {
      sub->add_option("--config", config_path, "key=value file; command-line flags take precedence");
      sub->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
      sub->add_option("--format", formats, "csv, svg, report")
          ->delimiter(',')
          ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
      sub->add_option("--t-end", t_end, "final time");
      sub->add_option("--rtol", cfg.integrator.rtol)->capture_default_str();
      sub->add_option("--atol", cfg.integrator.atol)->capture_default_str();
    }
    for (CLI::App* sub : {simulate, discrete, check}) {
      sub->add_option("--problem", cfg.problem_id,
                      "quadratic-fig1, quartic-fig2, periodic (lasso-toy for discrete)");
      sub->add_option("--alpha", alpha);
      sub->add_option("--beta", beta);
      sub->add_option("--gamma", gamma);
      sub->add_option("--u0", u0, "comma-separated components")
          ->delimiter(',')
          ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
      sub->add_option("--v0", v0, "comma-separated components")
          ->delimiter(',')
          ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    }
    for (CLI::App* sub : {simulate, check}) {
      sub->add_option("--t0", t0, "initial time");
      sub->add_option("--start", cfg.start, "default start index of the problem")
          ->capture_default_str();
    }
    experiment->add_option("--figure", cfg.figure, "fig1 or fig2")->capture_default_str();
    experiment->add_option("--start", cfg.start, "1 or 2")->capture_default_str();

    discrete->add_option("--step", step, "step size s (default 1/L)");
    discrete->add_option("--n-max", cfg.n_max, "iteration budget")->capture_default_str();
    discrete->add_option("--variant", cfg.variant, "inertial or prox")->capture_default_str();
    discrete->add_option("--f", cfg.prox_f, "nonsmooth part: l1, box, none")
        ->capture_default_str();
    discrete->add_option("--lambda", cfg.lambda, "proximal step")->capture_default_str();
    discrete->add_option("--weight", cfg.weight, "l1 weight")->capture_default_str();
    discrete->add_option("--box-radius", cfg.box_radius, "half width of the box")
        ->capture_default_str();
    discrete->add_option("--tol", cfg.tol, "stopping tolerance (0: full budget)")
        ->capture_default_str();
    discrete->add_flag("--compare", cfg.compare, "overlay the continuous trajectory");
  }

  RunConfig finish() {
    for (CLI::App* sub : app.get_subcommands()) cfg.command = sub->get_name();
    cfg.alpha = alpha;
    cfg.beta = beta;
    cfg.gamma = gamma;
    cfg.t0 = t0;
    cfg.t_end = t_end;
    cfg.step = step;
    if (!u0.empty()) cfg.u0 = to_vector(u0);
    if (!v0.empty()) cfg.v0 = to_vector(v0);
    cfg.formats = {formats.begin(), formats.end()};
    cfg.out_dir = out_dir;
    return cfg;
  }

  void parse(const std::vector<std::string>& args) {
    const std::vector<std::string> expanded = expand_config(args);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  }

  // File entries go right after the subcommand so later command-line flags win.
  static std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) {
        path = args[++i];
      } else if (args[i].rfind("--config=", 0) == 0) {
        path = args[i].substr(9);
      } else {
        rest.push_back(args[i]);
      }
    }
    if (!path || rest.empty()) return args;

    std::vector<CLI::ConfigItem> items;
    try {
      items = CLI::ConfigINI().from_file(*path);
    } catch (const CLI::FileError& e) {
      throw Error(Errc::InvalidConfig, e.what());
    }
    std::vector<std::string> out{rest.front()};
    for (const CLI::ConfigItem& item : items) {
      if (item.name == "++" || item.name == "--") continue;
      std::string value;
      for (const std::string& in : item.inputs) value += (value.empty() ? "" : ",") + in;
      out.push_back("--" + item.name + "=" + value);
    }
    out.insert(out.end(), rest.begin() + 1, rest.end());
    return out;
  }
};

std::vector<fs::path> dispatch(const RunConfig& cfg, std::ostream& log) {
  if (cfg.command == "simulate") return cmd_simulate(cfg, log);
  if (cfg.command == "experiment") return cmd_experiment(cfg, log);
  if (cfg.command == "discrete") return cmd_discrete(cfg, log);
  if (cfg.command == "check") return cmd_check(cfg, log);
  throw Error(Errc::InvalidConfig, "unknown command '" + cfg.command + "'");
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
  Parser parser;
  try {
    parser.parse(args);
  } catch (const CLI::Error& e) {
    throw Error(Errc::InvalidConfig, e.what());
  }
  return parser.finish();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Parser parser;
  try {
    parser.parse(args);
  } catch (const CLI::ParseError& e) {
    return parser.app.exit(e, out, err) == 0 ? 0 : 1;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  }

  try {
    const RunConfig cfg = parser.finish();
    for (const fs::path& p : dispatch(cfg, err)) out << p.string() << "\n";
    return 0;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what();
    if (e.time()) err << fmt::format(" (t={:.17g})", *e.time());
    err << "\n";
    return is_config_error(e.code()) ? 1 : 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace inertial_flow
