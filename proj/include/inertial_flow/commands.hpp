#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "inertial_flow/core.hpp"
#include "inertial_flow/ode.hpp"

namespace inertial_flow {

/// Everything a subcommand needs. Unset optionals fall back to problem defaults.
struct RunConfig {
  std::string command;
  std::string problem_id;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> gamma;
  std::optional<double> t0;
  std::optional<double> t_end;
  std::optional<Vector> u0;
  std::optional<Vector> v0;
  IntegratorConfig integrator;

  // discrete
  std::optional<double> step;
  long n_max = 1000;
  std::string variant = "inertial";
  std::string prox_f = "l1";
  double lambda = 0.1;
  double weight = 0.1;
  double box_radius = 1.0;
  double tol = 0.0;
  bool compare = false;

  // experiment
  std::string figure = "fig1";
  int start = 1;

  std::set<std::string> formats;
  std::filesystem::path out_dir = "out";
};

/// Each command validates the whole configuration before creating out_dir and
/// returns the files it wrote. Errors are thrown as inertial_flow::Error;
/// warnings go to `log`.
std::vector<std::filesystem::path> cmd_simulate(const RunConfig& cfg, std::ostream& log);
std::vector<std::filesystem::path> cmd_experiment(const RunConfig& cfg, std::ostream& log);
std::vector<std::filesystem::path> cmd_discrete(const RunConfig& cfg, std::ostream& log);
std::vector<std::filesystem::path> cmd_check(const RunConfig& cfg, std::ostream& log);

/// Plain-text diagnostics report for one configuration of a minimizer-bearing problem.
std::string check_report(const RunConfig& cfg);

/// Parses the arguments (without the program name) into a RunConfig.
/// Throws Errc::InvalidConfig on bad usage.
RunConfig parse_args(const std::vector<std::string>& args);

/// Entry point. Exit codes: 0 success, 1 configuration error, 2 numerical failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace inertial_flow
