#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "inertial_flow/core.hpp"
#include "inertial_flow/discrete.hpp"
#include "inertial_flow/ode.hpp"

namespace inertial_flow {

/// 17 significant digits ("%.17g"), "nan"/"inf" for non-finite values.
std::string format_number(double value);

/// `t,x0,...,x{m-1},v0,...,v{m-1},gap_plain,gap_shifted,speed,grad_shifted_norm,energy`
std::string trajectory_csv_header(std::size_t dim);

/// One row per trajectory sample. Gap columns are nan without minimizer data;
/// energy uses the rate scheme and is nan where its coefficient is undefined.
std::string trajectory_csv(const Trajectory& traj, const Objective& obj);

/// `n,x0,...,x{m-1},objective,gap,grad_norm_z`. The objective column includes
/// f when a proximal operator is given. `min_value` fills the gap column.
std::string iterate_csv(const IterateHistory& history, const Objective& obj,
                        const ProxOperator* prox, std::optional<double> min_value);

struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotPanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

/// Standalone SVG with the panels side by side and log10 y axes. Points with
/// y <= 0 or non-finite y are dropped.
std::string render_svg(const std::string& title, const std::vector<PlotPanel>& panels);

/// Energy error |g(x) - g*| and iterate error |x - x*| panels for a set of trajectories.
std::vector<PlotPanel> error_panels(const std::vector<const Trajectory*>& trajs,
                                    const std::vector<std::string>& labels,
                                    const Objective& obj);

/// Series colors in the order used by the parameter tables.
const std::vector<std::string>& palette();

void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace inertial_flow
