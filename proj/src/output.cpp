#include "inertial_flow/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "inertial_flow/energy.hpp"

namespace inertial_flow {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", value);
}

std::string trajectory_csv_header(std::size_t dim) {
  std::string out = "t";
  for (std::size_t i = 0; i < dim; ++i) out += fmt::format(",x{}", i);
  for (std::size_t i = 0; i < dim; ++i) out += fmt::format(",v{}", i);
  out += ",gap_plain,gap_shifted,speed,grad_shifted_norm,energy\n";
  return out;
}

std::string trajectory_csv(const Trajectory& traj, const Objective& obj) {
  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
  const SystemParams& params = traj.params();
  const EnergyScheme scheme = rate_scheme(params);
  const bool has_min = obj.has_minimizer();

  std::string out = trajectory_csv_header(traj.dim());
  for (const SystemState& s : traj.samples()) {
    const Vector shifted = shifted_point(s, params);
    double gap_plain = kNan;
    double gap_shifted = kNan;
    double energy = kNan;
    if (has_min) {
      gap_plain = obj.eval(s.x) - *obj.min_value;
      gap_shifted = obj.eval(shifted) - *obj.min_value;
      try {
        energy = energy_value(scheme, s, params, obj);
      } catch (const Error& e) {
        if (e.code() != Errc::DenominatorSingular) throw;
      }
    }
    out += format_number(s.t);
    for (Eigen::Index i = 0; i < s.x.size(); ++i) out += "," + format_number(s.x[i]);
    for (Eigen::Index i = 0; i < s.v.size(); ++i) out += "," + format_number(s.v[i]);
    out += "," + format_number(gap_plain);
    out += "," + format_number(gap_shifted);
    out += "," + format_number(s.v.norm());
    out += "," + format_number(obj.grad(shifted).norm());
    out += "," + format_number(energy);
    out += "\n";
  }
  return out;
}

std::string iterate_csv(const IterateHistory& history, const Objective& obj,
                        const ProxOperator* prox, std::optional<double> min_value) {
  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
  std::string out = "n";
  const Eigen::Index dim = history.records.empty() ? 0 : history.records.front().x.size();
  for (Eigen::Index i = 0; i < dim; ++i) out += fmt::format(",x{}", i);
  out += ",objective,gap,grad_norm_z\n";
  for (const IterateRecord& rec : history.records) {
    const double objective = prox ? obj.eval(rec.x) + prox->value(rec.x) : obj.eval(rec.x);
    out += fmt::format("{}", rec.n);
    for (Eigen::Index i = 0; i < rec.x.size(); ++i) out += "," + format_number(rec.x[i]);
    out += "," + format_number(objective);
    out += "," + format_number(min_value ? objective - *min_value : kNan);
    out += "," + format_number(obj.grad(rec.z).norm());
    out += "\n";
  }
  return out;
}

const std::vector<std::string>& palette() {
  static const std::vector<std::string> colors{"#1f4fd1", "#d62728", "#e6b800", "#8e44ad",
                                               "#2ca02c", "#555555", "#ff7f0e"};
  return colors;
}

namespace {

struct Frame {
  double left;
  double top;
  double width;
  double height;
};

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_panel(const PlotPanel& panel, const Frame& f) {
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  double ly_min = x_min;
  double ly_max = -x_min;
  for (const PlotSeries& s : panel.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.y[i] > 0.0) || !std::isfinite(s.y[i]) || !std::isfinite(s.x[i])) continue;
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      ly_min = std::min(ly_min, std::log10(s.y[i]));
      ly_max = std::max(ly_max, std::log10(s.y[i]));
    }
  }
  if (!std::isfinite(x_min)) {
    x_min = 0.0;
    x_max = 1.0;
    ly_min = 0.0;
    ly_max = 1.0;
  }
  if (x_max <= x_min) x_max = x_min + 1.0;
  double y_lo = std::floor(ly_min);
  double y_hi = std::ceil(ly_max);
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;

  auto px = [&](double x) { return f.left + (x - x_min) / (x_max - x_min) * f.width; };
  auto py = [&](double ly) { return f.top + (y_hi - ly) / (y_hi - y_lo) * f.height; };

  std::string out;
  out += fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
      "stroke=\"#000\"/>\n",
      f.left, f.top, f.width, f.height);
  out += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
      f.left + f.width / 2, f.top - 10, escape(panel.title));

  const int decades = static_cast<int>(y_hi - y_lo);
  const int stride = std::max(1, decades / 8);
  for (int k = 0; k <= decades; k += stride) {
    const double ly = y_lo + k;
    const double y = py(ly);
    out += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n",
        f.left, y, f.left + f.width, y);
    out += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\" font-size=\"10\">1e{}</text>\n",
        f.left - 4, y + 3, static_cast<int>(ly));
  }
  for (int k = 0; k <= 5; ++k) {
    const double xv = x_min + (x_max - x_min) * k / 5.0;
    out += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" font-size=\"10\">{:.4g}</text>\n",
        px(xv), f.top + f.height + 14, xv);
  }
  out += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
      f.left + f.width / 2, f.top + f.height + 32, escape(panel.x_label));
  out += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" font-size=\"12\" "
      "transform=\"rotate(-90 {:.2f} {:.2f})\">{}</text>\n",
      f.left - 48, f.top + f.height / 2, f.left - 48, f.top + f.height / 2,
      escape(panel.y_label));

  for (std::size_t si = 0; si < panel.series.size(); ++si) {
    const PlotSeries& s = panel.series[si];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.y[i] > 0.0) || !std::isfinite(s.y[i]) || !std::isfinite(s.x[i])) continue;
      const double ly = std::max(std::log10(s.y[i]), y_lo);
      points += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(ly));
    }
    out += fmt::format(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" points=\"{}\"/>\n", s.color,
        points);
    const double ly = f.top + 14 + 14.0 * static_cast<double>(si);
    out += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
        "stroke-width=\"2\"/>\n",
        f.left + f.width - 150, ly, f.left + f.width - 130, ly, s.color);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\">{}</text>\n",
                       f.left + f.width - 126, ly + 3, escape(s.label));
  }
  return out;
}

}  // namespace

std::string render_svg(const std::string& title, const std::vector<PlotPanel>& panels) {
  constexpr double kPanelW = 420.0;
  constexpr double kPanelH = 300.0;
  constexpr double kLeft = 70.0;
  constexpr double kGap = 90.0;
  constexpr double kTop = 60.0;
  const double width = kLeft + static_cast<double>(panels.size()) * (kPanelW + kGap);
  const double height = kTop + kPanelH + 60.0;

  std::string out = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n"
      "<text x=\"{:.2f}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
      width, height, width, height, width / 2, escape(title));
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const Frame frame{kLeft + static_cast<double>(i) * (kPanelW + kGap), kTop, kPanelW, kPanelH};
    out += render_panel(panels[i], frame);
  }
  out += "</svg>\n";
  return out;
}

std::vector<PlotPanel> error_panels(const std::vector<const Trajectory*>& trajs,
                                    const std::vector<std::string>& labels,
                                    const Objective& obj) {
  obj.require_minimizer("error_panels");
  PlotPanel energy{"energy error |g(x(t)) - g*|", "t", "log10 error", {}};
  PlotPanel iterate{"iterate error |x(t) - x*|", "t", "log10 error", {}};
  const auto& colors = palette();
  for (std::size_t k = 0; k < trajs.size(); ++k) {
    PlotSeries e{labels[k], colors[k % colors.size()], {}, {}};
    PlotSeries it{labels[k], colors[k % colors.size()], {}, {}};
    for (const SystemState& s : trajs[k]->samples()) {
      e.x.push_back(s.t);
      e.y.push_back(std::abs(obj.eval(s.x) - *obj.min_value));
      it.x.push_back(s.t);
      it.y.push_back((s.x - *obj.minimizer).norm());
    }
    energy.series.push_back(std::move(e));
    iterate.series.push_back(std::move(it));
  }
  return {std::move(energy), std::move(iterate)};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::InvalidConfig, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(Errc::InvalidConfig, "failed writing " + path.string());
}

}  // namespace inertial_flow
