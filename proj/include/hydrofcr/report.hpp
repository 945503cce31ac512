#pragma once

// Standalone vector-graphics reports: frequency trace, tracking error,
// RBT-derivative CDF overlay and efficiency scatter.

#include <map>
#include <string>
#include <vector>

#include "hydrofcr/kpi.hpp"

namespace hydrofcr {

struct PlotSeries {
  std::string label;
  std::string color;  // SVG color
  std::vector<double> x;
  std::vector<double> y;
};

/// Writes a line plot as a self-contained SVG file. Series are decimated to
/// a bounded point count.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series,
                    bool scatter = false);

void plot_frequency(const std::string& path,
                    const std::vector<double>& time_s,
                    const std::vector<double>& f_hz);

void plot_tracking_error(const std::string& path,
                         const std::map<std::string, Trace>& traces);

void plot_rbt_cdf(const std::string& path,
                  const std::map<std::string, KpiReport>& reports);

void plot_efficiency(const std::string& path,
                     const std::map<std::string, Trace>& traces,
                     bool global_efficiency);

}  // namespace hydrofcr
