#include "hydrofcr/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace hydrofcr {

namespace {

constexpr int kWidth = 900;
constexpr int kHeight = 480;
constexpr int kMarginL = 70;
constexpr int kMarginR = 20;
constexpr int kMarginT = 40;
constexpr int kMarginB = 50;
constexpr std::size_t kMaxPoints = 4000;

const char* kPalette[] = {"#7b2d8b", "#2e8b57", "#1f4e9e", "#b5651d",
                          "#cc2936", "#11867d"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void absorb(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void pad() {
    if (!(hi > lo)) {
      hi = lo + 1.0;
      lo -= 1.0;
    } else {
      const double m = 0.04 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series, bool scatter) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_svg_plot: cannot open " + path);

  Range rx, ry;
  for (const auto& s : series) {
    for (double v : s.x) rx.absorb(v);
    for (double v : s.y) ry.absorb(v);
  }
  if (!std::isfinite(rx.lo) || !std::isfinite(ry.lo)) {
    rx = Range{0.0, 1.0};
    ry = Range{0.0, 1.0};
  }
  rx.pad();
  ry.pad();

  const double plot_w = kWidth - kMarginL - kMarginR;
  const double plot_h = kHeight - kMarginT - kMarginB;
  auto px = [&](double x) {
    return kMarginL + (x - rx.lo) / (rx.hi - rx.lo) * plot_w;
  };
  auto py = [&](double y) {
    return kMarginT + plot_h - (y - ry.lo) / (ry.hi - ry.lo) * plot_h;
  };

  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
    << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
    << kHeight << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  f << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
       "font-family=\"sans-serif\" font-size=\"16\">"
    << escape(title) << "</text>\n";

  // Axes and ticks.
  char buf[256];
  f << "<rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\""
    << plot_w << "\" height=\"" << plot_h
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = rx.lo + (rx.hi - rx.lo) * i / 5.0;
    const double yv = ry.lo + (ry.hi - ry.lo) * i / 5.0;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\" "
                  "font-family=\"sans-serif\" font-size=\"11\">%.4g</text>\n",
                  px(xv), kHeight - kMarginB + 18, xv);
    f << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"%.1f\" text-anchor=\"end\" "
                  "font-family=\"sans-serif\" font-size=\"11\">%.4g</text>\n",
                  kMarginL - 6, py(yv) + 4, yv);
    f << buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%d\" x2=\"%.1f\" y2=\"%d\" "
                  "stroke=\"#ddd\"/>\n",
                  px(xv), kMarginT, px(xv), kHeight - kMarginB);
    f << buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%d\" y1=\"%.1f\" x2=\"%d\" y2=\"%.1f\" "
                  "stroke=\"#ddd\"/>\n",
                  kMarginL, py(yv), kWidth - kMarginR, py(yv));
    f << buf;
  }
  f << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"13\">"
    << escape(x_label) << "</text>\n";
  f << "<text x=\"16\" y=\"" << kHeight / 2
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
       "transform=\"rotate(-90 16 "
    << kHeight / 2 << ")\">" << escape(y_label) << "</text>\n";

  int color_idx = 0;
  int legend_y = kMarginT + 16;
  for (const auto& s : series) {
    const std::string color =
        s.color.empty() ? kPalette[color_idx % 6] : s.color;
    ++color_idx;
    const std::size_t n = std::min(s.x.size(), s.y.size());
    const std::size_t stride = std::max<std::size_t>(1, n / kMaxPoints);
    if (scatter) {
      for (std::size_t i = 0; i < n; i += stride) {
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"1.6\" "
                      "fill=\"%s\" fill-opacity=\"0.5\"/>\n",
                      px(s.x[i]), py(s.y[i]), color.c_str());
        f << buf;
      }
    } else {
      f << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t i = 0; i < n; i += stride) {
        std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", px(s.x[i]), py(s.y[i]));
        f << buf;
      }
      f << "\"/>\n";
    }
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%d\" y=\"%d\" width=\"14\" height=\"4\" "
                  "fill=\"%s\"/><text x=\"%d\" y=\"%d\" "
                  "font-family=\"sans-serif\" font-size=\"12\">%s</text>\n",
                  kMarginL + 10, legend_y - 4, color.c_str(), kMarginL + 30,
                  legend_y, escape(s.label).c_str());
    f << buf;
    legend_y += 16;
  }
  f << "</svg>\n";
}

void plot_frequency(const std::string& path, const std::vector<double>& time_s,
                    const std::vector<double>& f_hz) {
  PlotSeries s{"frequency", "", time_s, f_hz};
  write_svg_plot(path, "Grid frequency", "time [s]", "frequency [Hz]", {s});
}

void plot_tracking_error(const std::string& path,
                         const std::map<std::string, Trace>& traces) {
  std::vector<PlotSeries> series;
  for (const auto& [mode, trace] : traces) {
    PlotSeries s;
    s.label = mode;
    s.x = trace.time_s;
    const auto te = tracking_error(trace);
    s.y.assign(te.begin(), te.end());
    series.push_back(std::move(s));
  }
  write_svg_plot(path, "FCR tracking error", "time [s]", "TE [W]", series);
}

void plot_rbt_cdf(const std::string& path,
                  const std::map<std::string, KpiReport>& reports) {
  std::vector<PlotSeries> series;
  for (const auto& [mode, kpi] : reports) {
    PlotSeries s;
    s.label = mode;
    const std::size_t n = kpi.rbt_cdf_quantiles.size();
    s.x = kpi.rbt_cdf_quantiles;
    s.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      s.y[i] = n > 1 ? static_cast<double>(i) / (n - 1) : 1.0;
    }
    series.push_back(std::move(s));
  }
  write_svg_plot(path, "CDF of |dRBT/dt|", "|dRBT/dt| [N m/s]", "CDF [-]",
                 series);
}

void plot_efficiency(const std::string& path,
                     const std::map<std::string, Trace>& traces,
                     bool global_efficiency) {
  std::vector<PlotSeries> series;
  for (const auto& [mode, trace] : traces) {
    PlotSeries s;
    s.label = mode;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const double p_h = trace.p_h_w[i];
      if (p_h <= 1000.0) continue;
      const double num =
          global_efficiency ? trace.p_pcc_w[i] : trace.p_m_w[i];
      s.x.push_back(trace.p_pcc_w[i] / 1000.0);
      s.y.push_back(num / p_h);
    }
    series.push_back(std::move(s));
  }
  write_svg_plot(path,
                 global_efficiency ? "Global efficiency" : "Hydraulic efficiency",
                 "P_pcc [kW]", global_efficiency ? "eta_g [-]" : "eta_h [-]",
                 series, /*scatter=*/true);
}

}  // namespace hydrofcr
