#include "hydrofcr/cam.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <stdexcept>

namespace hydrofcr {

namespace {

// Coarse grid scan followed by golden-section refinement inside the
// bracketing interval. The objective is quasi-unimodal (piecewise-linear
// slices of a unimodal surface), so bracketing first avoids knot-local
// plateaus. Ties resolve toward the smaller argument.
double maximize_1d(const std::function<double(double)>& f, double lo,
                   double hi, double coarse_step, double tol) {
  if (!(hi > lo)) {
    throw std::invalid_argument("maximize_1d: empty search interval");
  }
  const int n_steps = std::max(1, static_cast<int>(std::ceil((hi - lo) / coarse_step)));
  double best_x = lo;
  double best_v = f(lo);
  for (int i = 1; i <= n_steps; ++i) {
    const double x = std::min(hi, lo + i * coarse_step);
    const double v = f(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }

  double a = std::max(lo, best_x - coarse_step);
  double b = std::min(hi, best_x + coarse_step);
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 >= f2) {  // >= biases the bracket toward smaller arguments
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  const double mid = 0.5 * (a + b);
  // The refined point can only be kept if it actually beats the coarse
  // winner; on ties the smaller control wins.
  const double vm = f(mid);
  if (vm > best_v || (vm == best_v && mid < best_x)) return mid;
  return best_x;
}

double predicted_power(const GroundTruthHillChart& chart, double eta,
                       double alpha_deg, double beta_deg, double ned,
                       double head_m) {
  const double d = chart.config().geometry.diameter_m;
  const double q = chart.discharge_factor(alpha_deg, beta_deg, ned) * d * d *
                   std::sqrt(constants::gravity_m_s2 * head_m);
  // The surrogate can dip marginally below zero near the domain edges.
  return std::clamp(eta, 0.0, 1.2) * hydraulic_power(q, head_m);
}

// The power curve can peak before full gate, and the fitted surface may show
// a spurious bump at the very edge of its domain. The table ends at the
// running power peak reached before the first sustained (1%) drawdown.
// Small numerical dips before that point are flattened; anything larger is
// a construction error.
void finalize_rows(CamTable& table) {
  auto& rows = table.rows;
  if (rows.empty()) throw std::runtime_error("CAM build: no rows");
  std::size_t peak_idx = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].p_pred_w > rows[peak_idx].p_pred_w) {
      peak_idx = i;
    } else if (rows[i].p_pred_w < 0.99 * rows[peak_idx].p_pred_w) {
      break;
    }
  }
  rows.resize(peak_idx + 1);
  const double global_tol = 1e-3 * rows.back().p_pred_w;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].p_pred_w < rows[i - 1].p_pred_w) {
      const double tol = std::max(global_tol, 0.02 * rows[i - 1].p_pred_w);
      if (rows[i - 1].p_pred_w - rows[i].p_pred_w > tol) {
        throw std::runtime_error("CAM build: predicted power not monotone");
      }
      rows[i].p_pred_w = rows[i - 1].p_pred_w;
    }
  }
  table.validate();
}

}  // namespace

double CamTable::control_for_alpha(double alpha_deg) const {
  if (rows.empty()) throw std::logic_error("CamTable: empty");
  if (alpha_deg <= rows.front().alpha_deg) return rows.front().control;
  if (alpha_deg >= rows.back().alpha_deg) return rows.back().control;
  auto it = std::lower_bound(
      rows.begin(), rows.end(), alpha_deg,
      [](const CamRow& r, double a) { return r.alpha_deg < a; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double t = (alpha_deg - lo.alpha_deg) / (hi.alpha_deg - lo.alpha_deg);
  return lo.control + t * (hi.control - lo.control);
}

double CamTable::p_max_w() const {
  if (rows.empty()) throw std::logic_error("CamTable: empty");
  return rows.back().p_pred_w;
}

void CamTable::validate() const {
  if (rows.empty()) throw std::runtime_error("CamTable: no rows");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].alpha_deg > rows[i - 1].alpha_deg)) {
      throw std::runtime_error("CamTable: alphas not strictly increasing");
    }
    if (rows[i].p_pred_w < rows[i - 1].p_pred_w - 1e-9) {
      throw std::runtime_error("CamTable: predicted power not monotone");
    }
  }
}

CamTable build_kaplan_cam(const EfficiencySurrogate& model,
                          const GroundTruthHillChart& chart, double head_m,
                          double n_fixed_rev_s, const CamBuildConfig& cfg) {
  if (head_m <= 0.0) throw std::invalid_argument("build_kaplan_cam: head");
  const auto& hc = chart.config();
  const double ned = speed_coefficient(n_fixed_rev_s, hc.geometry.diameter_m,
                                       head_m);
  const double beta_lo = std::max(hc.beta_min_deg, model.input_ranges()[1][0]);
  const double beta_hi = std::min(hc.beta_max_deg, model.input_ranges()[1][1]);
  if (!(beta_hi > beta_lo)) {
    throw std::runtime_error("build_kaplan_cam: empty blade-angle range");
  }

  CamTable table;
  table.mode = CamMode::Kaplan;
  table.head_m = head_m;
  table.fixed_speed_rev_s = n_fixed_rev_s;
  table.fixed_beta_deg = 0.0;
  for (double a = 0.0; a <= hc.alpha_max_deg + 1e-9; a += cfg.alpha_step_deg) {
    const double alpha = std::min(a, hc.alpha_max_deg);
    const double beta = maximize_1d(
        [&](double b) { return model.eval(alpha, b, ned); }, beta_lo, beta_hi,
        cfg.coarse_step_deg, cfg.refine_tol_deg);
    const double eta = model.eval(alpha, beta, ned);
    table.rows.push_back(CamRow{
        alpha, beta, eta, predicted_power(chart, eta, alpha, beta, ned,
                                          head_m)});
  }
  finalize_rows(table);
  return table;
}

CamTable build_varspeed_cam(const EfficiencySurrogate& model,
                            const GroundTruthHillChart& chart, double head_m,
                            double beta_fixed_deg, const CamBuildConfig& cfg) {
  if (head_m <= 0.0) throw std::invalid_argument("build_varspeed_cam: head");
  const auto& hc = chart.config();
  const double d = hc.geometry.diameter_m;
  const double ned_lo =
      speed_coefficient(rpm_to_rev_s(cfg.speed_min_rpm), d, head_m);
  const double ned_hi =
      speed_coefficient(rpm_to_rev_s(cfg.speed_max_rpm), d, head_m);
  if (!(ned_hi > ned_lo)) {
    throw std::runtime_error("build_varspeed_cam: empty speed range");
  }
  // Coarse step equivalent to the configured angular step, mapped onto the
  // n_ED axis so refinement granularity matches the Kaplan search.
  const double span_deg = hc.beta_max_deg - hc.beta_min_deg;
  const double coarse = (ned_hi - ned_lo) * cfg.coarse_step_deg / span_deg;
  const double tol = (ned_hi - ned_lo) * cfg.refine_tol_deg / span_deg;

  CamTable table;
  table.mode = CamMode::VarSpeed;
  table.head_m = head_m;
  table.fixed_beta_deg = beta_fixed_deg;
  table.fixed_speed_rev_s = 0.0;
  const double ned_to_rev_s =
      std::sqrt(constants::gravity_m_s2 * head_m) / d;
  for (double a = 0.0; a <= hc.alpha_max_deg + 1e-9; a += cfg.alpha_step_deg) {
    const double alpha = std::min(a, hc.alpha_max_deg);
    const double ned = maximize_1d(
        [&](double x) { return model.eval(alpha, beta_fixed_deg, x); },
        ned_lo, ned_hi, coarse, tol);
    const double eta = model.eval(alpha, beta_fixed_deg, ned);
    table.rows.push_back(CamRow{
        alpha, ned * ned_to_rev_s, eta,
        predicted_power(chart, eta, alpha, beta_fixed_deg, ned, head_m)});
  }
  finalize_rows(table);
  return table;
}

InvertResult invert_power(const CamTable& table, double p_set_w) {
  if (table.rows.empty()) throw std::logic_error("invert_power: empty table");
  const auto& rows = table.rows;
  if (p_set_w <= rows.front().p_pred_w) {
    return InvertResult{rows.front().alpha_deg,
                        p_set_w < rows.front().p_pred_w};
  }
  if (p_set_w >= rows.back().p_pred_w) {
    return InvertResult{rows.back().alpha_deg,
                        p_set_w > rows.back().p_pred_w};
  }
  auto it = std::lower_bound(
      rows.begin(), rows.end(), p_set_w,
      [](const CamRow& r, double p) { return r.p_pred_w < p; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  if (hi.p_pred_w <= lo.p_pred_w) {
    return InvertResult{lo.alpha_deg, false};  // flat segment
  }
  const double t = (p_set_w - lo.p_pred_w) / (hi.p_pred_w - lo.p_pred_w);
  return InvertResult{lo.alpha_deg + t * (hi.alpha_deg - lo.alpha_deg), false};
}

SetpointMap::SetpointMap(const CamTable& table) {
  table.validate();
  p_.reserve(table.rows.size());
  alpha_.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    // Collapse flat power segments to keep the inverse single-valued.
    if (!p_.empty() && r.p_pred_w <= p_.back()) continue;
    p_.push_back(r.p_pred_w);
    alpha_.push_back(r.alpha_deg);
  }
  if (p_.size() < 2) throw std::runtime_error("SetpointMap: degenerate table");
  p_max_ = p_.back();
}

double SetpointMap::alpha_for_power(double p_set_w, bool* clamped) const {
  if (clamped) *clamped = false;
  if (p_set_w <= p_.front()) {
    if (clamped) *clamped = p_set_w < p_.front();
    return alpha_.front();
  }
  if (p_set_w >= p_.back()) {
    if (clamped) *clamped = p_set_w > p_.back();
    return alpha_.back();
  }
  const auto it = std::lower_bound(p_.begin(), p_.end(), p_set_w);
  const std::size_t i = static_cast<std::size_t>(it - p_.begin());
  const double t = (p_set_w - p_[i - 1]) / (p_[i] - p_[i - 1]);
  return alpha_[i - 1] + t * (alpha_[i] - alpha_[i - 1]);
}

void write_cam_csv(const std::string& path, const CamTable& table) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_cam_csv: cannot open " + path);
  f << "alpha_deg,control,eta_pred,p_pred_w\n";
  char line[160];
  for (const auto& r : table.rows) {
    std::snprintf(line, sizeof(line), "%.10g,%.17g,%.17g,%.17g\n", r.alpha_deg,
                  r.control, r.eta_pred, r.p_pred_w);
    f << line;
  }
}

nlohmann::json cam_metadata(const CamTable& table) {
  return nlohmann::json{
      {"schema_version", 1},
      {"type", "hydrofcr_cam"},
      {"mode", table.mode == CamMode::Kaplan ? "kaplan" : "varspeed"},
      {"head_m", table.head_m},
      {"control_unit",
       table.mode == CamMode::Kaplan ? "deg" : "rev_per_s"},
      {"fixed_beta_deg", table.fixed_beta_deg},
      {"fixed_speed_rev_s", table.fixed_speed_rev_s},
      {"rows", table.rows.size()}};
}

void write_cam_metadata(const std::string& path, const CamTable& table) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_cam_metadata: cannot open " + path);
  f << cam_metadata(table).dump(2) << "\n";
}

CamTable read_cam_csv(const std::string& csv_path,
                      const std::string& meta_path) {
  std::ifstream meta(meta_path);
  if (!meta) throw std::runtime_error("read_cam_csv: cannot open " + meta_path);
  nlohmann::json j;
  meta >> j;
  CamTable table;
  table.mode = j.at("mode").get<std::string>() == "kaplan" ? CamMode::Kaplan
                                                           : CamMode::VarSpeed;
  table.head_m = j.at("head_m").get<double>();
  table.fixed_beta_deg = j.at("fixed_beta_deg").get<double>();
  table.fixed_speed_rev_s = j.at("fixed_speed_rev_s").get<double>();

  std::ifstream f(csv_path);
  if (!f) throw std::runtime_error("read_cam_csv: cannot open " + csv_path);
  std::string line;
  if (!std::getline(f, line) || line != "alpha_deg,control,eta_pred,p_pred_w") {
    throw std::runtime_error("read_cam_csv: bad header in " + csv_path);
  }
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    CamRow r{};
    char extra;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf%c", &r.alpha_deg,
                    &r.control, &r.eta_pred, &r.p_pred_w, &extra) != 4) {
      throw std::runtime_error("read_cam_csv: malformed row at line " +
                               std::to_string(line_no));
    }
    table.rows.push_back(r);
  }
  table.validate();
  return table;
}

}  // namespace hydrofcr
