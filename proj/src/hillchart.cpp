#include "hydrofcr/hillchart.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hydrofcr/rng.hpp"

namespace hydrofcr {

GroundTruthHillChart::GroundTruthHillChart(HillChartConfig cfg)
    : cfg_(cfg) {
  cfg_.geometry.validate();
  const double e_ref = constants::gravity_m_s2 * cfg_.ref_head_m;
  ned_bep_ = speed_coefficient(cfg_.geometry.n_rated_rev_s,
                               cfg_.geometry.diameter_m, cfg_.ref_head_m);

  // Anchor the BEP discharge so that the specific speed (rated speed,
  // reference head) comes out at the configured value.
  const double omega = rev_s_to_rad_s(cfg_.geometry.n_rated_rev_s);
  const double sqrt_q = cfg_.specific_speed_target *
                        std::sqrt(std::numbers::pi) *
                        std::pow(2.0 * e_ref, 0.75) / omega;
  const double q_bep = sqrt_q * sqrt_q;
  q_ed_bep_ = q_bep / (cfg_.geometry.diameter_m * cfg_.geometry.diameter_m *
                       std::sqrt(e_ref));
  q_scale_ = q_ed_bep_ / std::sin(deg_to_rad(cfg_.alpha_bep_deg));

  // The linear speed term must not drive the discharge factor negative
  // anywhere on the chart domain.
  const double worst =
      1.0 + cfg_.q_ned_slope * (cfg_.ned_min - ned_bep_);
  if (worst <= 0.0) {
    throw std::invalid_argument(
        "HillChartConfig: q_ned_slope drives discharge negative in-domain");
  }
}

double GroundTruthHillChart::q_bep_m3s() const {
  return q_ed_bep_ * cfg_.geometry.diameter_m * cfg_.geometry.diameter_m *
         std::sqrt(constants::gravity_m_s2 * cfg_.ref_head_m);
}

void GroundTruthHillChart::check_domain(double alpha_deg, double beta_deg,
                                        double ned) const {
  if (!(alpha_deg >= cfg_.alpha_min_deg && alpha_deg <= cfg_.alpha_max_deg)) {
    throw std::domain_error("hill chart: guide-vane opening out of domain");
  }
  if (!(beta_deg >= cfg_.beta_min_deg && beta_deg <= cfg_.beta_max_deg)) {
    throw std::domain_error("hill chart: blade angle out of domain");
  }
  if (!(ned >= cfg_.ned_min && ned <= cfg_.ned_max)) {
    throw std::domain_error("hill chart: speed coefficient out of domain");
  }
}

double GroundTruthHillChart::alpha_profile(double alpha_deg) const {
  const double u = alpha_deg / cfg_.alpha_bep_deg;
  if (u <= 0.0) return 0.0;
  return std::pow(u * std::exp(1.0 - u), cfg_.alpha_shape);
}

double GroundTruthHillChart::ridge_beta(double alpha_deg) const {
  return cfg_.beta_bep_deg +
         cfg_.beta_per_alpha * (alpha_deg - cfg_.alpha_bep_deg);
}

double GroundTruthHillChart::ridge_ned(double alpha_deg) const {
  return ned_bep_ + cfg_.speed_per_alpha * (alpha_deg - cfg_.alpha_bep_deg);
}

double GroundTruthHillChart::blade_flow_beta(double alpha_deg,
                                             double ned) const {
  return ridge_beta(alpha_deg) - cfg_.blade_flow_per_ned * (ned - ned_bep_);
}

GroundTruthHillChart::Point GroundTruthHillChart::eval(double alpha_deg,
                                                       double beta_deg,
                                                       double ned) const {
  check_domain(alpha_deg, beta_deg, ned);

  const double mismatch = beta_deg - ridge_beta(alpha_deg);
  const double wm = cfg_.mismatch_width_deg;
  const double wn = cfg_.speed_width;
  const double off_speed = ned - ridge_ned(alpha_deg);
  const double eta = cfg_.eta_peak * alpha_profile(alpha_deg) *
                     std::exp(-(mismatch * mismatch) / (wm * wm)) *
                     std::exp(-(off_speed * off_speed) / (wn * wn));

  const double q_ed = q_scale_ * std::sin(deg_to_rad(alpha_deg)) *
                      std::exp(cfg_.q_beta_log_slope *
                               (beta_deg - cfg_.beta_bep_deg)) *
                      (1.0 + cfg_.q_ned_slope * off_speed);
  return Point{eta, q_ed};
}

double GroundTruthHillChart::efficiency(double alpha_deg, double beta_deg,
                                        double ned) const {
  return eval(alpha_deg, beta_deg, ned).eta;
}

double GroundTruthHillChart::discharge_factor(double alpha_deg,
                                              double beta_deg,
                                              double ned) const {
  return eval(alpha_deg, beta_deg, ned).q_ed;
}

GroundTruthHillChart::Gradient GroundTruthHillChart::efficiency_gradient(
    double alpha_deg, double beta_deg, double ned) const {
  check_domain(alpha_deg, beta_deg, ned);
  const double eta = efficiency(alpha_deg, beta_deg, ned);

  const double wm2 = cfg_.mismatch_width_deg * cfg_.mismatch_width_deg;
  const double wn2 = cfg_.speed_width * cfg_.speed_width;
  const double mismatch = beta_deg - ridge_beta(alpha_deg);
  const double off_speed = ned - ridge_ned(alpha_deg);

  const double u = alpha_deg / cfg_.alpha_bep_deg;
  double dln_a = 0.0;
  if (u > 0.0) {
    dln_a = cfg_.alpha_shape * (1.0 / u - 1.0) / cfg_.alpha_bep_deg;
  }
  const double dln_dalpha = dln_a +
                            2.0 * mismatch * cfg_.beta_per_alpha / wm2 +
                            2.0 * off_speed * cfg_.speed_per_alpha / wn2;
  const double dln_dbeta = -2.0 * mismatch / wm2;
  const double dln_dned = -2.0 * off_speed / wn2;

  return Gradient{eta * dln_dalpha, eta * dln_dbeta, eta * dln_dned};
}

double GroundTruthHillChart::blade_torque(double alpha_deg, double beta_deg,
                                          double ned, double head_m) const {
  const double q_rel =
      discharge_factor(alpha_deg, beta_deg, ned) / q_ed_bep_;
  const double mismatch = beta_deg - blade_flow_beta(alpha_deg, ned);
  return cfg_.blade_torque_ref_nm * (head_m / cfg_.ref_head_m) *
         (1.0 + cfg_.blade_q_sensitivity * (q_rel - 1.0) +
          cfg_.blade_beta_slope * (beta_deg - cfg_.beta_bep_deg) +
          cfg_.blade_mismatch_quad * mismatch * mismatch);
}

double GroundTruthHillChart::discharge_m3s(double alpha_deg, double beta_deg,
                                           double n_rev_s,
                                           double head_m) const {
  const double ned =
      speed_coefficient(n_rev_s, cfg_.geometry.diameter_m, head_m);
  const double q_ed = discharge_factor(alpha_deg, beta_deg, ned);
  return q_ed * cfg_.geometry.diameter_m * cfg_.geometry.diameter_m *
         std::sqrt(constants::gravity_m_s2 * head_m);
}

GridSpec GridSpec::paper(const GroundTruthHillChart& chart) {
  const auto& cfg = chart.config();
  GridSpec g;
  g.alpha_min_deg = 0.0;
  g.alpha_max_deg = cfg.alpha_max_deg;
  g.alpha_step_deg = 1.0;
  g.beta_min_deg = cfg.beta_min_deg;
  g.beta_max_deg = cfg.beta_max_deg;
  g.beta_step_deg = 1.0;
  g.ned_min = speed_coefficient(rpm_to_rev_s(500.0),
                                cfg.geometry.diameter_m, cfg.ref_head_m);
  g.ned_max = speed_coefficient(rpm_to_rev_s(1500.0),
                                cfg.geometry.diameter_m, cfg.ref_head_m);
  g.ned_count = 11;
  return g;
}

std::size_t GridSpec::size() const {
  const auto steps = [](double lo, double hi, double step) -> std::size_t {
    if (step <= 0.0 || hi < lo) return 0;
    return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  };
  const std::size_t n_alpha = steps(alpha_min_deg, alpha_max_deg, alpha_step_deg);
  const std::size_t n_beta = steps(beta_min_deg, beta_max_deg, beta_step_deg);
  const std::size_t n_ned = ned_count > 0 ? static_cast<std::size_t>(ned_count) : 0;
  return n_alpha * n_beta * n_ned;
}

std::vector<HillChartSample> generate_training_set(
    const GroundTruthHillChart& chart, const GridSpec& grid, double noise_sd,
    uint64_t seed) {
  if (noise_sd < 0.0) {
    throw std::invalid_argument("generate_training_set: noise_sd must be >= 0");
  }
  if (grid.size() == 0) {
    throw std::invalid_argument("generate_training_set: empty grid");
  }
  if (grid.ned_count < 1 || grid.ned_max < grid.ned_min) {
    throw std::invalid_argument("generate_training_set: bad speed span");
  }

  std::vector<HillChartSample> out;
  out.reserve(grid.size());
  uint64_t index = 0;
  for (double a = grid.alpha_min_deg; a <= grid.alpha_max_deg + 1e-9;
       a += grid.alpha_step_deg) {
    for (double b = grid.beta_min_deg; b <= grid.beta_max_deg + 1e-9;
         b += grid.beta_step_deg) {
      for (int k = 0; k < grid.ned_count; ++k) {
        const double t = grid.ned_count == 1
                             ? 0.0
                             : static_cast<double>(k) / (grid.ned_count - 1);
        const double ned = grid.ned_min + t * (grid.ned_max - grid.ned_min);
        const auto p = chart.eval(a, b, ned);
        double eta = p.eta;
        double q_ed = p.q_ed;
        if (noise_sd > 0.0) {
          eta += noise_sd * counter_gaussian(seed, 2 * index);
          q_ed += noise_sd * counter_gaussian(seed, 2 * index + 1);
        }
        out.push_back(HillChartSample{a, b, ned, eta, q_ed});
        ++index;
      }
    }
  }
  return out;
}

void write_training_csv(const std::string& path,
                        const std::vector<HillChartSample>& samples) {
  std::ofstream f(path);
  if (!f) {
    throw std::runtime_error("write_training_csv: cannot open " + path);
  }
  f << "alpha_deg,beta_deg,n_ed,eta,q_ed\n";
  char line[192];
  for (const auto& s : samples) {
    std::snprintf(line, sizeof(line), "%.10g,%.10g,%.10g,%.17g,%.17g\n",
                  s.alpha_deg, s.beta_deg, s.ned, s.eta, s.q_ed);
    f << line;
  }
}

std::vector<HillChartSample> read_training_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw std::runtime_error("read_training_csv: cannot open " + path);
  }
  std::string line;
  if (!std::getline(f, line) || line != "alpha_deg,beta_deg,n_ed,eta,q_ed") {
    throw std::runtime_error("read_training_csv: bad header in " + path);
  }
  std::vector<HillChartSample> out;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    HillChartSample s{};
    char extra;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf%c", &s.alpha_deg,
                    &s.beta_deg, &s.ned, &s.eta, &s.q_ed, &extra) != 5) {
      throw std::runtime_error("read_training_csv: malformed row at line " +
                               std::to_string(line_no));
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace hydrofcr
