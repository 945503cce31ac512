#pragma once

// Synthetic ground-truth machine characteristics standing in for the measured
// hill chart: a smooth unimodal efficiency surface, a discharge-factor
// surface and a blade-torque surface, plus training-set generation for the
// efficiency surrogate.

#include <cstdint>
#include <string>
#include <vector>

#include "hydrofcr/core.hpp"

namespace hydrofcr {

struct HillChartConfig {
  double eta_peak = 0.92;
  double alpha_bep_deg = 18.0;
  double beta_bep_deg = 18.0;

  // Chart domain (slightly wider than the sampling grid).
  double alpha_min_deg = 0.0;
  double alpha_max_deg = 30.0;
  double beta_min_deg = 4.0;
  double beta_max_deg = 28.0;
  double ned_min = 0.20;
  double ned_max = 1.00;

  // Efficiency surface shape.
  double alpha_shape = 1.5;          // exponent of the gamma-like alpha profile
  double beta_per_alpha = 0.25;      // blade-angle ridge slope, deg per deg
  double speed_per_alpha = 0.02;     // optimal-speed drift, n_ED per deg
  double mismatch_width_deg = 8.0;   // blade off-ridge penalty width
  double speed_width = 0.9;          // off-optimal-speed penalty width

  // Discharge-factor surface shape.
  double q_beta_log_slope = 0.12;    // d ln(Q_ED) / d beta
  double q_ned_slope = 0.2;          // linear speed influence on swallowing

  // Blade-torque surface.
  double blade_torque_ref_nm = 40.0;
  double blade_q_sensitivity = 0.005;
  double blade_beta_slope = 0.12;     // per deg
  double blade_mismatch_quad = 0.01;  // per deg^2
  double blade_flow_per_ned = 12.5;   // flow-angle shift seen by the blades

  double ref_head_m = 10.0;
  double specific_speed_target = 1.53;  // anchors Q at the BEP
  TurbineGeometry geometry{};
};

class GroundTruthHillChart {
 public:
  explicit GroundTruthHillChart(HillChartConfig cfg = {});

  const HillChartConfig& config() const { return cfg_; }

  /// Speed coefficient of the best-efficiency point (rated speed, ref head).
  double ned_bep() const { return ned_bep_; }
  /// Discharge factor at the BEP, set by the specific-speed anchor.
  double q_ed_bep() const { return q_ed_bep_; }
  /// BEP discharge in m^3/s at the reference head.
  double q_bep_m3s() const;

  struct Point {
    double eta;
    double q_ed;
  };

  /// Efficiency and discharge factor at an operating point.
  /// Throws std::domain_error outside the chart domain.
  Point eval(double alpha_deg, double beta_deg, double ned) const;

  double efficiency(double alpha_deg, double beta_deg, double ned) const;
  double discharge_factor(double alpha_deg, double beta_deg, double ned) const;

  struct Gradient {
    double d_alpha;
    double d_beta;
    double d_ned;
  };
  /// Analytic gradient of the efficiency surface.
  Gradient efficiency_gradient(double alpha_deg, double beta_deg,
                               double ned) const;

  /// Torque on one blade connecting rod, N*m.
  double blade_torque(double alpha_deg, double beta_deg, double ned,
                      double head_m) const;

  /// Discharge in m^3/s: Q = Q_ED * D^2 * sqrt(g*H).
  double discharge_m3s(double alpha_deg, double beta_deg, double n_rev_s,
                       double head_m) const;

  /// Blade angle of the efficiency ridge at a given opening.
  double ridge_beta(double alpha_deg) const;
  /// Speed coefficient of the efficiency optimum at a given opening.
  double ridge_ned(double alpha_deg) const;
  /// Blade angle aligned with the local flow (torque surface reference).
  double blade_flow_beta(double alpha_deg, double ned) const;

 private:
  void check_domain(double alpha_deg, double beta_deg, double ned) const;
  double alpha_profile(double alpha_deg) const;

  HillChartConfig cfg_;
  double ned_bep_;
  double q_ed_bep_;
  double q_scale_;
};

struct GridSpec {
  double alpha_min_deg = 0.0;
  double alpha_max_deg = 30.0;
  double alpha_step_deg = 1.0;
  double beta_min_deg = 4.0;
  double beta_max_deg = 28.0;
  double beta_step_deg = 1.0;
  double ned_min = 0.0;
  double ned_max = 0.0;
  int ned_count = 11;

  /// The measurement grid: 1 degree increments, speeds 500..1500 min^-1.
  static GridSpec paper(const GroundTruthHillChart& chart);

  std::size_t size() const;
};

struct HillChartSample {
  double alpha_deg;
  double beta_deg;
  double ned;
  double eta;
  double q_ed;
};

/// Full-factorial sampling of the ground truth with additive Gaussian noise
/// of the given standard deviation on both measured channels. Bitwise
/// reproducible for a fixed seed, independent of evaluation order.
std::vector<HillChartSample> generate_training_set(
    const GroundTruthHillChart& chart, const GridSpec& grid, double noise_sd,
    uint64_t seed);

void write_training_csv(const std::string& path,
                        const std::vector<HillChartSample>& samples);
std::vector<HillChartSample> read_training_csv(const std::string& path);

}  // namespace hydrofcr
