#pragma once

// CAM lookup tables built by numerical optimization over the efficiency
// surrogate: GVO -> RBA for the fixed-speed Kaplan, GVO -> speed for the
// variable-speed propeller, plus the inverse power set-point map.

#include <string>
#include <vector>

#include "json.hpp"

#include "hydrofcr/hillchart.hpp"
#include "hydrofcr/surrogate.hpp"

namespace hydrofcr {

enum class CamMode { Kaplan, VarSpeed };

struct CamRow {
  double alpha_deg;
  double control;     // RBA in deg (Kaplan) or speed in rev/s (VarSpeed)
  double eta_pred;    // surrogate efficiency at the chosen control
  double p_pred_w;    // predicted electrical-side-free power eta*rho*g*Q*H
};

struct CamTable {
  CamMode mode = CamMode::Kaplan;
  std::vector<CamRow> rows;
  double head_m = 10.0;
  double fixed_beta_deg = 18.0;    // VarSpeed only
  double fixed_speed_rev_s = 25.0; // Kaplan only

  /// Linear interpolation of the control column, clamped at the ends.
  double control_for_alpha(double alpha_deg) const;
  double p_max_w() const;
  void validate() const;
};

struct CamBuildConfig {
  double alpha_step_deg = 0.5;
  double coarse_step_deg = 0.5;   // coarse bracketing grid for the 1-D search
  double refine_tol_deg = 0.01;   // golden-section stop width
  double speed_min_rpm = 500.0;
  double speed_max_rpm = 1500.0;
};

/// For each guide-vane opening, the blade angle maximizing the surrogate at
/// fixed speed. Ties resolve toward the smaller control value.
CamTable build_kaplan_cam(const EfficiencySurrogate& model,
                          const GroundTruthHillChart& chart, double head_m,
                          double n_fixed_rev_s,
                          const CamBuildConfig& cfg = {});

/// For each guide-vane opening, the speed maximizing the surrogate at fixed
/// blade angle, bounded to the tested speed range.
CamTable build_varspeed_cam(const EfficiencySurrogate& model,
                            const GroundTruthHillChart& chart, double head_m,
                            double beta_fixed_deg = 18.0,
                            const CamBuildConfig& cfg = {});

struct InvertResult {
  double alpha_deg;
  bool clamped;
};

/// Inverse of the row power column: p_set -> alpha by linear interpolation,
/// clamped (and flagged) outside [0, p_max].
InvertResult invert_power(const CamTable& table, double p_set_w);

/// Monotone p_set -> alpha map derived from a CAM table.
class SetpointMap {
 public:
  SetpointMap() = default;
  explicit SetpointMap(const CamTable& table);

  double alpha_for_power(double p_set_w, bool* clamped = nullptr) const;
  double p_max_w() const { return p_max_; }

 private:
  std::vector<double> p_;      // ascending
  std::vector<double> alpha_;  // ascending
  double p_max_ = 0.0;
};

void write_cam_csv(const std::string& path, const CamTable& table);
nlohmann::json cam_metadata(const CamTable& table);
CamTable read_cam_csv(const std::string& csv_path,
                      const std::string& meta_path);
void write_cam_metadata(const std::string& path, const CamTable& table);

}  // namespace hydrofcr
