#pragma once

// Discrete-time model of the physical assets: servo actuators, the
// runner/generator with its speed path, the frequency converter and the BESS.

#include "hydrofcr/core.hpp"
#include "hydrofcr/hillchart.hpp"

namespace hydrofcr {

struct ServoConfig {
  double rate_limit_deg_s = 1.0;
  double time_constant_s = 0.5;
  double min_deg = 0.0;
  double max_deg = 30.0;
};

struct ServoState {
  double position_deg = 0.0;
};

/// First-order lag toward the reference, then rate limit and position clamp.
ServoState step_servo(const ServoConfig& cfg, ServoState s, double ref_deg,
                      double dt_s);

struct BessConfig {
  double p_rated_w = 0.0;   // 0 disables the battery
  double e_rated_wh = 0.0;
  double eta_charge = 0.95;
  double eta_discharge = 0.95;
  double soc_init = 0.5;

  bool enabled() const { return p_rated_w > 0.0 && e_rated_wh > 0.0; }
  void validate() const;
};

struct BessStep {
  double soc;
  double p_actual_w;  // + discharge, - charge
  bool clamped;
};

/// Clamps the command to the power rating and to SoC feasibility, then
/// integrates the state of charge with directional efficiency.
BessStep step_bess(const BessConfig& cfg, double soc, double p_cmd_w,
                   double dt_s);

struct ElectricalChain {
  double eta_gen = 0.95;
  double eta_conv = 0.97;  // full-size converter, VarSpeed path only
};

enum class DriveMode { Fixed, VarSpeed };

/// Mechanical-to-electrical conversion for the selected drive topology.
double electrical_power(double p_m_w, DriveMode mode,
                        const ElectricalChain& chain);

struct ActuatorRefs {
  double gvo_deg = 0.0;
  double rba_deg = 0.0;
  double speed_rev_s = 0.0;
  double p_bess_w = 0.0;
};

struct PlantConfig {
  DriveMode mode = DriveMode::Fixed;
  ServoConfig gvo{0.8, 4.0, 0.0, 30.0};
  ServoConfig rba{0.04, 8.0, 4.0, 28.0};
  double speed_lag_s = 0.5;         // converter-regulated speed loop
  double rotor_inertia_kgm2 = 1.5;  // runner + machine, reduced scale
  ElectricalChain chain{};
  BessConfig bess{};
  double head_m = 10.0;
  double dt_s = 0.02;
};

struct PlantState {
  double gvo_deg = 0.0;
  double rba_deg = 18.0;
  double n_rev_s = 25.0;
  double head_m = 10.0;
  double q_m3s = 0.0;
  double t_shaft_nm = 0.0;   // measured on the shaft: hydraulic minus inertia
  double t_blade_nm = 0.0;
  double p_h_w = 0.0;
  double p_m_w = 0.0;        // T_shaft * omega
  double p_hydro_elec_w = 0.0;
  double p_bess_w = 0.0;
  double p_pcc_w = 0.0;
  double soc = 0.5;
  double eta_h = 0.0;
  bool bess_clamped = false;
};

class Plant {
 public:
  Plant(PlantConfig cfg, const GroundTruthHillChart* chart);

  /// Initializes all states to an exact steady point (servo positions at the
  /// given values, speed settled, no transients).
  void init_steady(double alpha_deg, double beta_deg, double n_rev_s,
                   double soc);

  const PlantState& state() const { return state_; }
  const PlantConfig& config() const { return cfg_; }

  /// Advances one time step and returns the new state.
  const PlantState& step(const ActuatorRefs& refs, double dt_s);

 private:
  void update_hydraulics(double n_prev_rev_s, double dt_s);

  PlantConfig cfg_;
  const GroundTruthHillChart* chart_;
  PlantState state_;
};

}  // namespace hydrofcr
