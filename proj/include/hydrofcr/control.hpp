#pragma once

// Governors for the four test configurations: standalone Kaplan, VARspeed
// propeller, and the BESS hybrids with a two-layer power-split controller.

#include "hydrofcr/cam.hpp"
#include "hydrofcr/core.hpp"
#include "hydrofcr/plant.hpp"

namespace hydrofcr {

enum class GovernorMode { OnlyHydro, VarSpeed, HybridBess };

struct PiGains {
  double kp = 1.0e-4;  // deg per W
  double ki = 1.0e-5;  // deg per (W*s)
};

struct HybridSplitConfig {
  double lp_cutoff_hz = 1.0 / 90.0;  // low-pass split frequency
  // The split time constant scales with stored energy relative to this
  // reference, so a larger buffer shields the servos longer. 0 disables.
  double lp_energy_ref_wh = 5000.0;
  double soc_target = 0.5;
  double recenter_period_s = 300.0;
  double recenter_gain_w = 0.0;      // W per unit SoC error; <= 0: 2x rating
  double assist_fraction = 0.75;     // of BESS rating before hydro takes over
};

struct GovernorConfig {
  GovernorMode mode = GovernorMode::OnlyHydro;
  DroopConfig droop{};
  PiGains pi{};
  HybridSplitConfig hybrid{};
  double n_rated_rev_s = 25.0;
  double beta_fixed_deg = 18.0;   // VarSpeed blade position
  double speed_ref_lag_s = 15.0;  // speed-schedule trim filter
  double bess_p_rated_w = 0.0;    // 0 collapses HybridBess to OnlyHydro
  double bess_e_rated_wh = 0.0;
};

/// Deterministic governor state machine owned by one scenario.
class Governor {
 public:
  Governor(GovernorConfig cfg, const CamTable* cam, const SetpointMap* map);

  /// One control step: computes the FCR set-point and actuator references
  /// from the frequency sample and the measured plant state.
  ActuatorRefs step(double f_hz, double p_disp_w, const PlantState& plant,
                    double t_s, double dt_s);

  /// Initializes internal states to a settled point at the given set-point.
  void init_steady(double p_set_w);

  double last_p_set_w() const { return last_p_set_; }
  double last_p_hydro_ref_w() const { return last_p_hydro_ref_; }
  double last_p_bess_ref_w() const { return last_p_bess_ref_; }

  struct Split {
    double p_hydro_ref_w;
    double p_bess_ref_w;
  };
  /// Two-layer split: low-pass for the hydro unit plus periodic SoC
  /// recentering; the BESS reference is the exact residual.
  Split hybrid_split(double p_set_w, double soc, double t_s, double dt_s);

 private:
  bool hybrid_active() const {
    return cfg_.mode == GovernorMode::HybridBess && cfg_.bess_p_rated_w > 0.0;
  }

  GovernorConfig cfg_;
  const CamTable* cam_;
  const SetpointMap* map_;

  double integrator_deg_ = 0.0;
  double speed_ref_rev_s_ = 0.0;
  bool speed_ref_initialized_ = false;
  double lp_state_w_ = 0.0;
  double recenter_bias_w_ = 0.0;
  double next_recenter_s_ = 0.0;
  bool lp_initialized_ = false;

  double last_p_set_ = 0.0;
  double last_p_hydro_ref_ = 0.0;
  double last_p_bess_ref_ = 0.0;
};

}  // namespace hydrofcr
