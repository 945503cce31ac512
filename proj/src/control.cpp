#include "hydrofcr/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hydrofcr {

Governor::Governor(GovernorConfig cfg, const CamTable* cam,
                   const SetpointMap* map)
    : cfg_(cfg), cam_(cam), map_(map) {
  if (cam_ == nullptr || map_ == nullptr) {
    throw std::invalid_argument("Governor: cam table and set-point map required");
  }
  cfg_.droop.validate();
  const bool wants_varspeed_cam = cfg_.mode == GovernorMode::VarSpeed;
  const bool has_varspeed_cam = cam_->mode == CamMode::VarSpeed;
  if (wants_varspeed_cam != has_varspeed_cam) {
    throw std::invalid_argument("Governor: CAM mode does not match governor mode");
  }
  if (cfg_.hybrid.recenter_gain_w <= 0.0) {
    cfg_.hybrid.recenter_gain_w = 2.0 * cfg_.bess_p_rated_w;
  }
  next_recenter_s_ = cfg_.hybrid.recenter_period_s;
}

void Governor::init_steady(double p_set_w) {
  integrator_deg_ = 0.0;
  speed_ref_initialized_ = false;
  lp_state_w_ = p_set_w;
  lp_initialized_ = true;
  recenter_bias_w_ = 0.0;
  next_recenter_s_ = cfg_.hybrid.recenter_period_s;
}

Governor::Split Governor::hybrid_split(double p_set_w, double soc, double t_s,
                                       double dt_s) {
  if (!lp_initialized_) {
    lp_state_w_ = p_set_w;
    lp_initialized_ = true;
  }
  // Layer 1: first-order low-pass carries the slow component to the hydro
  // unit; the residual goes to the battery. The time constant grows with the
  // energy buffer.
  double tau = 1.0 / (2.0 * std::numbers::pi * cfg_.hybrid.lp_cutoff_hz);
  if (cfg_.hybrid.lp_energy_ref_wh > 0.0 && cfg_.bess_e_rated_wh > 0.0) {
    tau *= cfg_.bess_e_rated_wh / cfg_.hybrid.lp_energy_ref_wh;
  }
  const double a = 1.0 - std::exp(-dt_s / tau);
  lp_state_w_ += (p_set_w - lp_state_w_) * a;

  // Layer 2: periodic SoC recentering bias, held between ticks.
  if (t_s >= next_recenter_s_) {
    recenter_bias_w_ =
        cfg_.hybrid.recenter_gain_w * (cfg_.hybrid.soc_target - soc);
    next_recenter_s_ += cfg_.hybrid.recenter_period_s;
  }

  double p_hydro = lp_state_w_ + recenter_bias_w_;

  // Saturation-aware feedforward: residual beyond the battery's usable band
  // goes to the hydro unit immediately.
  const double residual = p_set_w - p_hydro;
  const double band = cfg_.hybrid.assist_fraction * cfg_.bess_p_rated_w;
  if (residual > band) {
    p_hydro += residual - band;
  } else if (residual < -band) {
    p_hydro += residual + band;
  }

  return Split{p_hydro, p_set_w - p_hydro};
}

ActuatorRefs Governor::step(double f_hz, double p_disp_w,
                            const PlantState& plant, double t_s, double dt_s) {
  const double p_set = fcr_setpoint(p_disp_w, f_hz, cfg_.droop);
  last_p_set_ = p_set;

  double track_ref = p_set;
  double measured = plant.p_pcc_w;
  double p_bess_cmd = 0.0;
  if (hybrid_active()) {
    const Split split = hybrid_split(p_set, plant.soc, t_s, dt_s);
    track_ref = split.p_hydro_ref_w;
    measured = plant.p_hydro_elec_w;
    // The converter follows the instantaneous residual of the measured hydro
    // output, covering servo lag within its rating.
    p_bess_cmd = p_set - plant.p_hydro_elec_w;
    last_p_hydro_ref_ = split.p_hydro_ref_w;
    last_p_bess_ref_ = split.p_bess_ref_w;
  } else {
    last_p_hydro_ref_ = p_set;
    last_p_bess_ref_ = 0.0;
  }

  const double error_w = track_ref - measured;
  const double feedforward = map_->alpha_for_power(track_ref);
  const double alpha_min = cam_->rows.front().alpha_deg;
  const double alpha_max = cam_->rows.back().alpha_deg;

  // PI trim with conditional anti-windup: the integrator freezes while the
  // reference rails at an actuator limit.
  double integ_next = integrator_deg_ + cfg_.pi.ki * error_w * dt_s;
  double alpha_ref = feedforward + cfg_.pi.kp * error_w + integ_next;
  if (alpha_ref > alpha_max) {
    alpha_ref = alpha_max;
    integ_next = integrator_deg_;
  } else if (alpha_ref < alpha_min) {
    alpha_ref = alpha_min;
    integ_next = integrator_deg_;
  }
  integrator_deg_ = integ_next;

  ActuatorRefs refs;
  refs.gvo_deg = alpha_ref;
  refs.p_bess_w = p_bess_cmd;
  if (cfg_.mode == GovernorMode::VarSpeed) {
    refs.rba_deg = cfg_.beta_fixed_deg;
    // The speed schedule is trimmed slowly toward the CAM optimum; fast
    // power tracking runs through the guide vanes.
    const double cam_speed = cam_->control_for_alpha(alpha_ref);
    if (!speed_ref_initialized_) {
      speed_ref_rev_s_ = cam_speed;
      speed_ref_initialized_ = true;
    }
    const double a_ref = cfg_.speed_ref_lag_s > 0.0
                             ? 1.0 - std::exp(-dt_s / cfg_.speed_ref_lag_s)
                             : 1.0;
    speed_ref_rev_s_ += (cam_speed - speed_ref_rev_s_) * a_ref;
    refs.speed_rev_s = speed_ref_rev_s_;
  } else {
    refs.rba_deg = cam_->control_for_alpha(alpha_ref);
    refs.speed_rev_s = cfg_.n_rated_rev_s;
  }
  return refs;
}

}  // namespace hydrofcr
