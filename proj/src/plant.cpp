#include "hydrofcr/plant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hydrofcr {

ServoState step_servo(const ServoConfig& cfg, ServoState s, double ref_deg,
                      double dt_s) {
  if (dt_s <= 0.0) throw std::invalid_argument("step_servo: dt must be > 0");
  const double target = std::clamp(ref_deg, cfg.min_deg, cfg.max_deg);
  // First-order lag, exact discretization.
  const double a = cfg.time_constant_s > 0.0
                       ? 1.0 - std::exp(-dt_s / cfg.time_constant_s)
                       : 1.0;
  double next = s.position_deg + (target - s.position_deg) * a;
  const double max_move = cfg.rate_limit_deg_s * dt_s;
  next = std::clamp(next, s.position_deg - max_move, s.position_deg + max_move);
  next = std::clamp(next, cfg.min_deg, cfg.max_deg);
  return ServoState{next};
}

void BessConfig::validate() const {
  if (p_rated_w < 0.0 || e_rated_wh < 0.0) {
    throw std::invalid_argument("BessConfig: negative rating");
  }
  if (eta_charge <= 0.0 || eta_charge > 1.0 || eta_discharge <= 0.0 ||
      eta_discharge > 1.0) {
    throw std::invalid_argument("BessConfig: efficiencies must be in (0,1]");
  }
  if (soc_init < 0.0 || soc_init > 1.0) {
    throw std::invalid_argument("BessConfig: soc_init must be in [0,1]");
  }
}

BessStep step_bess(const BessConfig& cfg, double soc, double p_cmd_w,
                   double dt_s) {
  if (dt_s <= 0.0) throw std::invalid_argument("step_bess: dt must be > 0");
  if (!(soc >= 0.0 && soc <= 1.0)) {
    throw std::invalid_argument("step_bess: soc out of [0,1]");
  }
  if (!cfg.enabled()) {
    return BessStep{soc, 0.0, p_cmd_w != 0.0};
  }

  double p = std::clamp(p_cmd_w, -cfg.p_rated_w, cfg.p_rated_w);

  // SoC feasibility bounds for this step.
  const double ws_per_soc = 3600.0 * cfg.e_rated_wh;  // J per unit SoC
  const double max_discharge = soc * ws_per_soc * cfg.eta_discharge / dt_s;
  const double max_charge = (1.0 - soc) * ws_per_soc / (cfg.eta_charge * dt_s);
  p = std::clamp(p, -max_charge, max_discharge);

  double soc_next;
  if (p >= 0.0) {
    soc_next = soc - p * dt_s / (ws_per_soc * cfg.eta_discharge);
  } else {
    soc_next = soc - p * cfg.eta_charge * dt_s / ws_per_soc;
  }
  soc_next = std::clamp(soc_next, 0.0, 1.0);
  return BessStep{soc_next, p, p != p_cmd_w};
}

double electrical_power(double p_m_w, DriveMode mode,
                        const ElectricalChain& chain) {
  const double gen = p_m_w * chain.eta_gen;
  return mode == DriveMode::VarSpeed ? gen * chain.eta_conv : gen;
}

Plant::Plant(PlantConfig cfg, const GroundTruthHillChart* chart)
    : cfg_(cfg), chart_(chart) {
  if (chart_ == nullptr) throw std::invalid_argument("Plant: null chart");
  if (cfg_.head_m <= 0.0) throw std::invalid_argument("Plant: head");
  cfg_.bess.validate();
  state_.head_m = cfg_.head_m;
  state_.soc = cfg_.bess.soc_init;
}

void Plant::init_steady(double alpha_deg, double beta_deg, double n_rev_s,
                        double soc) {
  state_ = PlantState{};
  state_.gvo_deg = std::clamp(alpha_deg, cfg_.gvo.min_deg, cfg_.gvo.max_deg);
  state_.rba_deg = std::clamp(beta_deg, cfg_.rba.min_deg, cfg_.rba.max_deg);
  state_.n_rev_s = n_rev_s;
  state_.head_m = cfg_.head_m;
  state_.soc = soc;
  update_hydraulics(n_rev_s, cfg_.dt_s);
  state_.p_pcc_w = state_.p_hydro_elec_w;
}

void Plant::update_hydraulics(double n_prev_rev_s, double dt_s) {
  const auto& geom = chart_->config().geometry;
  const double ned =
      speed_coefficient(state_.n_rev_s, geom.diameter_m, state_.head_m);
  const auto point = chart_->eval(state_.gvo_deg, state_.rba_deg, ned);
  state_.q_m3s = point.q_ed * geom.diameter_m * geom.diameter_m *
                 std::sqrt(constants::gravity_m_s2 * state_.head_m);
  state_.p_h_w = hydraulic_power(state_.q_m3s, state_.head_m);
  state_.eta_h = point.eta;

  const double p_m_hydro = point.eta * state_.p_h_w;
  const double omega = rev_s_to_rad_s(state_.n_rev_s);
  const double t_hydro = omega > 1e-9 ? p_m_hydro / omega : 0.0;

  // Shaft torque as measured between runner and generator: the hydraulic
  // torque minus what accelerates the rotating masses.
  const double omega_dot =
      rev_s_to_rad_s(state_.n_rev_s - n_prev_rev_s) / dt_s;
  state_.t_shaft_nm = t_hydro - cfg_.rotor_inertia_kgm2 * omega_dot;
  state_.p_m_w = mechanical_power(state_.t_shaft_nm, omega);
  state_.t_blade_nm =
      chart_->blade_torque(state_.gvo_deg, state_.rba_deg, ned, state_.head_m);
  state_.p_hydro_elec_w = electrical_power(state_.p_m_w, cfg_.mode, cfg_.chain);
}

const PlantState& Plant::step(const ActuatorRefs& refs, double dt_s) {
  state_.gvo_deg =
      step_servo(cfg_.gvo, ServoState{state_.gvo_deg}, refs.gvo_deg, dt_s)
          .position_deg;
  state_.rba_deg =
      step_servo(cfg_.rba, ServoState{state_.rba_deg}, refs.rba_deg, dt_s)
          .position_deg;

  const double n_prev = state_.n_rev_s;
  if (cfg_.mode == DriveMode::VarSpeed) {
    const double a = cfg_.speed_lag_s > 0.0
                         ? 1.0 - std::exp(-dt_s / cfg_.speed_lag_s)
                         : 1.0;
    state_.n_rev_s += (refs.speed_rev_s - state_.n_rev_s) * a;
  } else {
    state_.n_rev_s = refs.speed_rev_s;
  }

  update_hydraulics(n_prev, dt_s);

  const auto bess = step_bess(cfg_.bess, state_.soc, refs.p_bess_w, dt_s);
  state_.soc = bess.soc;
  state_.p_bess_w = bess.p_actual_w;
  state_.bess_clamped = bess.clamped;
  state_.p_pcc_w = state_.p_hydro_elec_w + state_.p_bess_w;
  return state_;
}

}  // namespace hydrofcr
