#include "hydrofcr/core.hpp"

#include <cmath>
#include <stdexcept>

namespace hydrofcr {

void TurbineGeometry::validate() const {
  if (diameter_m <= 0.0) {
    throw std::invalid_argument("TurbineGeometry: diameter must be > 0");
  }
  if (n_rated_rev_s <= 0.0) {
    throw std::invalid_argument("TurbineGeometry: rated speed must be > 0");
  }
}

void DroopConfig::validate() const {
  if (sigma_f_w_per_hz <= 0.0) {
    throw std::invalid_argument("DroopConfig: droop must be > 0");
  }
  if (dead_band_hz < 0.0) {
    throw std::invalid_argument("DroopConfig: dead band must be >= 0");
  }
}

double speed_coefficient(double n_rev_s, double diameter_m, double head_m) {
  if (head_m <= 0.0) {
    throw std::domain_error("speed_coefficient: head must be > 0");
  }
  if (diameter_m <= 0.0) {
    throw std::domain_error("speed_coefficient: diameter must be > 0");
  }
  return n_rev_s * diameter_m / std::sqrt(constants::gravity_m_s2 * head_m);
}

double specific_speed(double omega_rad_s, double q_m3s, double e_j_kg) {
  if (e_j_kg <= 0.0) {
    throw std::domain_error("specific_speed: specific energy must be > 0");
  }
  if (q_m3s < 0.0) {
    throw std::invalid_argument("specific_speed: discharge must be >= 0");
  }
  return omega_rad_s * std::sqrt(q_m3s) /
         (std::sqrt(std::numbers::pi) * std::pow(2.0 * e_j_kg, 0.75));
}

double fcr_setpoint(double p_disp_w, double f_hz, const DroopConfig& droop) {
  const double deviation = droop.f_nominal_hz - f_hz;
  if (std::abs(deviation) <= droop.dead_band_hz) {
    return p_disp_w;
  }
  return p_disp_w + deviation * droop.sigma_f_w_per_hz;
}

double hydraulic_power(double q_m3s, double head_m) {
  return constants::water_density_kg_m3 * constants::gravity_m_s2 * q_m3s *
         head_m;
}

double mechanical_power(double torque_nm, double omega_rad_s) {
  return torque_nm * omega_rad_s;
}

EfficiencyRatios efficiency_ratios(double p_pcc_w, double p_m_w, double p_h_w) {
  if (p_h_w <= 0.0) {
    throw std::domain_error("efficiency_ratios: hydraulic power must be > 0");
  }
  return EfficiencyRatios{p_pcc_w / p_h_w, p_m_w / p_h_w};
}

}  // namespace hydrofcr
