#pragma once

// Domain types, physical constants and the closed-form relations shared by
// every other module. Speeds are stored in rev/s throughout the library;
// conversions from min^-1 happen only at I/O boundaries.

#include <numbers>
#include <utility>

namespace hydrofcr {

namespace constants {
inline constexpr double water_density_kg_m3 = 1000.0;
inline constexpr double gravity_m_s2 = 9.81;
}  // namespace constants

struct PhysicalConstants {
  double rho = constants::water_density_kg_m3;
  double g = constants::gravity_m_s2;
};

/// Reduced-scale Kaplan runner geometry and ratings.
struct TurbineGeometry {
  double diameter_m = 0.34;
  double n_rated_rev_s = 25.0;  // 1500 min^-1
  double p_rated_w = 50000.0;

  void validate() const;
};

/// Instantaneous hydraulic operating point.
struct OperatingPoint {
  double alpha_deg = 0.0;  // guide-vane opening
  double beta_deg = 0.0;   // runner-blade angle
  double n_rev_s = 0.0;    // rotational speed
  double head_m = 0.0;     // net head
  double q_m3s = 0.0;      // discharge
};

/// Frequency-droop characteristic of the governing system.
struct DroopConfig {
  double sigma_f_w_per_hz = 125000.0;
  double dead_band_hz = 0.002;
  double f_nominal_hz = 50.0;

  void validate() const;
};

// Unit helpers (I/O boundary conversions).
inline constexpr double rpm_to_rev_s(double rpm) { return rpm / 60.0; }
inline constexpr double rev_s_to_rpm(double rev_s) { return rev_s * 60.0; }
inline constexpr double rev_s_to_rad_s(double rev_s) {
  return rev_s * 2.0 * std::numbers::pi;
}
inline constexpr double deg_to_rad(double deg) {
  return deg * std::numbers::pi / 180.0;
}

/// IEC dimensionless speed coefficient n_ED = n*D/sqrt(g*H), n in s^-1.
/// Throws std::domain_error for non-positive head or diameter.
double speed_coefficient(double n_rev_s, double diameter_m, double head_m);

/// Dimensionless specific speed v = omega*sqrt(Q)/(sqrt(pi)*(2E)^(3/4)),
/// omega in rad/s, E = g*H in J/kg. Throws std::domain_error for E <= 0
/// and std::invalid_argument for negative discharge.
double specific_speed(double omega_rad_s, double q_m3s, double e_j_kg);

/// FCR power set-point: dispatch plus droop response to the frequency
/// deviation, with a hard dead band applied to the deviation first.
double fcr_setpoint(double p_disp_w, double f_hz, const DroopConfig& droop);

/// Hydraulic power rho*g*Q*H.
double hydraulic_power(double q_m3s, double head_m);

/// Mechanical power T*omega, omega in rad/s.
double mechanical_power(double torque_nm, double omega_rad_s);

struct EfficiencyRatios {
  double eta_g;  // global: P_pcc / P_h
  double eta_h;  // hydraulic: P_m / P_h
};

/// Global and hydraulic efficiency from PCC, mechanical and hydraulic power.
/// Throws std::domain_error when p_h <= 0.
EfficiencyRatios efficiency_ratios(double p_pcc_w, double p_m_w, double p_h_w);

}  // namespace hydrofcr
