#pragma once

// Key performance indicators computed from logged scenario traces: FCR
// tracking quality, servomotor wear metrics, blade-torque derivative CDF and
// efficiency statistics. All pure functions of the trace.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace hydrofcr {

/// Time-indexed channels at the logging rate (1 Hz by default).
struct Trace {
  double dt_s = 1.0;
  std::vector<double> time_s;
  std::vector<double> f_hz;
  std::vector<double> p_set_w;
  std::vector<double> p_pcc_w;
  std::vector<double> gvo_deg;
  std::vector<double> rba_deg;
  std::vector<double> t_blade_nm;
  std::vector<double> q_m3s;
  std::vector<double> head_m;
  std::vector<double> t_shaft_nm;
  std::vector<double> n_rev_s;
  std::vector<double> soc;
  std::vector<double> p_m_w;
  std::vector<double> p_h_w;
  std::vector<double> p_bess_w;

  std::size_t size() const { return time_s.size(); }
  void validate() const;  // equal lengths, uniform step
};

/// TE_k = p_set_k - p_pcc_k (plant underproduction positive).
std::vector<double> tracking_error(const Trace& trace);

/// RMS of per-bin means over [k1, k2): the window is partitioned into bins
/// of averaging_s seconds, a trailing partial bin is dropped.
double rms_te(std::span<const double> te, std::size_t k1, std::size_t k2,
              double averaging_s = 60.0, double dt_s = 1.0);

struct WearConfig {
  double eps_noise_deg = 0.005;  // mileage increments below this are ignored
  double eps_move_deg = 0.01;    // movement onset / reversal threshold
  double rest_time_s = 1.0;      // dwell required to count as at rest
};

/// Total variation of the position sequence, ignoring sub-noise increments.
double mileage(std::span<const double> position_deg,
               double eps_noise_deg = 0.005);

/// Number of distinct movements: onsets out of a rest state plus direction
/// reversals larger than the movement threshold.
long number_of_movements(std::span<const double> position_deg,
                         const WearConfig& cfg = {}, double dt_s = 1.0);

/// Central finite differences of the blade torque (one-sided endpoints are
/// omitted), optionally as absolute values, sorted ascending.
std::vector<double> rbt_derivative_samples(std::span<const double> t_blade_nm,
                                           double dt_s, bool absolute = true);

/// Empirical quantile of a sorted sample set (inverse CDF, type 1).
double percentile(std::span<const double> sorted_samples, double p);

struct EfficiencyStats {
  std::vector<double> eta_h;
  std::vector<double> eta_g;
  double mean_eta_h = 0.0;  // samples below the hydraulic-power floor excluded
  double mean_eta_g = 0.0;
};

EfficiencyStats efficiency_series(const Trace& trace, double p_h_floor_w);

struct KpiConfig {
  double warmup_s = 120.0;
  double averaging_s = 60.0;
  WearConfig wear{};
  bool rbt_absolute = true;
  double p_h_rated_w = 137340.0;  // rho*g*Q_max*H_ref at rig limits
  double p_h_floor_frac = 0.01;
  int cdf_quantiles = 101;
};

struct KpiReport {
  std::string mode;
  double rms_te_w = 0.0;
  double mileage_gvo_deg = 0.0;
  double mileage_rba_deg = 0.0;
  long nom_gvo = 0;
  long nom_rba = 0;
  std::vector<double> rbt_cdf_quantiles;  // |dRBT/dt| quantile sketch
  double rbt_p95_nms = 0.0;
  double mean_eta_h = 0.0;
  double mean_eta_g = 0.0;

  nlohmann::json to_json() const;
  static KpiReport from_json(const nlohmann::json& j);
};

KpiReport compute_kpis(const Trace& trace, const KpiConfig& cfg = {});

}  // namespace hydrofcr
