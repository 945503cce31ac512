#pragma once

// Grid-frequency input handling: CSV ingestion with strict validation and a
// synthetic two-regime generator (routine wander followed by a split event
// with partial recovery and elevated variance).

#include <cstdint>
#include <string>
#include <vector>

namespace hydrofcr {

struct FrequencySeries {
  double dt_s = 1.0;
  double t0_s = 0.0;
  std::vector<double> f_hz;

  double duration_s() const { return f_hz.size() * dt_s; }

  /// Zero-order hold lookup at an arbitrary time.
  double at(double t_s) const;

  void validate() const;  // sanity band and non-emptiness
};

inline constexpr double kFrequencyBandLo = 45.0;
inline constexpr double kFrequencyBandHi = 55.0;

/// Parses `time_s,frequency_hz`. Malformed rows, a non-uniform step or
/// out-of-band values raise std::runtime_error naming the offending line.
FrequencySeries load_frequency_csv(const std::string& path);

void write_frequency_csv(const std::string& path, const FrequencySeries& fs);

struct FrequencySynthConfig {
  double dt_s = 1.0;
  // Routine regime: a slow wander plus a smoothed fast component.
  double slow_sd_hz = 0.014;
  double slow_tau_s = 1200.0;
  double fast_sd_hz = 0.014;
  double fast_tau_s = 90.0;
  double smooth_tau_s = 20.0;
  // Split event.
  double event_step_hz = -0.15;
  double event_residual_hz = -0.03;
  double event_recovery_tau_s = 220.0;
  double post_split_sd_scale = 1.6;
};

/// Deterministic per seed. The event lands at split_at_s; disturbances after
/// it keep an elevated variance.
FrequencySeries synthesize_frequency(uint64_t seed, double duration_s,
                                     double split_at_s,
                                     const FrequencySynthConfig& cfg = {});

}  // namespace hydrofcr
