#pragma once

// Scenario orchestration: builds the study artifacts (chart, surrogate, CAM
// tables), runs the four test configurations against a common frequency
// series, and assembles the comparison table.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hydrofcr/cam.hpp"
#include "hydrofcr/control.hpp"
#include "hydrofcr/core.hpp"
#include "hydrofcr/frequency.hpp"
#include "hydrofcr/hillchart.hpp"
#include "hydrofcr/kpi.hpp"
#include "hydrofcr/plant.hpp"
#include "hydrofcr/surrogate.hpp"

namespace hydrofcr {

enum class ScenarioMode { OnlyHydro, Bess5, Bess9, VarSpeed };

std::string to_string(ScenarioMode mode);
ScenarioMode scenario_mode_from_string(const std::string& name);
std::vector<ScenarioMode> all_scenario_modes();

struct StudyConfig {
  StudyConfig() {
    // Study-level fitting defaults: a larger term budget and the C1
    // evaluation localize the efficiency ridge to the tolerance the CAM
    // construction needs; the library-level FitConfig default stays
    // piecewise-linear.
    fit.max_terms = 60;
    fit.cubic_eval = true;
  }

  double duration_s = 43200.0;
  double p_disp_w = 27000.0;
  double head_m = 10.0;
  uint64_t seed = 42;
  double split_at_s = 28800.0;  // synthetic frequency event, 8 h in
  double dt_s = 0.02;           // simulation step (50 Hz reporting rate)
  double log_dt_s = 1.0;        // hydraulic logging rate

  DroopConfig droop{};
  HillChartConfig hillchart{};
  double training_noise_sd = 0.003;
  int training_speed_points = 11;  // grid levels across the speed range
  FitConfig fit{};
  CamBuildConfig cam{};
  PlantConfig plant{};  // mode/bess/head/dt are filled in per scenario
  PiGains pi{};
  double speed_ref_lag_s = 15.0;  // VarSpeed speed-schedule trim filter
  HybridSplitConfig hybrid{};  // recenter_gain_w <= 0 resolves to 2x rating
  KpiConfig kpi{};
  BessConfig bess5{5000.0, 5000.0, 0.95, 0.95, 0.5};
  BessConfig bess9{9000.0, 9000.0, 0.95, 0.95, 0.5};

  void validate() const;
};

/// Everything derived from the configuration that the four scenarios share.
struct StudyArtifacts {
  GroundTruthHillChart chart;
  std::vector<HillChartSample> training;
  EfficiencySurrogate surrogate;
  CamTable kaplan_cam;
  CamTable varspeed_cam;
  SetpointMap kaplan_map;
  SetpointMap varspeed_map;
};

StudyArtifacts build_study_artifacts(const StudyConfig& cfg);

struct ScenarioResult {
  Trace trace;
  KpiReport kpi;
};

/// Steps the plant/controller loop at dt, logging at the 1 Hz rate, and
/// computes the KPI report. Fully deterministic.
ScenarioResult run_scenario(const StudyConfig& cfg, ScenarioMode mode,
                            const FrequencySeries& freq,
                            const StudyArtifacts& art);

/// Runs the requested modes (one thread each) against the identical
/// frequency series object.
std::map<ScenarioMode, ScenarioResult> run_batch(
    const StudyConfig& cfg, const std::vector<ScenarioMode>& modes,
    const FrequencySeries& freq, const StudyArtifacts& art);

struct ComparisonRow {
  std::string mode;
  KpiReport kpi;
  // Percent deltas vs the baseline; NaN when the baseline value is zero.
  double rms_te_pct = 0.0;
  double mileage_gvo_pct = 0.0;
  double mileage_rba_pct = 0.0;
  double nom_gvo_pct = 0.0;
  double nom_rba_pct = 0.0;
  double rbt_p95_pct = 0.0;
  double mean_eta_h_pct = 0.0;
  double mean_eta_g_pct = 0.0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;  // baseline first
  std::string to_text() const;
  std::string to_csv() const;
};

/// Absolute values plus percent deltas against the OnlyHydro baseline.
/// Throws std::invalid_argument when the baseline report is missing.
ComparisonTable compare_scenarios(
    const std::map<ScenarioMode, KpiReport>& reports);

void write_trace_csv(const std::string& path, const Trace& trace);
Trace read_trace_csv(const std::string& path);
void write_kpi_json(const std::string& path, const KpiReport& report);
KpiReport read_kpi_json(const std::string& path);

// Strict configuration document handling (config.cpp). Unknown keys raise
// std::runtime_error naming the key path.
StudyConfig load_study_config(const std::string& path);
StudyConfig study_config_from_json(const nlohmann::json& j);
nlohmann::json study_config_to_json(const StudyConfig& cfg);

}  // namespace hydrofcr
