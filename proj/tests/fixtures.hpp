#pragma once

// Shared expensive fixtures (ground truth, fitted surrogate, CAM tables)
// built once per test binary. Everything here is deterministic.

#include "hydrofcr/cam.hpp"
#include "hydrofcr/hillchart.hpp"
#include "hydrofcr/surrogate.hpp"

namespace hydrofcr::testing {

inline const GroundTruthHillChart& chart() {
  static GroundTruthHillChart c{};
  return c;
}

inline const std::vector<HillChartSample>& noisy_samples() {
  static auto s =
      generate_training_set(chart(), GridSpec::paper(chart()), 0.003, 42);
  return s;
}

inline FitConfig study_fit_config() {
  FitConfig cfg;
  cfg.max_terms = 60;
  cfg.cubic_eval = true;
  return cfg;
}

/// Production-configured surrogate (60 terms, C1 evaluation).
inline const EfficiencySurrogate& model() {
  static EfficiencySurrogate m =
      fit_surrogate(noisy_samples(), study_fit_config());
  return m;
}

/// Piecewise-linear copy of the same fit.
inline const EfficiencySurrogate& pl_model() {
  static EfficiencySurrogate m = [] {
    EfficiencySurrogate copy = model();
    copy.set_cubic_eval(false);
    return copy;
  }();
  return m;
}

inline const CamTable& kaplan_cam() {
  static CamTable t = build_kaplan_cam(model(), chart(), 10.0, 25.0);
  return t;
}

inline const CamTable& varspeed_cam() {
  static CamTable t = build_varspeed_cam(model(), chart(), 10.0, 18.0);
  return t;
}

inline const SetpointMap& kaplan_map() {
  static SetpointMap m(kaplan_cam());
  return m;
}

inline const SetpointMap& varspeed_map() {
  static SetpointMap m(varspeed_cam());
  return m;
}

}  // namespace hydrofcr::testing
