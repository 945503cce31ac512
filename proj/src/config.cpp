#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

#include "hydrofcr/scenario.hpp"

// Strict configuration document: nested sections mirroring the module
// configs. Unknown keys are errors.

namespace hydrofcr {

namespace {

class Section {
 public:
  Section(const nlohmann::json& j, std::string path)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw std::runtime_error("config: section '" + path_ +
                               "' must be an object");
    }
  }

  ~Section() = default;

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw std::runtime_error("config: bad value for '" + path_ + "." + key +
                               "'");
    }
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const nlohmann::json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      (void)value;
      if (!seen_.count(key)) {
        throw std::runtime_error("config: unknown key '" + path_ + "." + key +
                                 "'");
      }
    }
  }

  const std::string& path() const { return path_; }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void parse_servo(Section& parent, const char* key, ServoConfig& s) {
  if (!parent.has(key)) return;
  Section sec(parent.raw(key), parent.path() + "." + key);
  sec.get("rate_limit_deg_s", s.rate_limit_deg_s);
  sec.get("time_constant_s", s.time_constant_s);
  sec.get("min_deg", s.min_deg);
  sec.get("max_deg", s.max_deg);
  sec.finish();
}

void parse_bess(Section& parent, const char* key, BessConfig& b) {
  if (!parent.has(key)) return;
  Section sec(parent.raw(key), parent.path() + "." + key);
  sec.get("p_rated_w", b.p_rated_w);
  sec.get("e_rated_wh", b.e_rated_wh);
  sec.get("eta_charge", b.eta_charge);
  sec.get("eta_discharge", b.eta_discharge);
  sec.get("soc_init", b.soc_init);
  sec.finish();
}

}  // namespace

StudyConfig study_config_from_json(const nlohmann::json& j) {
  StudyConfig cfg;
  Section root(j, "");

  if (root.has("scenario")) {
    Section s(root.raw("scenario"), "scenario");
    s.get("duration_s", cfg.duration_s);
    s.get("p_disp_w", cfg.p_disp_w);
    s.get("head_m", cfg.head_m);
    s.get("seed", cfg.seed);
    s.get("split_at_s", cfg.split_at_s);
    s.get("dt_s", cfg.dt_s);
    s.get("log_dt_s", cfg.log_dt_s);
    s.finish();
  }
  if (root.has("droop")) {
    Section s(root.raw("droop"), "droop");
    s.get("sigma_f_w_per_hz", cfg.droop.sigma_f_w_per_hz);
    s.get("dead_band_hz", cfg.droop.dead_band_hz);
    s.get("f_nominal_hz", cfg.droop.f_nominal_hz);
    s.finish();
  }
  if (root.has("hillchart")) {
    Section s(root.raw("hillchart"), "hillchart");
    auto& h = cfg.hillchart;
    s.get("eta_peak", h.eta_peak);
    s.get("alpha_bep_deg", h.alpha_bep_deg);
    s.get("beta_bep_deg", h.beta_bep_deg);
    s.get("alpha_max_deg", h.alpha_max_deg);
    s.get("beta_min_deg", h.beta_min_deg);
    s.get("beta_max_deg", h.beta_max_deg);
    s.get("alpha_shape", h.alpha_shape);
    s.get("beta_per_alpha", h.beta_per_alpha);
    s.get("speed_per_alpha", h.speed_per_alpha);
    s.get("mismatch_width_deg", h.mismatch_width_deg);
    s.get("speed_width", h.speed_width);
    s.get("q_beta_log_slope", h.q_beta_log_slope);
    s.get("q_ned_slope", h.q_ned_slope);
    s.get("blade_torque_ref_nm", h.blade_torque_ref_nm);
    s.get("blade_q_sensitivity", h.blade_q_sensitivity);
    s.get("blade_beta_slope", h.blade_beta_slope);
    s.get("blade_mismatch_quad", h.blade_mismatch_quad);
    s.get("blade_flow_per_ned", h.blade_flow_per_ned);
    s.get("specific_speed_target", h.specific_speed_target);
    s.get("runner_diameter_m", h.geometry.diameter_m);
    s.get("n_rated_rev_s", h.geometry.n_rated_rev_s);
    s.get("p_rated_w", h.geometry.p_rated_w);
    s.finish();
  }
  if (root.has("training")) {
    Section s(root.raw("training"), "training");
    s.get("noise_sd", cfg.training_noise_sd);
    s.get("speed_points", cfg.training_speed_points);
    s.finish();
  }
  if (root.has("surrogate")) {
    Section s(root.raw("surrogate"), "surrogate");
    s.get("max_terms", cfg.fit.max_terms);
    s.get("max_degree", cfg.fit.max_degree);
    s.get("gcv_penalty", cfg.fit.gcv_penalty);
    s.get("min_support", cfg.fit.min_support);
    s.get("cubic_eval", cfg.fit.cubic_eval);
    s.finish();
  }
  if (root.has("cam")) {
    Section s(root.raw("cam"), "cam");
    s.get("alpha_step_deg", cfg.cam.alpha_step_deg);
    s.get("coarse_step_deg", cfg.cam.coarse_step_deg);
    s.get("refine_tol_deg", cfg.cam.refine_tol_deg);
    s.get("speed_min_rpm", cfg.cam.speed_min_rpm);
    s.get("speed_max_rpm", cfg.cam.speed_max_rpm);
    s.finish();
  }
  if (root.has("plant")) {
    Section s(root.raw("plant"), "plant");
    parse_servo(s, "gvo_servo", cfg.plant.gvo);
    parse_servo(s, "rba_servo", cfg.plant.rba);
    s.get("speed_lag_s", cfg.plant.speed_lag_s);
    s.get("rotor_inertia_kgm2", cfg.plant.rotor_inertia_kgm2);
    s.get("eta_gen", cfg.plant.chain.eta_gen);
    s.get("eta_conv", cfg.plant.chain.eta_conv);
    s.finish();
  }
  if (root.has("controller")) {
    Section s(root.raw("controller"), "controller");
    s.get("kp_deg_per_w", cfg.pi.kp);
    s.get("ki_deg_per_ws", cfg.pi.ki);
    s.get("lp_cutoff_hz", cfg.hybrid.lp_cutoff_hz);
    s.get("lp_energy_ref_wh", cfg.hybrid.lp_energy_ref_wh);
    s.get("soc_target", cfg.hybrid.soc_target);
    s.get("recenter_period_s", cfg.hybrid.recenter_period_s);
    s.get("recenter_gain_w", cfg.hybrid.recenter_gain_w);
    s.get("assist_fraction", cfg.hybrid.assist_fraction);
    s.get("speed_ref_lag_s", cfg.speed_ref_lag_s);
    s.finish();
  }
  parse_bess(root, "bess5", cfg.bess5);
  parse_bess(root, "bess9", cfg.bess9);
  if (root.has("kpi")) {
    Section s(root.raw("kpi"), "kpi");
    s.get("warmup_s", cfg.kpi.warmup_s);
    s.get("averaging_s", cfg.kpi.averaging_s);
    s.get("eps_noise_deg", cfg.kpi.wear.eps_noise_deg);
    s.get("eps_move_deg", cfg.kpi.wear.eps_move_deg);
    s.get("rest_time_s", cfg.kpi.wear.rest_time_s);
    s.get("rbt_absolute", cfg.kpi.rbt_absolute);
    s.get("p_h_rated_w", cfg.kpi.p_h_rated_w);
    s.get("p_h_floor_frac", cfg.kpi.p_h_floor_frac);
    s.finish();
  }
  root.finish();
  cfg.validate();
  return cfg;
}

StudyConfig load_study_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("config: cannot open " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config: parse error in " + path + ": " +
                             e.what());
  }
  return study_config_from_json(j);
}

nlohmann::json study_config_to_json(const StudyConfig& cfg) {
  return nlohmann::json{
      {"scenario",
       {{"duration_s", cfg.duration_s},
        {"p_disp_w", cfg.p_disp_w},
        {"head_m", cfg.head_m},
        {"seed", cfg.seed},
        {"split_at_s", cfg.split_at_s},
        {"dt_s", cfg.dt_s},
        {"log_dt_s", cfg.log_dt_s}}},
      {"droop",
       {{"sigma_f_w_per_hz", cfg.droop.sigma_f_w_per_hz},
        {"dead_band_hz", cfg.droop.dead_band_hz},
        {"f_nominal_hz", cfg.droop.f_nominal_hz}}},
      {"hillchart",
       {{"eta_peak", cfg.hillchart.eta_peak},
        {"alpha_bep_deg", cfg.hillchart.alpha_bep_deg},
        {"beta_bep_deg", cfg.hillchart.beta_bep_deg},
        {"alpha_max_deg", cfg.hillchart.alpha_max_deg},
        {"beta_min_deg", cfg.hillchart.beta_min_deg},
        {"beta_max_deg", cfg.hillchart.beta_max_deg},
        {"alpha_shape", cfg.hillchart.alpha_shape},
        {"beta_per_alpha", cfg.hillchart.beta_per_alpha},
        {"speed_per_alpha", cfg.hillchart.speed_per_alpha},
        {"mismatch_width_deg", cfg.hillchart.mismatch_width_deg},
        {"speed_width", cfg.hillchart.speed_width},
        {"q_beta_log_slope", cfg.hillchart.q_beta_log_slope},
        {"q_ned_slope", cfg.hillchart.q_ned_slope},
        {"blade_torque_ref_nm", cfg.hillchart.blade_torque_ref_nm},
        {"blade_q_sensitivity", cfg.hillchart.blade_q_sensitivity},
        {"blade_beta_slope", cfg.hillchart.blade_beta_slope},
        {"blade_mismatch_quad", cfg.hillchart.blade_mismatch_quad},
        {"blade_flow_per_ned", cfg.hillchart.blade_flow_per_ned},
        {"specific_speed_target", cfg.hillchart.specific_speed_target},
        {"runner_diameter_m", cfg.hillchart.geometry.diameter_m},
        {"n_rated_rev_s", cfg.hillchart.geometry.n_rated_rev_s},
        {"p_rated_w", cfg.hillchart.geometry.p_rated_w}}},
      {"training",
       {{"noise_sd", cfg.training_noise_sd},
        {"speed_points", cfg.training_speed_points}}},
      {"surrogate",
       {{"max_terms", cfg.fit.max_terms},
        {"max_degree", cfg.fit.max_degree},
        {"gcv_penalty", cfg.fit.gcv_penalty},
        {"min_support", cfg.fit.min_support},
        {"cubic_eval", cfg.fit.cubic_eval}}},
      {"cam",
       {{"alpha_step_deg", cfg.cam.alpha_step_deg},
        {"coarse_step_deg", cfg.cam.coarse_step_deg},
        {"refine_tol_deg", cfg.cam.refine_tol_deg},
        {"speed_min_rpm", cfg.cam.speed_min_rpm},
        {"speed_max_rpm", cfg.cam.speed_max_rpm}}},
      {"plant",
       {{"gvo_servo",
         {{"rate_limit_deg_s", cfg.plant.gvo.rate_limit_deg_s},
          {"time_constant_s", cfg.plant.gvo.time_constant_s},
          {"min_deg", cfg.plant.gvo.min_deg},
          {"max_deg", cfg.plant.gvo.max_deg}}},
        {"rba_servo",
         {{"rate_limit_deg_s", cfg.plant.rba.rate_limit_deg_s},
          {"time_constant_s", cfg.plant.rba.time_constant_s},
          {"min_deg", cfg.plant.rba.min_deg},
          {"max_deg", cfg.plant.rba.max_deg}}},
        {"speed_lag_s", cfg.plant.speed_lag_s},
        {"rotor_inertia_kgm2", cfg.plant.rotor_inertia_kgm2},
        {"eta_gen", cfg.plant.chain.eta_gen},
        {"eta_conv", cfg.plant.chain.eta_conv}}},
      {"controller",
       {{"kp_deg_per_w", cfg.pi.kp},
        {"ki_deg_per_ws", cfg.pi.ki},
        {"lp_cutoff_hz", cfg.hybrid.lp_cutoff_hz},
        {"lp_energy_ref_wh", cfg.hybrid.lp_energy_ref_wh},
        {"soc_target", cfg.hybrid.soc_target},
        {"recenter_period_s", cfg.hybrid.recenter_period_s},
        {"recenter_gain_w", cfg.hybrid.recenter_gain_w},
        {"assist_fraction", cfg.hybrid.assist_fraction},
        {"speed_ref_lag_s", cfg.speed_ref_lag_s}}},
      {"bess5",
       {{"p_rated_w", cfg.bess5.p_rated_w},
        {"e_rated_wh", cfg.bess5.e_rated_wh},
        {"eta_charge", cfg.bess5.eta_charge},
        {"eta_discharge", cfg.bess5.eta_discharge},
        {"soc_init", cfg.bess5.soc_init}}},
      {"bess9",
       {{"p_rated_w", cfg.bess9.p_rated_w},
        {"e_rated_wh", cfg.bess9.e_rated_wh},
        {"eta_charge", cfg.bess9.eta_charge},
        {"eta_discharge", cfg.bess9.eta_discharge},
        {"soc_init", cfg.bess9.soc_init}}},
      {"kpi",
       {{"warmup_s", cfg.kpi.warmup_s},
        {"averaging_s", cfg.kpi.averaging_s},
        {"eps_noise_deg", cfg.kpi.wear.eps_noise_deg},
        {"eps_move_deg", cfg.kpi.wear.eps_move_deg},
        {"rest_time_s", cfg.kpi.wear.rest_time_s},
        {"rbt_absolute", cfg.kpi.rbt_absolute},
        {"p_h_rated_w", cfg.kpi.p_h_rated_w},
        {"p_h_floor_frac", cfg.kpi.p_h_floor_frac}}}};
}

}  // namespace hydrofcr
