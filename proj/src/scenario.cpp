#include "hydrofcr/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace hydrofcr {

std::string to_string(ScenarioMode mode) {
  switch (mode) {
    case ScenarioMode::OnlyHydro: return "only_hydro";
    case ScenarioMode::Bess5: return "bess_5kw";
    case ScenarioMode::Bess9: return "bess_9kw";
    case ScenarioMode::VarSpeed: return "varspeed";
  }
  throw std::logic_error("unknown scenario mode");
}

ScenarioMode scenario_mode_from_string(const std::string& name) {
  if (name == "only_hydro") return ScenarioMode::OnlyHydro;
  if (name == "bess_5kw") return ScenarioMode::Bess5;
  if (name == "bess_9kw") return ScenarioMode::Bess9;
  if (name == "varspeed") return ScenarioMode::VarSpeed;
  throw std::invalid_argument("unknown scenario mode: " + name);
}

std::vector<ScenarioMode> all_scenario_modes() {
  return {ScenarioMode::OnlyHydro, ScenarioMode::Bess5, ScenarioMode::Bess9,
          ScenarioMode::VarSpeed};
}

void StudyConfig::validate() const {
  if (duration_s <= 0.0) throw std::invalid_argument("config: duration");
  if (dt_s <= 0.0 || log_dt_s < dt_s) throw std::invalid_argument("config: steps");
  if (head_m <= 0.0) throw std::invalid_argument("config: head");
  droop.validate();
  bess5.validate();
  bess9.validate();
}

StudyArtifacts build_study_artifacts(const StudyConfig& cfg) {
  cfg.validate();
  GroundTruthHillChart chart(cfg.hillchart);
  GridSpec grid = GridSpec::paper(chart);
  if (cfg.training_speed_points >= 2) {
    grid.ned_count = cfg.training_speed_points;
  }
  auto training =
      generate_training_set(chart, grid, cfg.training_noise_sd, cfg.seed);
  auto surrogate = fit_surrogate(training, cfg.fit);
  auto kaplan = build_kaplan_cam(surrogate, chart, cfg.head_m,
                                 cfg.hillchart.geometry.n_rated_rev_s, cfg.cam);
  auto varspeed = build_varspeed_cam(surrogate, chart, cfg.head_m,
                                     cfg.hillchart.beta_bep_deg, cfg.cam);
  SetpointMap kmap(kaplan);
  SetpointMap vmap(varspeed);
  return StudyArtifacts{std::move(chart),     std::move(training),
                        std::move(surrogate), std::move(kaplan),
                        std::move(varspeed),  std::move(kmap),
                        std::move(vmap)};
}

namespace {

const BessConfig& bess_for(const StudyConfig& cfg, ScenarioMode mode) {
  static const BessConfig none{};
  switch (mode) {
    case ScenarioMode::Bess5: return cfg.bess5;
    case ScenarioMode::Bess9: return cfg.bess9;
    default: return none;
  }
}

}  // namespace

ScenarioResult run_scenario(const StudyConfig& cfg, ScenarioMode mode,
                            const FrequencySeries& freq,
                            const StudyArtifacts& art) {
  cfg.validate();
  freq.validate();
  if (freq.duration_s() + 1e-6 < cfg.duration_s) {
    throw std::invalid_argument(
        "run_scenario: frequency series shorter than the scenario");
  }

  const bool varspeed = mode == ScenarioMode::VarSpeed;
  const CamTable& cam = varspeed ? art.varspeed_cam : art.kaplan_cam;
  const SetpointMap& map = varspeed ? art.varspeed_map : art.kaplan_map;

  PlantConfig pc = cfg.plant;
  pc.mode = varspeed ? DriveMode::VarSpeed : DriveMode::Fixed;
  pc.bess = bess_for(cfg, mode);
  pc.head_m = cfg.head_m;
  pc.dt_s = cfg.dt_s;

  GovernorConfig gc;
  gc.mode = varspeed ? GovernorMode::VarSpeed
                     : (pc.bess.enabled() ? GovernorMode::HybridBess
                                          : GovernorMode::OnlyHydro);
  gc.droop = cfg.droop;
  gc.pi = cfg.pi;
  gc.hybrid = cfg.hybrid;
  gc.n_rated_rev_s = cfg.hillchart.geometry.n_rated_rev_s;
  gc.beta_fixed_deg = cfg.hillchart.beta_bep_deg;
  gc.speed_ref_lag_s = cfg.speed_ref_lag_s;
  gc.bess_p_rated_w = pc.bess.p_rated_w;
  gc.bess_e_rated_wh = pc.bess.e_rated_wh;

  Plant plant(pc, &art.chart);
  Governor gov(gc, &cam, &map);

  // Settle at the initial set-point.
  const double f0 = freq.at(0.0);
  const double p_set0 = fcr_setpoint(cfg.p_disp_w, f0, cfg.droop);
  const double hydro_target0 = p_set0;  // battery starts balanced
  const double alpha0 = map.alpha_for_power(hydro_target0);
  const double beta0 =
      varspeed ? cfg.hillchart.beta_bep_deg : cam.control_for_alpha(alpha0);
  const double n0 =
      varspeed ? cam.control_for_alpha(alpha0) : gc.n_rated_rev_s;
  plant.init_steady(alpha0, beta0, n0, pc.bess.soc_init);
  gov.init_steady(p_set0);

  const long steps = std::lround(cfg.duration_s / cfg.dt_s);
  const long log_every = std::lround(cfg.log_dt_s / cfg.dt_s);
  const std::size_t n_rows =
      static_cast<std::size_t>((steps + log_every - 1) / log_every);

  Trace trace;
  trace.dt_s = cfg.log_dt_s;
  auto reserve_all = [&](auto&... vs) { (vs.reserve(n_rows), ...); };
  reserve_all(trace.time_s, trace.f_hz, trace.p_set_w, trace.p_pcc_w,
              trace.gvo_deg, trace.rba_deg, trace.t_blade_nm, trace.q_m3s,
              trace.head_m, trace.t_shaft_nm, trace.n_rev_s, trace.soc,
              trace.p_m_w, trace.p_h_w, trace.p_bess_w);

  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt_s;
    const double f = freq.at(t);
    const ActuatorRefs refs =
        gov.step(f, cfg.p_disp_w, plant.state(), t, cfg.dt_s);
    if (k % log_every == 0) {
      const PlantState& s = plant.state();
      trace.time_s.push_back(t);
      trace.f_hz.push_back(f);
      trace.p_set_w.push_back(gov.last_p_set_w());
      trace.p_pcc_w.push_back(s.p_pcc_w);
      trace.gvo_deg.push_back(s.gvo_deg);
      trace.rba_deg.push_back(s.rba_deg);
      trace.t_blade_nm.push_back(s.t_blade_nm);
      trace.q_m3s.push_back(s.q_m3s);
      trace.head_m.push_back(s.head_m);
      trace.t_shaft_nm.push_back(s.t_shaft_nm);
      trace.n_rev_s.push_back(s.n_rev_s);
      trace.soc.push_back(s.soc);
      trace.p_m_w.push_back(s.p_m_w);
      trace.p_h_w.push_back(s.p_h_w);
      trace.p_bess_w.push_back(s.p_bess_w);
    }
    plant.step(refs, cfg.dt_s);
  }

  ScenarioResult result;
  result.trace = std::move(trace);
  result.kpi = compute_kpis(result.trace, cfg.kpi);
  result.kpi.mode = to_string(mode);
  return result;
}

std::map<ScenarioMode, ScenarioResult> run_batch(
    const StudyConfig& cfg, const std::vector<ScenarioMode>& modes,
    const FrequencySeries& freq, const StudyArtifacts& art) {
  std::map<ScenarioMode, ScenarioResult> results;
  for (ScenarioMode m : modes) results[m] = ScenarioResult{};

  std::vector<std::thread> workers;
  std::vector<std::string> errors(modes.size());
  workers.reserve(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    workers.emplace_back([&, i] {
      try {
        results[modes[i]] = run_scenario(cfg, modes[i], freq, art);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error("run_batch: " + e);
  }
  return results;
}

// ---------------------------------------------------------------------------
// Comparison table
// ---------------------------------------------------------------------------

namespace {

double pct_delta(double value, double base) {
  if (base == 0.0) {
    return value == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  }
  return 100.0 * (value - base) / base;
}

std::string fmt_pct(double pct) {
  if (std::isnan(pct)) return "   n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+6.1f%%", pct);
  return buf;
}

}  // namespace

ComparisonTable compare_scenarios(
    const std::map<ScenarioMode, KpiReport>& reports) {
  const auto base_it = reports.find(ScenarioMode::OnlyHydro);
  if (base_it == reports.end()) {
    throw std::invalid_argument("compare_scenarios: baseline (only_hydro) missing");
  }
  const KpiReport& base = base_it->second;

  ComparisonTable table;
  for (ScenarioMode m : all_scenario_modes()) {
    const auto it = reports.find(m);
    if (it == reports.end()) continue;
    const KpiReport& k = it->second;
    ComparisonRow row;
    row.mode = to_string(m);
    row.kpi = k;
    row.rms_te_pct = pct_delta(k.rms_te_w, base.rms_te_w);
    row.mileage_gvo_pct = pct_delta(k.mileage_gvo_deg, base.mileage_gvo_deg);
    row.mileage_rba_pct = pct_delta(k.mileage_rba_deg, base.mileage_rba_deg);
    row.nom_gvo_pct = pct_delta(static_cast<double>(k.nom_gvo),
                                static_cast<double>(base.nom_gvo));
    row.nom_rba_pct = pct_delta(static_cast<double>(k.nom_rba),
                                static_cast<double>(base.nom_rba));
    row.rbt_p95_pct = pct_delta(k.rbt_p95_nms, base.rbt_p95_nms);
    row.mean_eta_h_pct = pct_delta(k.mean_eta_h, base.mean_eta_h);
    row.mean_eta_g_pct = pct_delta(k.mean_eta_g, base.mean_eta_g);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string ComparisonTable::to_text() const {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-12s %18s %22s %14s %22s %14s %18s %10s %10s\n",
                "mode", "rms_te_w", "gvo_mileage_deg", "gvo_nom",
                "rba_mileage_deg", "rba_nom", "rbt_p95_nms", "eta_h", "eta_g");
  os << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%-12s %9.1f (%s) %13.2f (%s) %5ld (%s) %13.2f (%s) %5ld (%s) %9.3f (%s) %10.4f %10.4f\n",
                  r.mode.c_str(), r.kpi.rms_te_w, fmt_pct(r.rms_te_pct).c_str(),
                  r.kpi.mileage_gvo_deg, fmt_pct(r.mileage_gvo_pct).c_str(),
                  r.kpi.nom_gvo, fmt_pct(r.nom_gvo_pct).c_str(),
                  r.kpi.mileage_rba_deg, fmt_pct(r.mileage_rba_pct).c_str(),
                  r.kpi.nom_rba, fmt_pct(r.nom_rba_pct).c_str(),
                  r.kpi.rbt_p95_nms, fmt_pct(r.rbt_p95_pct).c_str(),
                  r.kpi.mean_eta_h, r.kpi.mean_eta_g);
    os << buf;
  }
  return os.str();
}

std::string ComparisonTable::to_csv() const {
  std::ostringstream os;
  os << "mode,rms_te_w,rms_te_pct,mileage_gvo_deg,mileage_gvo_pct,"
        "nom_gvo,nom_gvo_pct,mileage_rba_deg,mileage_rba_pct,"
        "nom_rba,nom_rba_pct,rbt_p95_nms,rbt_p95_pct,"
        "mean_eta_h,mean_eta_h_pct,mean_eta_g,mean_eta_g_pct\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%.17g,%.6g,%.17g,%.6g,%ld,%.6g,%.17g,%.6g,%ld,%.6g,"
                  "%.17g,%.6g,%.17g,%.6g,%.17g,%.6g\n",
                  r.mode.c_str(), r.kpi.rms_te_w, r.rms_te_pct,
                  r.kpi.mileage_gvo_deg, r.mileage_gvo_pct, r.kpi.nom_gvo,
                  r.nom_gvo_pct, r.kpi.mileage_rba_deg, r.mileage_rba_pct,
                  r.kpi.nom_rba, r.nom_rba_pct, r.kpi.rbt_p95_nms,
                  r.rbt_p95_pct, r.kpi.mean_eta_h, r.mean_eta_h_pct,
                  r.kpi.mean_eta_g, r.mean_eta_g_pct);
    os << buf;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Trace / report files
// ---------------------------------------------------------------------------

namespace {
constexpr const char* kTraceHeader =
    "time_s,frequency_hz,p_set_w,p_pcc_w,gvo_deg,rba_deg,rbt_nm,"
    "discharge_m3s,head_m,shaft_torque_nm,turbine_speed_rpm,soc,p_bess_w,"
    "p_mech_w,p_hydraulic_w";
}

void write_trace_csv(const std::string& path, const Trace& trace) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_trace_csv: cannot open " + path);
  f << kTraceHeader << "\n";
  char line[640];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::snprintf(
        line, sizeof(line),
        "%.10g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
        "%.17g,%.17g,%.17g,%.17g,%.17g\n",
        trace.time_s[i], trace.f_hz[i], trace.p_set_w[i], trace.p_pcc_w[i],
        trace.gvo_deg[i], trace.rba_deg[i], trace.t_blade_nm[i],
        trace.q_m3s[i], trace.head_m[i], trace.t_shaft_nm[i],
        rev_s_to_rpm(trace.n_rev_s[i]), trace.soc[i], trace.p_bess_w[i],
        trace.p_m_w[i], trace.p_h_w[i]);
    f << line;
  }
}

Trace read_trace_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_trace_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line != kTraceHeader) {
    throw std::runtime_error("read_trace_csv: bad header in " + path);
  }
  Trace t;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    double v[15];
    char extra;
    if (std::sscanf(line.c_str(),
                    "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,"
                    "%lf,%lf%c",
                    &v[0], &v[1], &v[2], &v[3], &v[4], &v[5], &v[6], &v[7],
                    &v[8], &v[9], &v[10], &v[11], &v[12], &v[13],
                    &v[14], &extra) != 15) {
      throw std::runtime_error("read_trace_csv: malformed row at line " +
                               std::to_string(line_no));
    }
    t.time_s.push_back(v[0]);
    t.f_hz.push_back(v[1]);
    t.p_set_w.push_back(v[2]);
    t.p_pcc_w.push_back(v[3]);
    t.gvo_deg.push_back(v[4]);
    t.rba_deg.push_back(v[5]);
    t.t_blade_nm.push_back(v[6]);
    t.q_m3s.push_back(v[7]);
    t.head_m.push_back(v[8]);
    t.t_shaft_nm.push_back(v[9]);
    t.n_rev_s.push_back(rpm_to_rev_s(v[10]));
    t.soc.push_back(v[11]);
    t.p_bess_w.push_back(v[12]);
    t.p_m_w.push_back(v[13]);
    t.p_h_w.push_back(v[14]);
  }
  if (t.time_s.size() >= 2) t.dt_s = t.time_s[1] - t.time_s[0];
  return t;
}

void write_kpi_json(const std::string& path, const KpiReport& report) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_kpi_json: cannot open " + path);
  f << report.to_json().dump(2) << "\n";
}

KpiReport read_kpi_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_kpi_json: cannot open " + path);
  nlohmann::json j;
  f >> j;
  return KpiReport::from_json(j);
}

}  // namespace hydrofcr
