// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code 0 only if all pass.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hydrofcr/control.hpp"
#include "hydrofcr/rng.hpp"
#include "hydrofcr/scenario.hpp"

using namespace hydrofcr;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s  %s  (%s)\n", pass ? "PASS" : "FAIL", name.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

}  // namespace

int main() {
  const auto t_start = std::chrono::steady_clock::now();
  StudyConfig cfg;  // frozen defaults drive the whole suite

  // --- Criterion 1: IEC speed coefficient endpoints -----------------------
  {
    const double hi = speed_coefficient(rpm_to_rev_s(1500.0), 0.34, 10.0);
    const double lo = speed_coefficient(rpm_to_rev_s(500.0), 0.34, 10.0);
    report("criterion 1: speed coefficient endpoints",
           std::abs(hi - 0.858) <= 0.005 && std::abs(lo - 0.286) <= 0.005,
           fmt("n_ED(1500rpm)=%.4f n_ED(500rpm)=%.4f", hi, lo));
  }

  // --- Criterion 2: specific-speed round trip ------------------------------
  {
    const double omega = rev_s_to_rad_s(rpm_to_rev_s(1500.0));
    const double e = constants::gravity_m_s2 * 10.0;
    const double sqrt_q =
        1.53 * std::sqrt(std::numbers::pi) * std::pow(2.0 * e, 0.75) / omega;
    const double q = sqrt_q * sqrt_q;
    const double v = specific_speed(omega, q, e);
    report("criterion 2: specific-speed round trip",
           std::abs(v - 1.53) <= 1e-6, fmt("Q=%.6f m3/s -> v=%.8f", q, v));
  }

  // --- Shared artifacts (criteria 3-7) -------------------------------------
  const auto art = build_study_artifacts(cfg);

  // --- Criterion 3: surrogate quality analogue -----------------------------
  {
    const auto& stats = art.surrogate.fit_stats();
    report("criterion 3: surrogate held-out MSE <= 0.001 and R^2 >= 0.97",
           stats.mse <= 0.001 && stats.r2 >= 0.97,
           fmt("mse=%.6f r2=%.4f terms=%zu", stats.mse, stats.r2,
               art.surrogate.terms().size()));
  }

  // --- Criterion 4: CAM optimality vs brute-force oracles ------------------
  {
    const double ned_fix = speed_coefficient(25.0, 0.34, cfg.head_m);
    double worst_beta = 0.0;
    for (const auto& row : art.kaplan_cam.rows) {
      double best_b = 4.0, best_v = -1e300;
      for (long k = 0; k <= 2400; ++k) {
        const double b = 4.0 + 0.01 * static_cast<double>(k);
        const double v = art.surrogate.eval(row.alpha_deg, b, ned_fix);
        if (v > best_v) {
          best_v = v;
          best_b = b;
        }
      }
      worst_beta = std::max(worst_beta, std::abs(row.control - best_b));
    }

    double worst_rpm = 0.0;
    bool bounds_ok = true;
    for (const auto& row : art.varspeed_cam.rows) {
      double best_rpm = 500.0, best_v = -1e300;
      for (int rpm = 500; rpm <= 1500; ++rpm) {
        const double ned = speed_coefficient(rpm_to_rev_s(rpm), 0.34, cfg.head_m);
        const double v = art.surrogate.eval(row.alpha_deg, 18.0, ned);
        if (v > best_v) {
          best_v = v;
          best_rpm = rpm;
        }
      }
      const double rpm_row = rev_s_to_rpm(row.control);
      worst_rpm = std::max(worst_rpm, std::abs(rpm_row - best_rpm));
      bounds_ok &= rpm_row >= 500.0 - 1e-9 && rpm_row <= 1500.0 + 1e-9;
    }
    const double beta_at_bep =
        art.kaplan_cam.control_for_alpha(cfg.hillchart.alpha_bep_deg);
    const bool bep_ok = std::abs(beta_at_bep - 18.0) <= 0.5;
    report("criterion 4: CAM tables match exhaustive argmax",
           worst_beta <= 0.05 && worst_rpm <= 5.0 && bounds_ok && bep_ok,
           fmt("max|dbeta|=%.3f deg, max|dn|=%.1f rpm, beta(bep)=%.2f",
               worst_beta, worst_rpm, beta_at_bep));
  }

  // --- Criterion 5: 12 h four-mode comparison ------------------------------
  const auto freq = synthesize_frequency(cfg.seed, cfg.duration_s, cfg.split_at_s);
  const auto t_sim0 = std::chrono::steady_clock::now();
  const auto results = run_batch(cfg, all_scenario_modes(), freq, art);
  const double sim_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_sim0)
          .count();

  const auto& hydro = results.at(ScenarioMode::OnlyHydro).kpi;
  const auto& b5 = results.at(ScenarioMode::Bess5).kpi;
  const auto& b9 = results.at(ScenarioMode::Bess9).kpi;
  const auto& vs = results.at(ScenarioMode::VarSpeed).kpi;

  {
    const auto& trace = results.at(ScenarioMode::OnlyHydro).trace;
    report("criterion 5: logged sample count and runtime",
           trace.size() == 43200 && sim_seconds < 60.0,
           fmt("%zu samples/mode, batch %.1f s", trace.size(), sim_seconds));

    report("criterion 5a: varspeed blade mileage and movements exactly zero",
           vs.mileage_rba_deg == 0.0 && vs.nom_rba == 0,
           fmt("mileage=%.3f deg, NoM=%ld", vs.mileage_rba_deg, vs.nom_rba));

    report("criterion 5b: varspeed GVO mileage exceeds only-hydro",
           vs.mileage_gvo_deg > hydro.mileage_gvo_deg,
           fmt("varspeed=%.1f deg vs only_hydro=%.1f deg (%+.1f%%)",
               vs.mileage_gvo_deg, hydro.mileage_gvo_deg,
               100.0 * (vs.mileage_gvo_deg / hydro.mileage_gvo_deg - 1.0)));

    const double red_b5 = 1.0 - b5.rms_te_w / hydro.rms_te_w;
    const double red_b9 = 1.0 - b9.rms_te_w / hydro.rms_te_w;
    const double red_vs = 1.0 - vs.rms_te_w / hydro.rms_te_w;
    report("criterion 5c: RMS(TE) ordering and reductions",
           b5.rms_te_w < vs.rms_te_w && b9.rms_te_w < vs.rms_te_w &&
               vs.rms_te_w < hydro.rms_te_w && red_b5 >= 0.30 &&
               red_b9 >= 0.30 && red_vs >= 0.05,
           fmt("hydro=%.0f b5=%.0f (-%.0f%%) b9=%.0f (-%.0f%%) vs=%.0f (-%.0f%%) W",
               hydro.rms_te_w, b5.rms_te_w, 100 * red_b5, b9.rms_te_w,
               100 * red_b9, vs.rms_te_w, 100 * red_vs));

    report("criterion 5d: 9 kW BESS wear reductions >= 5 kW BESS",
           b9.mileage_gvo_deg <= b5.mileage_gvo_deg &&
               b9.mileage_rba_deg <= b5.mileage_rba_deg &&
               b9.nom_gvo <= b5.nom_gvo && b9.nom_rba <= b5.nom_rba,
           fmt("gvo %.2f<=%.2f deg, rba %.2f<=%.2f deg, nom %ld<=%ld / %ld<=%ld",
               b9.mileage_gvo_deg, b5.mileage_gvo_deg, b9.mileage_rba_deg,
               b5.mileage_rba_deg, b9.nom_gvo, b5.nom_gvo, b9.nom_rba,
               b5.nom_rba));

    report("criterion 5e: |dRBT/dt| p95 ordering varspeed < hybrids < only-hydro",
           vs.rbt_p95_nms < b5.rbt_p95_nms && vs.rbt_p95_nms < b9.rbt_p95_nms &&
               b5.rbt_p95_nms < hydro.rbt_p95_nms &&
               b9.rbt_p95_nms < hydro.rbt_p95_nms,
           fmt("vs=%.4f b5=%.4f b9=%.4f hydro=%.4f N m/s", vs.rbt_p95_nms,
               b5.rbt_p95_nms, b9.rbt_p95_nms, hydro.rbt_p95_nms));

    report("criterion 5f: mean global efficiency varspeed < only-hydro",
           vs.mean_eta_g < hydro.mean_eta_g,
           fmt("varspeed=%.4f only_hydro=%.4f", vs.mean_eta_g,
               hydro.mean_eta_g));
  }

  // --- Criterion 6: invariant property suites (>= 1000 cases each) ---------
  {
    SplitMix64 rng(20260810);

    // SoC bounds under random command sequences.
    bool soc_ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
      BessConfig bc;
      bc.p_rated_w = 500.0 + 9500.0 * rng.uniform01();
      bc.e_rated_wh = 500.0 + 9500.0 * rng.uniform01();
      bc.eta_charge = 0.85 + 0.15 * rng.uniform01();
      bc.eta_discharge = 0.85 + 0.15 * rng.uniform01();
      double soc = rng.uniform01();
      for (int k = 0; k < 25; ++k) {
        const auto r = step_bess(
            bc, soc, 3.0 * bc.p_rated_w * (2.0 * rng.uniform01() - 1.0),
            0.02 + 200.0 * rng.uniform01());
        soc_ok &= r.soc >= 0.0 && r.soc <= 1.0;
        soc = r.soc;
      }
    }
    report("criterion 6a: SoC bounds (1000 random sequences)", soc_ok, "ok");

    // PCC power-balance identity on a randomly driven plant.
    bool balance_ok = true;
    {
      PlantConfig pc = cfg.plant;
      pc.mode = DriveMode::VarSpeed;
      pc.bess = cfg.bess5;
      Plant plant(pc, &art.chart);
      plant.init_steady(15.0, 18.0, 20.0, 0.5);
      for (int k = 0; k < 2000; ++k) {
        ActuatorRefs refs;
        refs.gvo_deg = 30.0 * rng.uniform01();
        refs.rba_deg = 4.0 + 24.0 * rng.uniform01();
        refs.speed_rev_s = rpm_to_rev_s(500.0 + 1000.0 * rng.uniform01());
        refs.p_bess_w = 8000.0 * (2.0 * rng.uniform01() - 1.0);
        const auto& s = plant.step(refs, 0.02);
        balance_ok &= s.p_pcc_w == s.p_hydro_elec_w + s.p_bess_w;
      }
    }
    report("criterion 6b: PCC power balance (2000 random steps)", balance_ok,
           "p_pcc == electrical(p_m) + p_bess");

    // Hybrid split identity.
    bool split_ok = true;
    {
      GovernorConfig gc;
      gc.mode = GovernorMode::HybridBess;
      gc.bess_p_rated_w = 5000.0;
      gc.hybrid.recenter_gain_w = 10000.0;
      Governor gov(gc, &art.kaplan_cam, &art.kaplan_map);
      gov.init_steady(27000.0);
      for (int k = 0; k < 1000; ++k) {
        const double p_set = 5000.0 + 45000.0 * rng.uniform01();
        const auto s = gov.hybrid_split(p_set, rng.uniform01(), k * 0.02, 0.02);
        split_ok &=
            std::abs(s.p_hydro_ref_w + s.p_bess_ref_w - p_set) <= 1e-9 * p_set;
      }
    }
    report("criterion 6c: hybrid split identity (1000 random steps)", split_ok,
           "p_hydro_ref + p_bess_ref == p_set");

    // Dead-band constancy across all governor modes.
    bool band_ok = true;
    {
      struct Case {
        GovernorMode mode;
        const CamTable* cam;
        const SetpointMap* map;
        double rating;
      };
      const Case cases[] = {
          {GovernorMode::OnlyHydro, &art.kaplan_cam, &art.kaplan_map, 0.0},
          {GovernorMode::VarSpeed, &art.varspeed_cam, &art.varspeed_map, 0.0},
          {GovernorMode::HybridBess, &art.kaplan_cam, &art.kaplan_map, 5000.0},
      };
      for (const auto& c : cases) {
        GovernorConfig gc;
        gc.mode = c.mode;
        gc.bess_p_rated_w = c.rating;
        gc.hybrid.recenter_gain_w = 2.0 * c.rating;
        Governor gov(gc, c.cam, c.map);
        gov.init_steady(27000.0);
        PlantState settled;
        settled.p_pcc_w = 27000.0;
        settled.p_hydro_elec_w = 27000.0;
        settled.soc = 0.5;
        ActuatorRefs first{};
        for (int k = 0; k < 1000; ++k) {
          const double f = 50.0 + 0.002 * (2.0 * rng.uniform01() - 1.0);
          const auto refs = gov.step(f, 27000.0, settled, k * 0.02, 0.02);
          if (k == 0) {
            first = refs;
          } else {
            band_ok &= refs.gvo_deg == first.gvo_deg &&
                       refs.rba_deg == first.rba_deg &&
                       refs.speed_rev_s == first.speed_rev_s;
          }
        }
      }
    }
    report("criterion 6d: dead-band constancy (1000 steps x 3 modes)", band_ok,
           "references frozen inside +/-2 mHz");

    // KPI purity: bitwise repeatability on a production trace.
    {
      const auto& t = results.at(ScenarioMode::Bess5).trace;
      const auto k1 = compute_kpis(t, cfg.kpi);
      const auto k2 = compute_kpis(t, cfg.kpi);
      const bool pure = k1.rms_te_w == k2.rms_te_w &&
                        k1.mileage_gvo_deg == k2.mileage_gvo_deg &&
                        k1.nom_gvo == k2.nom_gvo &&
                        k1.rbt_p95_nms == k2.rbt_p95_nms &&
                        k1.mean_eta_g == k2.mean_eta_g;
      report("criterion 6e: KPI purity and determinism", pure,
             "repeated evaluation bitwise identical");
    }

    // Servo rate-limit compliance.
    bool rate_ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
      ServoConfig sc;
      sc.rate_limit_deg_s = 0.05 + 3.0 * rng.uniform01();
      sc.time_constant_s = 0.05 + 2.0 * rng.uniform01();
      sc.min_deg = 0.0;
      sc.max_deg = 30.0;
      const double dt = 0.005 + 0.3 * rng.uniform01();
      ServoState s{30.0 * rng.uniform01()};
      for (int k = 0; k < 20; ++k) {
        const double before = s.position_deg;
        s = step_servo(sc, s, -10.0 + 50.0 * rng.uniform01(), dt);
        rate_ok &= std::abs(s.position_deg - before) <=
                   sc.rate_limit_deg_s * dt + 1e-12;
        rate_ok &= s.position_deg >= sc.min_deg && s.position_deg <= sc.max_deg;
      }
    }
    report("criterion 6f: servo rate-limit compliance (1000 sequences)",
           rate_ok, "|dpos| <= rate*dt");

    // Surrogate gradient vs central finite differences at off-knot points,
    // on the primary piecewise-linear evaluation (exact away from knots).
    EfficiencySurrogate pl = art.surrogate;
    pl.set_cubic_eval(false);
    const auto off_knots = [&](double v, int dim) {
      for (const auto& t : pl.terms()) {
        for (const auto& f : t.factors) {
          if (f.dim == dim && std::abs(v - f.knot) < 1e-3) return false;
        }
      }
      return true;
    };
    bool grad_ok = true;
    double worst = 0.0;
    int checked = 0;
    const double h = 1e-4;
    while (checked < 1000) {
      const double a = 1.0 + 28.0 * rng.uniform01();
      const double b = 5.0 + 22.0 * rng.uniform01();
      const double n = 0.30 + 0.52 * rng.uniform01();
      if (!off_knots(a, 0) || !off_knots(b, 1) || !off_knots(n, 2)) continue;
      const auto g = pl.gradient(a, b, n);
      const double fd[3] = {
          (pl.eval(a + h, b, n) - pl.eval(a - h, b, n)) / (2 * h),
          (pl.eval(a, b + h, n) - pl.eval(a, b - h, n)) / (2 * h),
          (pl.eval(a, b, n + h) - pl.eval(a, b, n - h)) / (2 * h)};
      for (int d = 0; d < 3; ++d) {
        const double err =
            std::abs(g[d] - fd[d]) / std::max(1.0, std::abs(fd[d]));
        worst = std::max(worst, err);
        grad_ok &= err <= 1e-5;
      }
      ++checked;
    }
    report("criterion 6g: surrogate gradient vs finite differences (1000 pts)",
           grad_ok, fmt("max relative deviation %.2e", worst));
  }

  // --- Criterion 7: bitwise-identical files from a repeated batch ----------
  {
    namespace fs = std::filesystem;
    const fs::path dir1 = "acceptance_run1";
    const fs::path dir2 = "acceptance_run2";
    fs::create_directories(dir1);
    fs::create_directories(dir2);

    const auto results2 = run_batch(cfg, all_scenario_modes(), freq, art);
    auto dump = [&](const fs::path& dir,
                    const std::map<ScenarioMode, ScenarioResult>& rs) {
      for (const auto& [mode, r] : rs) {
        write_trace_csv((dir / ("trace_" + to_string(mode) + ".csv")).string(),
                        r.trace);
        write_kpi_json((dir / ("kpi_" + to_string(mode) + ".json")).string(),
                       r.kpi);
      }
    };
    dump(dir1, results);
    dump(dir2, results2);

    auto same_bytes = [](const fs::path& a, const fs::path& b) {
      std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
      std::ostringstream sa, sb;
      sa << fa.rdbuf();
      sb << fb.rdbuf();
      return fa.good() == fb.good() && sa.str() == sb.str() &&
             !sa.str().empty();
    };
    bool identical = true;
    for (ScenarioMode m : all_scenario_modes()) {
      identical &= same_bytes(dir1 / ("trace_" + to_string(m) + ".csv"),
                              dir2 / ("trace_" + to_string(m) + ".csv"));
      identical &= same_bytes(dir1 / ("kpi_" + to_string(m) + ".json"),
                              dir2 / ("kpi_" + to_string(m) + ".json"));
    }
    report("criterion 7: repeated batch produces bitwise-identical files",
           identical, "trace CSVs and KPI JSON byte-compared");
    fs::remove_all(dir1);
    fs::remove_all(dir2);
  }

  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  std::printf("%s: %d failure(s), %.1f s total\n",
              g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              g_failures, total);
  return g_failures == 0 ? 0 : 1;
}
