// Command-line driver for the FCR study toolkit.
//
// Subcommands: gen-hillchart, fit-surrogate, gen-cam, gen-frequency,
// simulate, compare, report. Exit code 0 on success; failures print a
// machine-readable JSON error object on stderr and return 1.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hydrofcr/report.hpp"
#include "hydrofcr/scenario.hpp"

namespace fs = std::filesystem;
using namespace hydrofcr;

namespace {

StudyConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return StudyConfig{};
  return load_study_config(path);
}

std::vector<ScenarioMode> parse_modes(const std::string& csv) {
  std::vector<ScenarioMode> modes;
  if (csv.empty() || csv == "all") return all_scenario_modes();
  std::size_t pos = 0;
  while (pos < csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string name = csv.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    modes.push_back(scenario_mode_from_string(name));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return modes;
}

FrequencySeries resolve_frequency(const std::string& spec,
                                  const StudyConfig& cfg) {
  if (spec == "synthetic" || spec.empty()) {
    return synthesize_frequency(cfg.seed, cfg.duration_s, cfg.split_at_s);
  }
  return load_frequency_csv(spec);
}

int cmd_gen_hillchart(const StudyConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  GroundTruthHillChart chart(cfg.hillchart);
  const auto grid = GridSpec::paper(chart);
  const auto samples =
      generate_training_set(chart, grid, cfg.training_noise_sd, cfg.seed);
  const std::string path = (fs::path(out_dir) / "training.csv").string();
  write_training_csv(path, samples);
  std::cout << path << "\n";
  return 0;
}

int cmd_fit_surrogate(const StudyConfig& cfg, const std::string& input,
                      const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::vector<HillChartSample> samples;
  if (input.empty()) {
    GroundTruthHillChart chart(cfg.hillchart);
    samples = generate_training_set(chart, GridSpec::paper(chart),
                                    cfg.training_noise_sd, cfg.seed);
  } else {
    samples = read_training_csv(input);
  }
  const auto model = fit_surrogate(samples, cfg.fit);
  const std::string path = (fs::path(out_dir) / "surrogate.json").string();
  model.save(path);
  std::cout << path << "\n";
  std::cout << "holdout mse=" << model.fit_stats().mse
            << " r2=" << model.fit_stats().r2 << "\n";
  return 0;
}

int cmd_gen_cam(const StudyConfig& cfg, const std::string& model_path,
                const std::string& out_dir) {
  fs::create_directories(out_dir);
  GroundTruthHillChart chart(cfg.hillchart);
  EfficiencySurrogate model;
  if (model_path.empty()) {
    const auto samples = generate_training_set(
        chart, GridSpec::paper(chart), cfg.training_noise_sd, cfg.seed);
    model = fit_surrogate(samples, cfg.fit);
  } else {
    model = EfficiencySurrogate::load(model_path);
  }
  const auto kaplan = build_kaplan_cam(
      model, chart, cfg.head_m, cfg.hillchart.geometry.n_rated_rev_s, cfg.cam);
  const auto varspeed = build_varspeed_cam(model, chart, cfg.head_m,
                                           cfg.hillchart.beta_bep_deg, cfg.cam);
  for (const auto& [name, table] :
       std::initializer_list<std::pair<const char*, const CamTable*>>{
           {"cam_kaplan", &kaplan}, {"cam_varspeed", &varspeed}}) {
    const std::string csv = (fs::path(out_dir) / (std::string(name) + ".csv")).string();
    const std::string meta =
        (fs::path(out_dir) / (std::string(name) + ".json")).string();
    write_cam_csv(csv, *table);
    write_cam_metadata(meta, *table);
    std::cout << csv << "\n";
  }
  return 0;
}

int cmd_gen_frequency(const StudyConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const auto freq =
      synthesize_frequency(cfg.seed, cfg.duration_s, cfg.split_at_s);
  const std::string path = (fs::path(out_dir) / "frequency.csv").string();
  write_frequency_csv(path, freq);
  std::cout << path << "\n";
  return 0;
}

int cmd_simulate(const StudyConfig& cfg, const std::string& freq_spec,
                 const std::string& modes_csv, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const auto modes = parse_modes(modes_csv);
  const auto freq = resolve_frequency(freq_spec, cfg);
  const auto art = build_study_artifacts(cfg);
  const auto results = run_batch(cfg, modes, freq, art);

  std::map<ScenarioMode, KpiReport> reports;
  for (const auto& [mode, result] : results) {
    const std::string name = to_string(mode);
    write_trace_csv((fs::path(out_dir) / ("trace_" + name + ".csv")).string(),
                    result.trace);
    write_kpi_json((fs::path(out_dir) / ("kpi_" + name + ".json")).string(),
                   result.kpi);
    reports[mode] = result.kpi;
  }
  if (reports.count(ScenarioMode::OnlyHydro)) {
    const auto table = compare_scenarios(reports);
    std::ofstream((fs::path(out_dir) / "comparison.csv").string())
        << table.to_csv();
    std::ofstream((fs::path(out_dir) / "comparison.txt").string())
        << table.to_text();
    std::cout << table.to_text();
  }
  std::cout << "wrote " << results.size() << " scenario(s) to " << out_dir
            << "\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& kpi_paths,
                const std::string& out_dir) {
  std::map<ScenarioMode, KpiReport> reports;
  for (const auto& p : kpi_paths) {
    const auto r = read_kpi_json(p);
    reports[scenario_mode_from_string(r.mode)] = r;
  }
  const auto table = compare_scenarios(reports);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream((fs::path(out_dir) / "comparison.csv").string())
        << table.to_csv();
    std::ofstream((fs::path(out_dir) / "comparison.txt").string())
        << table.to_text();
  }
  std::cout << table.to_text();
  return 0;
}

int cmd_report(const std::vector<std::string>& trace_paths,
               const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::map<std::string, Trace> traces;
  std::map<std::string, KpiReport> kpis;
  for (const auto& p : trace_paths) {
    // trace_<mode>.csv naming; fall back to the bare filename.
    std::string name = fs::path(p).stem().string();
    if (name.rfind("trace_", 0) == 0) name = name.substr(6);
    traces[name] = read_trace_csv(p);
    kpis[name] = compute_kpis(traces[name]);
  }
  if (traces.empty()) {
    throw std::runtime_error("report: no traces given");
  }
  const auto& first = traces.begin()->second;
  plot_frequency((fs::path(out_dir) / "frequency.svg").string(), first.time_s,
                 first.f_hz);
  plot_tracking_error((fs::path(out_dir) / "tracking_error.svg").string(),
                      traces);
  plot_rbt_cdf((fs::path(out_dir) / "rbt_cdf.svg").string(), kpis);
  plot_efficiency((fs::path(out_dir) / "eta_hydraulic.svg").string(), traces,
                  false);
  plot_efficiency((fs::path(out_dir) / "eta_global.svg").string(), traces,
                  true);
  std::cout << "wrote plots to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Run-of-river FCR study toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", freq_spec = "synthetic";
  std::string modes_csv = "all", input_path, model_path;
  std::vector<std::string> file_args;
  uint64_t seed_override = 0;
  bool seed_set = false;

  app.add_option("--config", config_path, "Configuration JSON document");
  app.add_option("--out", out_dir, "Output directory");

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option_function<uint64_t>(
        "--seed",
        [&](uint64_t s) {
          seed_override = s;
          seed_set = true;
        },
        "Override the configured seed");
  };

  auto* gen_hillchart =
      app.add_subcommand("gen-hillchart", "Export the training data set");
  add_seed(gen_hillchart);

  auto* fit_cmd =
      app.add_subcommand("fit-surrogate", "Fit the efficiency meta-model");
  fit_cmd->add_option("--input", input_path, "Training CSV (default: generate)");
  add_seed(fit_cmd);

  auto* gen_cam = app.add_subcommand("gen-cam", "Build both CAM tables");
  gen_cam->add_option("--model", model_path, "Surrogate JSON (default: fit)");
  add_seed(gen_cam);

  auto* gen_freq =
      app.add_subcommand("gen-frequency", "Synthesize the frequency series");
  add_seed(gen_freq);

  auto* simulate = app.add_subcommand("simulate", "Run the scenario batch");
  simulate->add_option("--freq", freq_spec, "Frequency CSV path or 'synthetic'");
  simulate->add_option("--modes", modes_csv,
                       "Comma list: only_hydro,bess_5kw,bess_9kw,varspeed");
  add_seed(simulate);

  auto* compare = app.add_subcommand("compare", "Compare KPI reports");
  compare->add_option("files", file_args, "kpi_<mode>.json files");

  auto* report = app.add_subcommand("report", "Render SVG plots from traces");
  report->add_option("files", file_args, "trace_<mode>.csv files");

  CLI11_PARSE(app, argc, argv);

  try {
    StudyConfig cfg = load_config_or_default(config_path);
    if (seed_set) cfg.seed = seed_override;

    if (gen_hillchart->parsed()) return cmd_gen_hillchart(cfg, out_dir);
    if (fit_cmd->parsed()) return cmd_fit_surrogate(cfg, input_path, out_dir);
    if (gen_cam->parsed()) return cmd_gen_cam(cfg, model_path, out_dir);
    if (gen_freq->parsed()) return cmd_gen_frequency(cfg, out_dir);
    if (simulate->parsed())
      return cmd_simulate(cfg, freq_spec, modes_csv, out_dir);
    if (compare->parsed()) return cmd_compare(file_args, out_dir);
    if (report->parsed()) return cmd_report(file_args, out_dir);
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
