#include "hydrofcr/kpi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hydrofcr {

void Trace::validate() const {
  const std::size_t n = time_s.size();
  const std::vector<double>* channels[] = {
      &f_hz, &p_set_w, &p_pcc_w, &gvo_deg, &rba_deg, &t_blade_nm,
      &q_m3s, &head_m, &t_shaft_nm, &n_rev_s, &soc, &p_m_w, &p_h_w, &p_bess_w};
  for (const auto* c : channels) {
    if (c->size() != n) {
      throw std::runtime_error("Trace: channel length mismatch");
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs((time_s[i] - time_s[i - 1]) - dt_s) > 1e-6) {
      throw std::runtime_error("Trace: non-uniform timestep");
    }
  }
}

std::vector<double> tracking_error(const Trace& trace) {
  if (trace.p_set_w.size() != trace.p_pcc_w.size()) {
    throw std::invalid_argument("tracking_error: length mismatch");
  }
  std::vector<double> te(trace.p_set_w.size());
  for (std::size_t i = 0; i < te.size(); ++i) {
    te[i] = trace.p_set_w[i] - trace.p_pcc_w[i];
  }
  return te;
}

double rms_te(std::span<const double> te, std::size_t k1, std::size_t k2,
              double averaging_s, double dt_s) {
  if (k2 > te.size() || k1 >= k2) {
    throw std::invalid_argument("rms_te: empty or out-of-range window");
  }
  const std::size_t bin = static_cast<std::size_t>(
      std::max(1.0, std::round(averaging_s / dt_s)));
  const std::size_t n_bins = (k2 - k1) / bin;
  if (n_bins == 0) {
    throw std::invalid_argument("rms_te: window shorter than one bin");
  }
  double acc = 0.0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    double sum = 0.0;
    for (std::size_t i = k1 + b * bin; i < k1 + (b + 1) * bin; ++i) {
      sum += te[i];
    }
    const double mean = sum / bin;
    acc += mean * mean;
  }
  return std::sqrt(acc / n_bins);
}

double mileage(std::span<const double> position_deg, double eps_noise_deg) {
  if (position_deg.empty()) {
    throw std::invalid_argument("mileage: empty sequence");
  }
  double total = 0.0;
  for (std::size_t i = 1; i < position_deg.size(); ++i) {
    const double step = std::abs(position_deg[i] - position_deg[i - 1]);
    if (step > eps_noise_deg) total += step;
  }
  return total;
}

long number_of_movements(std::span<const double> position_deg,
                         const WearConfig& cfg, double dt_s) {
  if (position_deg.empty()) {
    throw std::invalid_argument("number_of_movements: empty sequence");
  }
  // States: resting (with accumulated dwell) or moving in a direction.
  // A movement is counted when leaving a rest state that lasted at least
  // rest_time_s, or on a direction reversal while moving.
  long count = 0;
  int direction = 0;                 // 0 at rest, +1 up, -1 down
  double rest_s = cfg.rest_time_s;   // trace start counts as settled
  for (std::size_t i = 1; i < position_deg.size(); ++i) {
    const double delta = position_deg[i] - position_deg[i - 1];
    if (std::abs(delta) <= cfg.eps_move_deg) {
      rest_s += dt_s;
      if (rest_s >= cfg.rest_time_s) direction = 0;
      continue;
    }
    const int dir = delta > 0.0 ? 1 : -1;
    if (direction == 0) {
      if (rest_s >= cfg.rest_time_s) ++count;  // onset out of rest
      direction = dir;
    } else if (dir != direction) {
      ++count;  // reversal
      direction = dir;
    }
    rest_s = 0.0;
  }
  return count;
}

std::vector<double> rbt_derivative_samples(std::span<const double> t_blade_nm,
                                           double dt_s, bool absolute) {
  if (t_blade_nm.size() < 2) {
    throw std::invalid_argument("rbt_derivative_samples: need >= 2 samples");
  }
  std::vector<double> d;
  if (t_blade_nm.size() == 2) {
    d.push_back((t_blade_nm[1] - t_blade_nm[0]) / dt_s);
  } else {
    d.reserve(t_blade_nm.size() - 2);
    for (std::size_t i = 1; i + 1 < t_blade_nm.size(); ++i) {
      d.push_back((t_blade_nm[i + 1] - t_blade_nm[i - 1]) / (2.0 * dt_s));
    }
  }
  if (absolute) {
    for (auto& x : d) x = std::abs(x);
  }
  std::sort(d.begin(), d.end());
  return d;
}

double percentile(std::span<const double> sorted_samples, double p) {
  if (sorted_samples.empty()) {
    throw std::invalid_argument("percentile: empty sample set");
  }
  if (p <= 0.0) return sorted_samples.front();
  if (p >= 1.0) return sorted_samples.back();
  const std::size_t n = sorted_samples.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(p * n));
  if (rank == 0) rank = 1;
  return sorted_samples[rank - 1];
}

EfficiencyStats efficiency_series(const Trace& trace, double p_h_floor_w) {
  EfficiencyStats out;
  const std::size_t n = trace.size();
  out.eta_h.resize(n, 0.0);
  out.eta_g.resize(n, 0.0);
  double sum_h = 0.0, sum_g = 0.0;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p_h = trace.p_h_w[i];
    if (p_h > 0.0) {
      out.eta_h[i] = trace.p_m_w[i] / p_h;
      out.eta_g[i] = trace.p_pcc_w[i] / p_h;
    }
    if (p_h >= p_h_floor_w) {
      sum_h += out.eta_h[i];
      sum_g += out.eta_g[i];
      ++kept;
    }
  }
  if (kept > 0) {
    out.mean_eta_h = sum_h / kept;
    out.mean_eta_g = sum_g / kept;
  }
  return out;
}

KpiReport compute_kpis(const Trace& trace, const KpiConfig& cfg) {
  trace.validate();
  if (trace.size() < 2) throw std::invalid_argument("compute_kpis: short trace");

  const std::size_t k1 = std::min(
      trace.size() - 1,
      static_cast<std::size_t>(std::round(cfg.warmup_s / trace.dt_s)));
  const std::size_t k2 = trace.size();

  KpiReport r;
  const auto te = tracking_error(trace);
  r.rms_te_w = rms_te(te, k1, k2, cfg.averaging_s, trace.dt_s);

  const auto window = [&](const std::vector<double>& v) {
    return std::span<const double>(v).subspan(k1, k2 - k1);
  };
  r.mileage_gvo_deg = mileage(window(trace.gvo_deg), cfg.wear.eps_noise_deg);
  r.mileage_rba_deg = mileage(window(trace.rba_deg), cfg.wear.eps_noise_deg);
  r.nom_gvo = number_of_movements(window(trace.gvo_deg), cfg.wear, trace.dt_s);
  r.nom_rba = number_of_movements(window(trace.rba_deg), cfg.wear, trace.dt_s);

  const auto cdf = rbt_derivative_samples(window(trace.t_blade_nm),
                                          trace.dt_s, cfg.rbt_absolute);
  r.rbt_p95_nms = percentile(cdf, 0.95);
  r.rbt_cdf_quantiles.reserve(cfg.cdf_quantiles);
  for (int q = 0; q < cfg.cdf_quantiles; ++q) {
    const double p = cfg.cdf_quantiles == 1
                         ? 1.0
                         : static_cast<double>(q) / (cfg.cdf_quantiles - 1);
    r.rbt_cdf_quantiles.push_back(percentile(cdf, p));
  }

  // Efficiency means over the same window, excluding samples below the
  // hydraulic-power floor.
  const double floor_w = cfg.p_h_floor_frac * cfg.p_h_rated_w;
  double sum_h = 0.0, sum_g = 0.0;
  std::size_t kept = 0;
  for (std::size_t i = k1; i < k2; ++i) {
    const double p_h = trace.p_h_w[i];
    if (p_h >= floor_w && p_h > 0.0) {
      sum_h += trace.p_m_w[i] / p_h;
      sum_g += trace.p_pcc_w[i] / p_h;
      ++kept;
    }
  }
  if (kept > 0) {
    r.mean_eta_h = sum_h / kept;
    r.mean_eta_g = sum_g / kept;
  }
  return r;
}

nlohmann::json KpiReport::to_json() const {
  return nlohmann::json{{"schema_version", 1},
                        {"type", "hydrofcr_kpi_report"},
                        {"mode", mode},
                        {"rms_te_w", rms_te_w},
                        {"mileage_gvo_deg", mileage_gvo_deg},
                        {"mileage_rba_deg", mileage_rba_deg},
                        {"nom_gvo", nom_gvo},
                        {"nom_rba", nom_rba},
                        {"rbt_p95_nms", rbt_p95_nms},
                        {"rbt_cdf_quantiles", rbt_cdf_quantiles},
                        {"mean_eta_h", mean_eta_h},
                        {"mean_eta_g", mean_eta_g}};
}

KpiReport KpiReport::from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != 1 ||
      j.at("type").get<std::string>() != "hydrofcr_kpi_report") {
    throw std::runtime_error("KpiReport: unsupported document");
  }
  KpiReport r;
  r.mode = j.at("mode").get<std::string>();
  r.rms_te_w = j.at("rms_te_w").get<double>();
  r.mileage_gvo_deg = j.at("mileage_gvo_deg").get<double>();
  r.mileage_rba_deg = j.at("mileage_rba_deg").get<double>();
  r.nom_gvo = j.at("nom_gvo").get<long>();
  r.nom_rba = j.at("nom_rba").get<long>();
  r.rbt_p95_nms = j.at("rbt_p95_nms").get<double>();
  r.rbt_cdf_quantiles =
      j.at("rbt_cdf_quantiles").get<std::vector<double>>();
  r.mean_eta_h = j.at("mean_eta_h").get<double>();
  r.mean_eta_g = j.at("mean_eta_g").get<double>();
  return r;
}

}  // namespace hydrofcr
