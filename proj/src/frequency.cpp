#include "hydrofcr/frequency.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "hydrofcr/rng.hpp"

namespace hydrofcr {

double FrequencySeries::at(double t_s) const {
  if (f_hz.empty()) throw std::logic_error("FrequencySeries: empty");
  const double rel = (t_s - t0_s) / dt_s;
  long idx = static_cast<long>(std::floor(rel + 1e-9));
  if (idx < 0) idx = 0;
  if (idx >= static_cast<long>(f_hz.size())) {
    idx = static_cast<long>(f_hz.size()) - 1;
  }
  return f_hz[static_cast<std::size_t>(idx)];
}

void FrequencySeries::validate() const {
  if (f_hz.empty()) throw std::runtime_error("FrequencySeries: empty");
  if (dt_s <= 0.0) throw std::runtime_error("FrequencySeries: bad step");
  for (double f : f_hz) {
    if (!(f >= kFrequencyBandLo && f <= kFrequencyBandHi)) {
      throw std::runtime_error("FrequencySeries: sample outside sanity band");
    }
  }
}

FrequencySeries load_frequency_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_frequency_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) {
    throw std::runtime_error("load_frequency_csv: empty file " + path);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "time_s,frequency_hz") {
    throw std::runtime_error(
        "load_frequency_csv: expected header 'time_s,frequency_hz' at line 1");
  }

  FrequencySeries fs;
  std::vector<double> times;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double t, freq;
    char extra;
    if (std::sscanf(line.c_str(), "%lf,%lf%c", &t, &freq, &extra) != 2) {
      throw std::runtime_error("load_frequency_csv: malformed row at line " +
                               std::to_string(line_no));
    }
    if (!(freq >= kFrequencyBandLo && freq <= kFrequencyBandHi)) {
      throw std::runtime_error(
          "load_frequency_csv: frequency outside [45, 55] Hz at line " +
          std::to_string(line_no));
    }
    times.push_back(t);
    fs.f_hz.push_back(freq);
  }
  if (fs.f_hz.empty()) {
    throw std::runtime_error("load_frequency_csv: no samples in " + path);
  }
  if (fs.f_hz.size() >= 2) {
    const double step = times[1] - times[0];
    if (step <= 0.0) {
      throw std::runtime_error(
          "load_frequency_csv: non-increasing time at line 3");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (std::abs((times[i] - times[i - 1]) - step) > 1e-6 * step) {
        throw std::runtime_error(
            "load_frequency_csv: non-uniform time step at line " +
            std::to_string(i + 2));
      }
    }
    fs.dt_s = step;
  }
  fs.t0_s = times.front();
  return fs;
}

void write_frequency_csv(const std::string& path, const FrequencySeries& fs) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_frequency_csv: cannot open " + path);
  f << "time_s,frequency_hz\n";
  char line[96];
  for (std::size_t i = 0; i < fs.f_hz.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.10g,%.17g\n",
                  fs.t0_s + static_cast<double>(i) * fs.dt_s, fs.f_hz[i]);
    f << line;
  }
}

FrequencySeries synthesize_frequency(uint64_t seed, double duration_s,
                                     double split_at_s,
                                     const FrequencySynthConfig& cfg) {
  if (duration_s <= 0.0) {
    throw std::invalid_argument("synthesize_frequency: duration must be > 0");
  }
  const std::size_t n =
      static_cast<std::size_t>(std::ceil(duration_s / cfg.dt_s));
  FrequencySeries fs;
  fs.dt_s = cfg.dt_s;
  fs.f_hz.reserve(n);

  SplitMix64 rng(seed);
  // Two Ornstein-Uhlenbeck components; the fast one is smoothed by a short
  // first-order filter so the per-second derivative stays in a realistic
  // band rather than the raw OU innovation scale.
  const double a_slow = std::exp(-cfg.dt_s / cfg.slow_tau_s);
  const double a_fast = std::exp(-cfg.dt_s / cfg.fast_tau_s);
  const double a_smooth = 1.0 - std::exp(-cfg.dt_s / cfg.smooth_tau_s);
  const double q_slow = cfg.slow_sd_hz * std::sqrt(1.0 - a_slow * a_slow);
  const double q_fast = cfg.fast_sd_hz * std::sqrt(1.0 - a_fast * a_fast);

  double slow = cfg.slow_sd_hz * rng.gaussian();
  double fast_raw = cfg.fast_sd_hz * rng.gaussian();
  double fast = fast_raw;

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * cfg.dt_s;
    const bool post = t >= split_at_s;
    const double scale = post ? cfg.post_split_sd_scale : 1.0;

    slow = a_slow * slow + q_slow * scale * rng.gaussian();
    fast_raw = a_fast * fast_raw + q_fast * scale * rng.gaussian();
    fast += (fast_raw - fast) * a_smooth;

    double event = 0.0;
    if (post) {
      const double dt_ev = t - split_at_s;
      event = cfg.event_residual_hz +
              (cfg.event_step_hz - cfg.event_residual_hz) *
                  std::exp(-dt_ev / cfg.event_recovery_tau_s);
    }

    double f = 50.0 + slow + fast + event;
    if (f < kFrequencyBandLo) f = kFrequencyBandLo;
    if (f > kFrequencyBandHi) f = kFrequencyBandHi;
    fs.f_hz.push_back(f);
  }
  return fs;
}

}  // namespace hydrofcr
