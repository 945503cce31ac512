#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "doctest.h"
#include "fixtures.hpp"
#include "hydrofcr/rng.hpp"
#include "hydrofcr/surrogate.hpp"

using namespace hydrofcr;

namespace {

const GroundTruthHillChart& chart() { return testing::chart(); }
const std::vector<HillChartSample>& noisy_samples() {
  return testing::noisy_samples();
}
// One fit shared across the test cases below (fitting is deterministic).
const EfficiencySurrogate& noisy_model() { return testing::model(); }

}  // namespace

TEST_CASE("noiseless fit reaches R^2 >= 0.99 held out") {
  const auto samples =
      generate_training_set(chart(), GridSpec::paper(chart()), 0.0, 1);
  const auto model = fit_surrogate(samples);
  CHECK(model.fit_stats().r2 >= 0.99);
}

TEST_CASE("noisy fit quality analogue: MSE <= 0.001 and R^2 >= 0.97") {
  const auto& model = noisy_model();
  CHECK(model.fit_stats().mse <= 0.001);
  CHECK(model.fit_stats().r2 >= 0.97);
  CHECK(model.fit_stats().n_holdout > 0);
}

TEST_CASE("degenerate inputs raise a fit error") {
  std::vector<HillChartSample> flat;
  for (int i = 0; i < 200; ++i) {
    flat.push_back(HillChartSample{static_cast<double>(i % 20),
                                   static_cast<double>(i % 7), 0.5 + 0.01 * (i % 3),
                                   0.8, 0.5});
  }
  CHECK_THROWS_AS(fit_surrogate(flat), std::runtime_error);

  std::vector<HillChartSample> few(10, HillChartSample{1, 2, 0.5, 0.1, 0.1});
  CHECK_THROWS_AS(fit_surrogate(few), std::invalid_argument);
}

TEST_CASE("evaluation near training data and the peak") {
  const auto& model = noisy_model();
  const auto& samples = noisy_samples();

  // 95% of training nodes within 3 sigma of the (noisy) sample value, where
  // sigma is the total residual scale (measurement noise plus the hinge
  // model's approximation error, estimated by the held-out MSE).
  const double sigma = std::sqrt(model.fit_stats().mse + 0.003 * 0.003);
  std::size_t good = 0;
  for (const auto& s : samples) {
    const double pred = model.eval(s.alpha_deg, s.beta_deg, s.ned);
    if (std::abs(pred - s.eta) <= 3.0 * sigma) ++good;
  }
  CHECK(static_cast<double>(good) / samples.size() >= 0.95);

  // Peak reproduced: the piecewise-linear fit resolves it to about the
  // grid/noise scale; the C1 smoothing rounds the apex down slightly more.
  const double pl_bep = testing::pl_model().eval(18.0, 18.0, chart().ned_bep());
  CHECK(pl_bep == doctest::Approx(0.92).epsilon(0.02));
  const double eta_bep = model.eval(18.0, 18.0, chart().ned_bep());
  CHECK(eta_bep == doctest::Approx(0.92).epsilon(0.04));
}

TEST_CASE("intercept-only and zero-coefficient models") {
  std::array<std::array<double, 2>, 3> ranges{{{0, 30}, {4, 28}, {0.28, 0.86}}};
  BasisTerm intercept;
  intercept.coef = 0.37;
  EfficiencySurrogate m({intercept}, ranges);
  CHECK(m.eval(10, 10, 0.5) == doctest::Approx(0.37));
  const auto g = m.gradient(10, 10, 0.5);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);
  CHECK(g[2] == 0.0);

  BasisTerm hinge_term;
  hinge_term.factors.push_back(HingeFactor{0, +1, 12.0});
  hinge_term.coef = 0.0;
  EfficiencySurrogate zero({intercept, hinge_term}, ranges);
  CHECK(zero.eval(20, 10, 0.5) == doctest::Approx(0.37));
}

TEST_CASE("eval clamps out-of-range inputs and reports it") {
  const auto& model = noisy_model();
  const auto inside = model.eval_ex(15.0, 18.0, 0.6);
  CHECK_FALSE(inside.clamped);
  const auto outside = model.eval_ex(45.0, 18.0, 0.6);
  CHECK(outside.clamped);
  const auto edge = model.eval_ex(model.input_ranges()[0][1], 18.0, 0.6);
  CHECK(outside.eta == doctest::Approx(edge.eta));
}

TEST_CASE("analytic gradient agrees with central differences off knots") {
  // Piecewise-linear evaluation: products of hinges are piecewise bilinear,
  // so central differences away from the knots are exact.
  const auto& model = testing::pl_model();
  const auto off_knots = [&](double v, int dim) {
    for (const auto& t : model.terms()) {
      for (const auto& f : t.factors) {
        if (f.dim == dim && std::abs(v - f.knot) < 1e-3) return false;
      }
    }
    return true;
  };
  SplitMix64 rng(41);
  const double h = 1e-4;
  int checked = 0;
  for (int i = 0; i < 4000 && checked < 100; ++i) {
    const double a = 1.0 + 28.0 * rng.uniform01();
    const double b = 5.0 + 22.0 * rng.uniform01();
    const double n = 0.30 + 0.52 * rng.uniform01();
    if (!off_knots(a, 0) || !off_knots(b, 1) || !off_knots(n, 2)) continue;
    const auto g = model.gradient(a, b, n);
    const double fd_a = (model.eval(a + h, b, n) - model.eval(a - h, b, n)) / (2 * h);
    const double fd_b = (model.eval(a, b + h, n) - model.eval(a, b - h, n)) / (2 * h);
    const double fd_n = (model.eval(a, b, n + h) - model.eval(a, b, n - h)) / (2 * h);
    ++checked;
    CHECK(g[0] == doctest::Approx(fd_a).epsilon(1e-5).scale(1.0));
    CHECK(g[1] == doctest::Approx(fd_b).epsilon(1e-5).scale(1.0));
    CHECK(g[2] == doctest::Approx(fd_n).epsilon(1e-5).scale(1.0));
  }
  CHECK(checked == 100);
}

TEST_CASE("gradient vanishes along the ridge in beta") {
  // First-order optimality at the blade angle maximizing the model.
  const auto& model = noisy_model();
  for (double alpha : {12.0, 18.0, 24.0}) {
    double best_b = 4.0, best_v = -1.0;
    for (double b = 4.0; b <= 28.0 + 1e-9; b += 0.01) {
      const double v = model.eval(alpha, b, chart().ned_bep());
      if (v > best_v) {
        best_v = v;
        best_b = b;
      }
    }
    // Interior maximum: one-sided slopes bracket zero within a small band.
    const double left = model.eval(alpha, best_b - 0.05, chart().ned_bep());
    const double right = model.eval(alpha, best_b + 0.05, chart().ned_bep());
    CHECK(left <= best_v);
    CHECK(right <= best_v);
    const double slope =
        std::abs(right - left) / 0.1;  // central slope at the argmax
    CHECK(slope <= 0.05);
  }
}

TEST_CASE("piecewise evaluation is Lipschitz") {
  const auto& model = noisy_model();
  const double bound = model.lipschitz_bound();
  CHECK(bound > 0.0);
  SplitMix64 rng(43);
  for (int i = 0; i < 1000; ++i) {
    const double a = 30.0 * rng.uniform01();
    const double b = 4.0 + 24.0 * rng.uniform01();
    const double n = 0.29 + 0.56 * rng.uniform01();
    const double da = 0.02 * (2.0 * rng.uniform01() - 1.0);
    const double db = 0.02 * (2.0 * rng.uniform01() - 1.0);
    const double dn = 0.002 * (2.0 * rng.uniform01() - 1.0);
    const double delta = std::abs(da) + std::abs(db) + std::abs(dn);
    const double diff =
        std::abs(model.eval(a + da, b + db, n + dn) - model.eval(a, b, n));
    CHECK(diff <= bound * delta + 1e-12);
  }
}

TEST_CASE("fitting is deterministic") {
  const auto m1 = fit_surrogate(noisy_samples());
  const auto m2 = fit_surrogate(noisy_samples());
  REQUIRE(m1.terms().size() == m2.terms().size());
  for (std::size_t i = 0; i < m1.terms().size(); ++i) {
    CHECK(m1.terms()[i].coef == m2.terms()[i].coef);
    REQUIRE(m1.terms()[i].factors.size() == m2.terms()[i].factors.size());
    for (std::size_t k = 0; k < m1.terms()[i].factors.size(); ++k) {
      CHECK(m1.terms()[i].factors[k].knot == m2.terms()[i].factors[k].knot);
      CHECK(m1.terms()[i].factors[k].dim == m2.terms()[i].factors[k].dim);
      CHECK(m1.terms()[i].factors[k].sign == m2.terms()[i].factors[k].sign);
    }
  }
}

TEST_CASE("pruned model GCV never exceeds the unpruned forward model") {
  const auto& model = noisy_model();
  CHECK(model.fit_stats().gcv > 0.0);
  CHECK(std::isfinite(model.fit_stats().gcv));
  CHECK(model.fit_stats().gcv <= model.fit_stats().gcv_forward);

  const auto clean = fit_surrogate(
      generate_training_set(chart(), GridSpec::paper(chart()), 0.0, 9));
  CHECK(clean.fit_stats().gcv <= clean.fit_stats().gcv_forward);
}

TEST_CASE("JSON serialization round trip") {
  const auto& model = noisy_model();
  const auto j = model.to_json();
  CHECK(j.at("schema_version") == 1);
  const auto back = EfficiencySurrogate::from_json(j);
  SplitMix64 rng(47);
  for (int i = 0; i < 200; ++i) {
    const double a = 30.0 * rng.uniform01();
    const double b = 4.0 + 24.0 * rng.uniform01();
    const double n = 0.29 + 0.56 * rng.uniform01();
    CHECK(back.eval(a, b, n) == model.eval(a, b, n));
  }
  const std::string path = "surrogate_roundtrip_test.json";
  model.save(path);
  const auto loaded = EfficiencySurrogate::load(path);
  CHECK(loaded.eval(15, 17, 0.7) == model.eval(15, 17, 0.7));
  std::remove(path.c_str());
}

TEST_CASE("cubic evaluation is C1 across knots and close to the linear one") {
  const auto& model = noisy_model();  // production fit evaluates cubic
  REQUIRE(model.cubic_eval_enabled());

  // Derivative continuity at a knot of the fitted model: central differences
  // straddling the knot agree with the analytic gradient.
  double knot = 0.0;
  bool found = false;
  for (const auto& t : model.terms()) {
    for (const auto& f : t.factors) {
      if (f.dim == 1 && f.knot > 6.0 && f.knot < 26.0) {
        knot = f.knot;
        found = true;
      }
    }
  }
  if (found) {
    const double h = 1e-6;
    const double left =
        (model.eval(15.0, knot, 0.7) - model.eval(15.0, knot - h, 0.7)) / h;
    const double right =
        (model.eval(15.0, knot + h, 0.7) - model.eval(15.0, knot, 0.7)) / h;
    CHECK(left == doctest::Approx(right).epsilon(1e-3).scale(1.0));
  }

  // The smoothed model stays close to the piecewise-linear one.
  const auto& linear = testing::pl_model();
  SplitMix64 rng(53);
  for (int i = 0; i < 200; ++i) {
    const double a = 2.0 + 26.0 * rng.uniform01();
    const double b = 6.0 + 20.0 * rng.uniform01();
    const double n = 0.3 + 0.5 * rng.uniform01();
    CHECK(model.eval(a, b, n) ==
          doctest::Approx(linear.eval(a, b, n)).epsilon(0.05).scale(1.0));
  }
}
