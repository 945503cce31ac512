#pragma once

// Efficiency meta-model eta_h(alpha, beta, n_ED): multivariate adaptive
// regression splines with forward stepwise term addition and backward
// pruning by generalized cross-validation.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hydrofcr/hillchart.hpp"

namespace hydrofcr {

/// One hinge h(x) = max(0, sign*(x - knot)) on input dimension dim
/// (0 = alpha, 1 = beta, 2 = n_ED).
struct HingeFactor {
  int dim;
  int sign;  // +1 or -1
  double knot;
};

/// Product of up to max_degree hinges; an empty factor list is the intercept.
struct BasisTerm {
  std::vector<HingeFactor> factors;
  double coef = 0.0;
};

struct FitConfig {
  int max_terms = 40;          // basis functions including the intercept
  int max_degree = 2;          // hinges per term
  double gcv_penalty = 3.0;    // cost per knot in the GCV complexity charge
  double holdout_fraction = 0.2;  // informational; split is hash-based 80/20
  double min_gain_rel = 1e-9;  // forward stop: gain below this x TSS
  int min_support = 10;        // nonzero samples required per new column
  bool cubic_eval = false;     // C1 knot-blended evaluation instead of C0
};

struct FitStats {
  double mse = 0.0;          // held-out mean squared error
  double r2 = 0.0;           // held-out coefficient of determination
  double gcv = 0.0;          // training GCV of the pruned model
  double gcv_forward = 0.0;  // training GCV of the unpruned forward model
  int n_train = 0;
  int n_holdout = 0;
};

class EfficiencySurrogate {
 public:
  EfficiencySurrogate() = default;
  EfficiencySurrogate(std::vector<BasisTerm> terms,
                      std::array<std::array<double, 2>, 3> input_ranges,
                      FitStats stats = {}, bool cubic_eval = false);

  struct EvalResult {
    double eta;
    bool clamped;
  };

  double eval(double alpha_deg, double beta_deg, double ned) const;
  EvalResult eval_ex(double alpha_deg, double beta_deg, double ned) const;

  /// Analytic gradient of the basis expansion (right-sided at knots).
  std::array<double, 3> gradient(double alpha_deg, double beta_deg,
                                 double ned) const;

  const std::vector<BasisTerm>& terms() const { return terms_; }
  const std::array<std::array<double, 2>, 3>& input_ranges() const {
    return ranges_;
  }
  const FitStats& fit_stats() const { return stats_; }
  bool cubic_eval_enabled() const { return cubic_; }
  void set_cubic_eval(bool on) { cubic_ = on; }

  /// Upper bound on the gradient norm over the clamped domain.
  double lipschitz_bound() const;

  nlohmann::json to_json() const;
  static EfficiencySurrogate from_json(const nlohmann::json& j);

  void save(const std::string& path) const;
  static EfficiencySurrogate load(const std::string& path);

 private:
  void rebuild_side_knots();
  double factor_value(const HingeFactor& f, double x) const;
  double factor_derivative(const HingeFactor& f, double x) const;

  std::vector<BasisTerm> terms_;
  std::array<std::array<double, 2>, 3> ranges_{};
  FitStats stats_{};
  bool cubic_ = false;
  // Per-dimension side knots for the cubic evaluation, parallel to the
  // sorted distinct model knots of that dimension.
  struct SideKnots {
    std::vector<double> knot, lo, hi;
  };
  std::array<SideKnots, 3> side_{};
};

/// Fits the meta-model. Requires >= 50 samples spanning all three
/// dimensions; throws std::invalid_argument otherwise and std::runtime_error
/// for a constant response.
EfficiencySurrogate fit_surrogate(std::span<const HillChartSample> samples,
                                  const FitConfig& cfg = {});

}  // namespace hydrofcr
