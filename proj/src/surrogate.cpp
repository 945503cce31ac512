#include "hydrofcr/surrogate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include "hydrofcr/rng.hpp"

namespace hydrofcr {

namespace {

bool is_holdout(const HillChartSample& s) {
  // Deterministic 80/20 split keyed on the grid coordinates.
  return hash_coords(s.alpha_deg, s.beta_deg, s.ned) % 5 == 0;
}

double hinge(int sign, double knot, double x) {
  const double v = sign > 0 ? x - knot : knot - x;
  return v > 0.0 ? v : 0.0;
}

struct TermColumn {
  // Evaluates a term over a sample matrix.
  static Eigen::VectorXd eval(const BasisTerm& t,
                              const Eigen::MatrixXd& x) {
    Eigen::VectorXd col = Eigen::VectorXd::Ones(x.rows());
    for (const auto& f : t.factors) {
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        col[i] *= hinge(f.sign, f.knot, x(i, f.dim));
      }
    }
    return col;
  }
};

struct Candidate {
  double gain = -std::numeric_limits<double>::infinity();
  int parent = -1;
  int dim = -1;
  double knot = 0.0;
  bool use_plus = false;
  bool use_minus = false;
};

// Greville-style GCV complexity charge: parameters plus a penalty per knot.
double gcv_score(double rss, int n, int n_terms, int n_knots,
                 double penalty) {
  const double c = n_terms + penalty * n_knots;
  if (c >= n) return std::numeric_limits<double>::infinity();
  const double denom = 1.0 - c / n;
  return (rss / n) / (denom * denom);
}

}  // namespace

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

EfficiencySurrogate fit_surrogate(std::span<const HillChartSample> samples,
                                  const FitConfig& cfg) {
  if (samples.size() < 50) {
    throw std::invalid_argument("fit_surrogate: need at least 50 samples");
  }
  if (cfg.max_terms < 2 || cfg.max_degree < 1) {
    throw std::invalid_argument("fit_surrogate: bad configuration");
  }

  std::vector<const HillChartSample*> train, holdout;
  train.reserve(samples.size());
  for (const auto& s : samples) {
    (is_holdout(s) ? holdout : train).push_back(&s);
  }
  if (train.size() < 30 || holdout.empty()) {
    throw std::invalid_argument("fit_surrogate: degenerate holdout split");
  }

  const int n = static_cast<int>(train.size());
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = train[i]->alpha_deg;
    x(i, 1) = train[i]->beta_deg;
    x(i, 2) = train[i]->ned;
    y[i] = train[i]->eta;
  }

  std::array<std::array<double, 2>, 3> ranges;
  std::array<std::vector<double>, 3> knots;
  std::array<std::vector<int>, 3> order;  // train indices sorted by dim value
  for (int d = 0; d < 3; ++d) {
    ranges[d] = {x.col(d).minCoeff(), x.col(d).maxCoeff()};
    std::set<double> distinct(x.col(d).data(), x.col(d).data() + n);
    knots[d].assign(distinct.begin(), distinct.end());
    if (knots[d].size() < 2) {
      throw std::invalid_argument(
          "fit_surrogate: input dimension " + std::to_string(d) +
          " is constant");
    }
    order[d].resize(n);
    for (int i = 0; i < n; ++i) order[d][i] = i;
    std::stable_sort(order[d].begin(), order[d].end(),
                     [&](int a, int b) { return x(a, d) < x(b, d); });
  }

  const double y_mean = y.mean();
  const double tss = (y.array() - y_mean).square().sum();
  if (tss <= 1e-12 * n) {
    throw std::runtime_error("fit_surrogate: constant response");
  }

  // Forward pass state: orthonormal basis q_ (columns), current residual.
  const int max_cols = cfg.max_terms;
  Eigen::MatrixXd basis(n, max_cols);   // raw term columns
  Eigen::MatrixXd q(n, max_cols);       // orthonormalized
  std::vector<BasisTerm> terms;
  terms.push_back(BasisTerm{});  // intercept
  basis.col(0).setOnes();
  q.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::VectorXd res = y - Eigen::VectorXd::Constant(n, y_mean);
  int m = 1;

  // Appends a raw column, orthonormalizing against the current basis.
  // Returns false when the column is numerically dependent.
  auto append_column = [&](const Eigen::VectorXd& col,
                           const BasisTerm& term) -> bool {
    if (m >= max_cols) return false;
    Eigen::VectorXd v = col;
    for (int pass = 0; pass < 2; ++pass) {
      v -= q.leftCols(m) * (q.leftCols(m).transpose() * v);
    }
    const double norm = v.norm();
    if (norm <= 1e-9 * std::max(1.0, col.norm())) return false;
    basis.col(m) = col;
    q.col(m) = v / norm;
    res -= q.col(m) * q.col(m).dot(res);
    terms.push_back(term);
    ++m;
    return true;
  };

  while (m < max_cols) {
    Candidate best;
    const int n_parents = m;
    for (int p = 0; p < n_parents; ++p) {
      if (static_cast<int>(terms[p].factors.size()) >= cfg.max_degree)
        continue;
      Eigen::VectorXd parent_col = basis.col(p);
      for (int d = 0; d < 3; ++d) {
        bool used = false;
        for (const auto& f : terms[p].factors) used |= (f.dim == d);
        if (used) continue;

        // Scan knots descending with running suffix sums so every knot is
        // evaluated in O(m) after an O(n*m) sweep.
        const auto& idx = order[d];
        const auto& kn = knots[d];
        const int n_knots = static_cast<int>(kn.size());

        // Totals over all samples (for prefix = total - suffix).
        Eigen::VectorXd t0 = Eigen::VectorXd::Zero(m);  // sum p*q_j
        Eigen::VectorXd t1 = Eigen::VectorXd::Zero(m);  // sum p*x*q_j
        double t0r = 0.0, t1r = 0.0;                    // same against res
        double t2c = 0.0, t2b = 0.0, t2a = 0.0;         // p^2, p^2 x, p^2 x^2
        for (int i = 0; i < n; ++i) {
          const double p_i = parent_col[i];
          if (p_i == 0.0) continue;
          const double xi = x(i, d);
          t0 += p_i * q.row(i).head(m).transpose();
          t1 += p_i * xi * q.row(i).head(m).transpose();
          t0r += p_i * res[i];
          t1r += p_i * xi * res[i];
          t2c += p_i * p_i;
          t2b += p_i * p_i * xi;
          t2a += p_i * p_i * xi * xi;
        }

        Eigen::VectorXd s0 = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd s1 = Eigen::VectorXd::Zero(m);
        double s0r = 0.0, s1r = 0.0, s2c = 0.0, s2b = 0.0, s2a = 0.0;
        int suffix_count = 0, nonzero_total = 0;
        for (int i = 0; i < n; ++i) {
          if (parent_col[i] != 0.0) ++nonzero_total;
        }

        int pos = n - 1;  // walks the sorted order from the top
        for (int k = n_knots - 1; k >= 0; --k) {
          const double t = kn[k];
          while (pos >= 0 && x(idx[pos], d) > t) {
            const int i = idx[pos];
            const double p_i = parent_col[i];
            if (p_i != 0.0) {
              const double xi = x(i, d);
              s0 += p_i * q.row(i).head(m).transpose();
              s1 += p_i * xi * q.row(i).head(m).transpose();
              s0r += p_i * res[i];
              s1r += p_i * xi * res[i];
              s2c += p_i * p_i;
              s2b += p_i * p_i * xi;
              s2a += p_i * p_i * xi * xi;
              ++suffix_count;
            }
            --pos;
          }

          // Plus hinge: support x > t.
          double gain_plus = 0.0, nplus2 = 0.0, rplus = 0.0;
          Eigen::VectorXd a;
          const bool plus_ok = suffix_count >= cfg.min_support;
          if (plus_ok) {
            a = s1 - t * s0;
            rplus = s1r - t * s0r;
            const double norm2 = s2a - 2.0 * t * s2b + t * t * s2c;
            nplus2 = norm2 - a.squaredNorm();
            if (nplus2 > 1e-12 * std::max(1.0, norm2)) {
              gain_plus = rplus * rplus / nplus2;
            } else {
              nplus2 = 0.0;
            }
          }

          // Minus hinge: support x < t.
          double gain_minus = 0.0;
          const int prefix_count = nonzero_total - suffix_count;
          const bool minus_ok = prefix_count >= cfg.min_support;
          double rminus = 0.0, nminus2 = 0.0, cross = 0.0;
          if (minus_ok) {
            Eigen::VectorXd b = t * (t0 - s0) - (t1 - s1);
            rminus = t * (t0r - s0r) - (t1r - s1r);
            const double norm2 = t * t * (t2c - s2c) -
                                 2.0 * t * (t2b - s2b) + (t2a - s2a);
            nminus2 = norm2 - b.squaredNorm();
            if (nminus2 > 1e-12 * std::max(1.0, norm2)) {
              if (nplus2 > 0.0) {
                cross = -b.dot(a);  // disjoint supports: raw dot is zero
                const double r_adj = rminus - cross / nplus2 * rplus;
                const double n_adj = nminus2 - cross * cross / nplus2;
                gain_minus = n_adj > 1e-12 ? r_adj * r_adj / n_adj : 0.0;
              } else {
                gain_minus = rminus * rminus / nminus2;
              }
            }
          }

          const double gain = gain_plus + gain_minus;
          if (gain > best.gain + 1e-18 && gain > 0.0) {
            best = Candidate{gain, p, d, t, gain_plus > 0.0,
                             gain_minus > 0.0};
          }
        }
      }
    }

    if (best.parent < 0 || best.gain < cfg.min_gain_rel * tss) break;

    // Copy: append_column grows `terms`, which would invalidate a reference.
    const BasisTerm parent_term = terms[best.parent];
    bool added = false;
    if (best.use_plus && m < max_cols) {
      BasisTerm t = parent_term;
      t.factors.push_back(HingeFactor{best.dim, +1, best.knot});
      added |= append_column(TermColumn::eval(t, x), t);
    }
    if (best.use_minus && m < max_cols) {
      BasisTerm t = parent_term;
      t.factors.push_back(HingeFactor{best.dim, -1, best.knot});
      added |= append_column(TermColumn::eval(t, x), t);
    }
    if (!added) break;
  }

  // Backward pruning by GCV over the training set.
  const Eigen::MatrixXd b_all = basis.leftCols(m);
  const Eigen::MatrixXd gram = b_all.transpose() * b_all;
  const Eigen::VectorXd bty = b_all.transpose() * y;
  const double yty = y.squaredNorm();

  auto subset_rss = [&](const std::vector<int>& keep,
                        Eigen::VectorXd* coefs) -> double {
    const int k = static_cast<int>(keep.size());
    Eigen::MatrixXd g(k, k);
    Eigen::VectorXd v(k);
    for (int i = 0; i < k; ++i) {
      v[i] = bty[keep[i]];
      for (int j = 0; j < k; ++j) g(i, j) = gram(keep[i], keep[j]);
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
    Eigen::VectorXd beta = ldlt.solve(v);
    if (coefs) *coefs = beta;
    const double rss = yty - 2.0 * beta.dot(v) + beta.dot(g * beta);
    return std::max(rss, 0.0);
  };
  auto knot_count = [&](const std::vector<int>& keep) {
    int c = 0;
    for (int i : keep) c += static_cast<int>(terms[i].factors.size());
    return c;
  };

  std::vector<int> current(m);
  for (int i = 0; i < m; ++i) current[i] = i;
  std::vector<int> best_set = current;
  const double gcv_forward = gcv_score(subset_rss(current, nullptr), n, m,
                                       knot_count(current), cfg.gcv_penalty);
  double best_gcv = gcv_forward;

  while (current.size() > 1) {
    double step_best = std::numeric_limits<double>::infinity();
    int drop_pos = -1;
    for (std::size_t pos = 0; pos < current.size(); ++pos) {
      if (current[pos] == 0) continue;  // keep the intercept
      std::vector<int> trial;
      trial.reserve(current.size() - 1);
      for (std::size_t i = 0; i < current.size(); ++i) {
        if (i != pos) trial.push_back(current[i]);
      }
      const double g = gcv_score(subset_rss(trial, nullptr), n,
                                 static_cast<int>(trial.size()),
                                 knot_count(trial), cfg.gcv_penalty);
      if (g < step_best) {
        step_best = g;
        drop_pos = static_cast<int>(pos);
      }
    }
    if (drop_pos < 0) break;
    current.erase(current.begin() + drop_pos);
    if (step_best <= best_gcv) {
      best_gcv = step_best;
      best_set = current;
    }
  }

  Eigen::VectorXd final_coefs;
  subset_rss(best_set, &final_coefs);
  std::vector<BasisTerm> final_terms;
  final_terms.reserve(best_set.size());
  for (std::size_t i = 0; i < best_set.size(); ++i) {
    BasisTerm t = terms[best_set[i]];
    t.coef = final_coefs[static_cast<int>(i)];
    final_terms.push_back(std::move(t));
  }

  FitStats stats;
  stats.gcv = best_gcv;
  stats.gcv_forward = gcv_forward;
  stats.n_train = n;
  stats.n_holdout = static_cast<int>(holdout.size());

  EfficiencySurrogate model(std::move(final_terms), ranges, stats,
                            cfg.cubic_eval);

  // Held-out quality.
  double sse = 0.0, sum = 0.0;
  for (const auto* s : holdout) sum += s->eta;
  const double h_mean = sum / holdout.size();
  double sst = 0.0;
  for (const auto* s : holdout) {
    const double pred = model.eval(s->alpha_deg, s->beta_deg, s->ned);
    sse += (pred - s->eta) * (pred - s->eta);
    sst += (s->eta - h_mean) * (s->eta - h_mean);
  }
  stats.mse = sse / holdout.size();
  stats.r2 = sst > 0.0 ? 1.0 - sse / sst : 0.0;

  return EfficiencySurrogate(model.terms(), ranges, stats, cfg.cubic_eval);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

EfficiencySurrogate::EfficiencySurrogate(
    std::vector<BasisTerm> terms,
    std::array<std::array<double, 2>, 3> input_ranges, FitStats stats,
    bool cubic_eval)
    : terms_(std::move(terms)),
      ranges_(input_ranges),
      stats_(stats),
      cubic_(cubic_eval) {
  rebuild_side_knots();
}

void EfficiencySurrogate::rebuild_side_knots() {
  for (int d = 0; d < 3; ++d) {
    std::set<double> distinct;
    for (const auto& t : terms_) {
      for (const auto& f : t.factors) {
        if (f.dim == d) distinct.insert(f.knot);
      }
    }
    auto& s = side_[d];
    s.knot.assign(distinct.begin(), distinct.end());
    s.lo.resize(s.knot.size());
    s.hi.resize(s.knot.size());
    for (std::size_t i = 0; i < s.knot.size(); ++i) {
      const double below =
          i == 0 ? ranges_[d][0] : s.knot[i - 1];
      const double above =
          i + 1 == s.knot.size() ? ranges_[d][1] : s.knot[i + 1];
      s.lo[i] = 0.5 * (below + s.knot[i]);
      s.hi[i] = 0.5 * (s.knot[i] + above);
    }
  }
}

namespace {

// C1 truncated-cubic replacement for a hinge, matching the linear hinge
// value and slope at the side knots.
double cubic_hinge(int sign, double knot, double lo, double hi, double x) {
  if (hi <= lo) return hinge(sign, knot, x);
  if (sign > 0) {
    if (x <= lo) return 0.0;
    if (x >= hi) return x - knot;
    const double length = hi - lo;
    const double v = hi - knot;
    const double a = (3.0 * v - length) / (length * length);
    const double b = (length - 2.0 * v) / (length * length * length);
    const double u = x - lo;
    return a * u * u + b * u * u * u;
  }
  if (x >= hi) return 0.0;
  if (x <= lo) return knot - x;
  const double length = hi - lo;
  const double v = knot - lo;
  const double a = (3.0 * v - length) / (length * length);
  const double b = (length - 2.0 * v) / (length * length * length);
  const double u = hi - x;
  return a * u * u + b * u * u * u;
}

double cubic_hinge_derivative(int sign, double knot, double lo, double hi,
                              double x) {
  if (hi <= lo) {
    return sign > 0 ? (x >= knot ? 1.0 : 0.0) : (x < knot ? -1.0 : 0.0);
  }
  if (sign > 0) {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    const double length = hi - lo;
    const double v = hi - knot;
    const double a = (3.0 * v - length) / (length * length);
    const double b = (length - 2.0 * v) / (length * length * length);
    const double u = x - lo;
    return 2.0 * a * u + 3.0 * b * u * u;
  }
  if (x >= hi) return 0.0;
  if (x <= lo) return -1.0;
  const double length = hi - lo;
  const double v = knot - lo;
  const double a = (3.0 * v - length) / (length * length);
  const double b = (length - 2.0 * v) / (length * length * length);
  const double u = hi - x;
  return -(2.0 * a * u + 3.0 * b * u * u);
}

}  // namespace

double EfficiencySurrogate::factor_value(const HingeFactor& f,
                                         double x) const {
  if (!cubic_) return hinge(f.sign, f.knot, x);
  const auto& s = side_[f.dim];
  const auto it = std::lower_bound(s.knot.begin(), s.knot.end(), f.knot);
  const std::size_t i = static_cast<std::size_t>(it - s.knot.begin());
  return cubic_hinge(f.sign, f.knot, s.lo[i], s.hi[i], x);
}

double EfficiencySurrogate::factor_derivative(const HingeFactor& f,
                                              double x) const {
  if (!cubic_) {
    return f.sign > 0 ? (x >= f.knot ? 1.0 : 0.0)
                      : (x < f.knot ? -1.0 : 0.0);
  }
  const auto& s = side_[f.dim];
  const auto it = std::lower_bound(s.knot.begin(), s.knot.end(), f.knot);
  const std::size_t i = static_cast<std::size_t>(it - s.knot.begin());
  return cubic_hinge_derivative(f.sign, f.knot, s.lo[i], s.hi[i], x);
}

EfficiencySurrogate::EvalResult EfficiencySurrogate::eval_ex(
    double alpha_deg, double beta_deg, double ned) const {
  std::array<double, 3> p{alpha_deg, beta_deg, ned};
  bool clamped = false;
  for (int d = 0; d < 3; ++d) {
    if (p[d] < ranges_[d][0]) {
      p[d] = ranges_[d][0];
      clamped = true;
    } else if (p[d] > ranges_[d][1]) {
      p[d] = ranges_[d][1];
      clamped = true;
    }
  }
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coef;
    for (const auto& f : t.factors) {
      if (v == 0.0) break;
      v *= factor_value(f, p[f.dim]);
    }
    sum += v;
  }
  return EvalResult{sum, clamped};
}

double EfficiencySurrogate::eval(double alpha_deg, double beta_deg,
                                 double ned) const {
  return eval_ex(alpha_deg, beta_deg, ned).eta;
}

std::array<double, 3> EfficiencySurrogate::gradient(double alpha_deg,
                                                    double beta_deg,
                                                    double ned) const {
  std::array<double, 3> p{alpha_deg, beta_deg, ned};
  for (int d = 0; d < 3; ++d) {
    p[d] = std::clamp(p[d], ranges_[d][0], ranges_[d][1]);
  }
  std::array<double, 3> grad{0.0, 0.0, 0.0};
  for (const auto& t : terms_) {
    if (t.factors.empty()) continue;
    // Product rule over the (at most max_degree) hinge factors.
    for (std::size_t k = 0; k < t.factors.size(); ++k) {
      double v = t.coef * factor_derivative(t.factors[k], p[t.factors[k].dim]);
      for (std::size_t j = 0; j < t.factors.size(); ++j) {
        if (j == k) continue;
        v *= factor_value(t.factors[j], p[t.factors[j].dim]);
      }
      grad[t.factors[k].dim] += v;
    }
  }
  return grad;
}

double EfficiencySurrogate::lipschitz_bound() const {
  // sum over terms of |coef| * prod of per-factor bounds, with one factor
  // replaced by its slope bound (1 for a hinge, 4/3 for the blended cubic).
  const double slope_bound = cubic_ ? 4.0 / 3.0 : 1.0;
  double bound = 0.0;
  for (const auto& t : terms_) {
    if (t.factors.empty()) continue;
    for (std::size_t k = 0; k < t.factors.size(); ++k) {
      double v = std::abs(t.coef) * slope_bound;
      for (std::size_t j = 0; j < t.factors.size(); ++j) {
        if (j == k) continue;
        const auto& f = t.factors[j];
        const double span = ranges_[f.dim][1] - ranges_[f.dim][0];
        v *= span;  // |hinge| <= dimension span over the clamped domain
      }
      bound += v;
    }
  }
  return bound;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

nlohmann::json EfficiencySurrogate::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : terms_) {
    nlohmann::json factors = nlohmann::json::array();
    for (const auto& f : t.factors) {
      factors.push_back({{"dim", f.dim}, {"sign", f.sign}, {"knot", f.knot}});
    }
    terms.push_back({{"coef", t.coef}, {"factors", factors}});
  }
  return nlohmann::json{
      {"schema_version", 1},
      {"type", "hydrofcr_efficiency_surrogate"},
      {"dims", {"alpha_deg", "beta_deg", "n_ed"}},
      {"input_ranges",
       {{ranges_[0][0], ranges_[0][1]},
        {ranges_[1][0], ranges_[1][1]},
        {ranges_[2][0], ranges_[2][1]}}},
      {"terms", terms},
      {"cubic_eval", cubic_},
      {"fit_stats",
       {{"mse", stats_.mse},
        {"r2", stats_.r2},
        {"gcv", stats_.gcv},
        {"gcv_forward", stats_.gcv_forward},
        {"n_train", stats_.n_train},
        {"n_holdout", stats_.n_holdout}}}};
}

EfficiencySurrogate EfficiencySurrogate::from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != 1 ||
      j.at("type").get<std::string>() != "hydrofcr_efficiency_surrogate") {
    throw std::runtime_error("surrogate: unsupported model document");
  }
  std::vector<BasisTerm> terms;
  for (const auto& t : j.at("terms")) {
    BasisTerm term;
    term.coef = t.at("coef").get<double>();
    for (const auto& f : t.at("factors")) {
      term.factors.push_back(HingeFactor{f.at("dim").get<int>(),
                                         f.at("sign").get<int>(),
                                         f.at("knot").get<double>()});
    }
    terms.push_back(std::move(term));
  }
  std::array<std::array<double, 2>, 3> ranges;
  for (int d = 0; d < 3; ++d) {
    ranges[d] = {j.at("input_ranges")[d][0].get<double>(),
                 j.at("input_ranges")[d][1].get<double>()};
  }
  FitStats stats;
  const auto& fs = j.at("fit_stats");
  stats.mse = fs.at("mse").get<double>();
  stats.r2 = fs.at("r2").get<double>();
  stats.gcv = fs.at("gcv").get<double>();
  stats.gcv_forward = fs.at("gcv_forward").get<double>();
  stats.n_train = fs.at("n_train").get<int>();
  stats.n_holdout = fs.at("n_holdout").get<int>();
  return EfficiencySurrogate(std::move(terms), ranges, stats,
                             j.at("cubic_eval").get<bool>());
}

void EfficiencySurrogate::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("surrogate: cannot open " + path);
  f << to_json().dump(2) << "\n";
}

EfficiencySurrogate EfficiencySurrogate::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("surrogate: cannot open " + path);
  nlohmann::json j;
  f >> j;
  return from_json(j);
}

}  // namespace hydrofcr
