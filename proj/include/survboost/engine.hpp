#pragma once

// Functional gradient descent over a convex survival loss:
//   f[0] = 0; repeat m_stop times: Z = pseudo-response at f, g = base fit of
//   Z on X, f += nu * g.
// plus V-fold cross-validation of m_stop on a fixed iteration grid.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "survboost/errors.hpp"
#include "survboost/km.hpp"
#include "survboost/learners.hpp"
#include "survboost/losses.hpp"
#include "survboost/parallel.hpp"
#include "survboost/survdata.hpp"

namespace survboost {

struct BoostConfig {
  LossKind loss = LossKind::Gehan;
  BaseLearnerKind learner = BaseLearnerKind::linear();
  double nu = 0.1;
  int m_max = 1000;
  int cv_folds = 5;
  int cv_grid_step = 10;
  std::uint64_t seed = 1;
  bool stratify_folds = false;
  unsigned threads = 1;
  std::optional<double> ipw_cap;

  void validate() const {
    if (!(nu > 0.0 && nu <= 1.0)) throw UsageError("nu must lie in (0, 1]");
    if (m_max < 1) throw UsageError("mstop-max must be at least 1");
    if (cv_folds < 2) throw UsageError("folds must be at least 2");
    if (cv_grid_step < 1) throw UsageError("grid-step must be positive");
    if (cv_grid_step > m_max) throw UsageError("empty CV grid");
    if (ipw_cap && !(*ipw_cap >= 1.0)) throw UsageError("IPW weight cap must be >= 1");
  }
};

/// Additive predictor f = nu * sum_m g_m on the standardized covariate scale.
struct Ensemble {
  LossKind loss = LossKind::Gehan;
  BaseLearnerKind learner = BaseLearnerKind::linear();
  double nu = 0.1;
  std::vector<FittedLearner> updates;
  Vector linear_coefficients;  // sum of nu * slope per column (linear learner)
  Standardization standardization;
  std::vector<std::string> column_names;

  std::size_t m_stop() const { return updates.size(); }
  std::size_t dimension() const { return static_cast<std::size_t>(standardization.means.size()); }

  /// The iteration-m model.
  Ensemble prefix(std::size_t m) const {
    Ensemble out = *this;
    out.updates.resize(std::min(m, updates.size()));
    out.linear_coefficients.setZero();
    if (learner.is_linear())
      for (const auto& u : out.updates) {
        const auto& lin = std::get<LinearUpdate>(u);
        out.linear_coefficients(static_cast<Eigen::Index>(lin.column)) += nu * lin.slope;
      }
    return out;
  }

  /// Columns with a nonzero accumulated coefficient.
  std::vector<std::size_t> active_set() const {
    std::vector<std::size_t> active;
    for (Eigen::Index j = 0; j < linear_coefficients.size(); ++j)
      if (linear_coefficients(j) != 0.0) active.push_back(static_cast<std::size_t>(j));
    return active;
  }
};

/// Predictions for rows already on the standardized scale.
inline Vector predict(const Ensemble& ensemble, const Matrix& x_standardized) {
  if (static_cast<std::size_t>(x_standardized.cols()) != ensemble.dimension())
    throw UsageError("predict: expected " + std::to_string(ensemble.dimension()) +
                     " columns, got " + std::to_string(x_standardized.cols()));
  Vector f = Vector::Zero(x_standardized.rows());
  for (const auto& u : ensemble.updates)
    f += ensemble.nu * predict_learner_rows(u, x_standardized);
  return f;
}

/// Predictions for raw covariates; applies the training standardization.
inline Vector predict_raw(const Ensemble& ensemble, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != ensemble.dimension())
    throw UsageError("predict: dimension mismatch");
  return predict(ensemble, ensemble.standardization.apply(x));
}

// ---------------------------------------------------------------------------

/// A loss bound to one dataset's outcomes.
class LossProblem {
 public:
  LossProblem(const SurvivalDataset& data, LossKind kind,
              std::optional<double> ipw_cap = std::nullopt)
      : kind_(kind), time_(data.time()), log_time_(log_times(data)), status_(data.status()) {
    if (kind == LossKind::IpwL2) weights_ = ipw_weights(data, ipw_cap);
  }

  LossKind kind() const { return kind_; }
  std::size_t size() const { return static_cast<std::size_t>(time_.size()); }
  const Vector& log_time() const { return log_time_; }
  const Vector& weights() const { return weights_; }

  double loss(const Vector& f) const {
    if (kind_ == LossKind::CoxPH)
      return cox_negative_log_pl(as_span(f), as_span(time_), as_span(status_));
    const Vector e = log_time_ - f;
    const ResidualContext ctx = context(e);
    switch (kind_) {
      case LossKind::Gehan: return gehan_loss(ctx);
      case LossKind::IpwL2: return ipw_l2_loss(ctx);
      default: return plain_l2_loss(ctx);
    }
  }

  /// Negative gradient in the losses-module convention.
  Vector negative_gradient(const Vector& f) const {
    if (kind_ == LossKind::CoxPH)
      return cox_negative_gradient(as_span(f), as_span(time_), as_span(status_));
    const Vector e = log_time_ - f;
    const ResidualContext ctx = context(e);
    switch (kind_) {
      case LossKind::Gehan: return gehan_negative_gradient_fast(ctx);
      case LossKind::IpwL2: return ipw_l2_negative_gradient(ctx);
      default: return plain_l2_negative_gradient(ctx);
    }
  }

  /// Pseudo-response fitted by the base learner: n times the exact negative
  /// gradient for every loss. Gehan and Cox gradients already carry that
  /// scale, squared error is rescaled here (Z_i = w_i e_i).
  Vector pseudo_response(const Vector& f) const {
    Vector z = negative_gradient(f);
    if (kind_ == LossKind::PlainL2 || kind_ == LossKind::IpwL2)
      z *= static_cast<double>(size());
    return z;
  }

 private:
  ResidualContext context(const Vector& e) const {
    return {as_span(e), as_span(status_),
            kind_ == LossKind::IpwL2 ? as_span(weights_) : std::span<const double>{}};
  }

  LossKind kind_;
  Vector time_;
  Vector log_time_;
  StatusVector status_;
  Vector weights_;
};

/// Incremental boosting state. Calling step() m times from construction
/// produces the same bits as any other split of those m steps.
class Booster {
 public:
  Booster(const SurvivalDataset& data, const BoostConfig& config,
          Standardization standardization)
      : x_(data.covariates()),
        problem_(data, config.loss, config.ipw_cap),
        f_(Vector::Zero(static_cast<Eigen::Index>(data.n()))) {
    if (!(config.nu > 0.0 && config.nu <= 1.0)) throw UsageError("nu must lie in (0, 1]");
    if (config.learner.is_linear()) linear_.emplace(x_);
    ensemble_.loss = config.loss;
    ensemble_.learner = config.learner;
    ensemble_.nu = config.nu;
    ensemble_.linear_coefficients = Vector::Zero(static_cast<Eigen::Index>(data.d()));
    ensemble_.standardization = std::move(standardization);
    ensemble_.column_names = data.column_names();
  }

  Booster(const Booster&) = delete;
  Booster& operator=(const Booster&) = delete;

  /// One round; returns the learner it appended.
  const FittedLearner& step() {
    const Vector z = problem_.pseudo_response(f_);
    if (!z.allFinite())
      throw NumericError("non-finite gradient at iteration " +
                         std::to_string(ensemble_.m_stop() + 1));
    FittedLearner g = linear_ ? FittedLearner{linear_->fit(z)}
                              : FittedLearner{fit_tree(z, x_, ensemble_.learner.depth())};
    f_ += ensemble_.nu * predict_learner_rows(g, x_);
    if (const auto* lin = std::get_if<LinearUpdate>(&g))
      ensemble_.linear_coefficients(static_cast<Eigen::Index>(lin->column)) +=
          ensemble_.nu * lin->slope;
    ensemble_.updates.push_back(std::move(g));
    return ensemble_.updates.back();
  }

  void run(std::size_t steps) {
    for (std::size_t m = 0; m < steps; ++m) step();
  }

  const Ensemble& ensemble() const { return ensemble_; }
  const Vector& fitted() const { return f_; }
  double training_loss() const { return problem_.loss(f_); }
  const LossProblem& problem() const { return problem_; }

 private:
  Matrix x_;
  LossProblem problem_;
  std::optional<ComponentwiseLinearFitter> linear_;
  Vector f_;
  Ensemble ensemble_;
};

/// Exactly m_stop rounds on (already standardized) data.
inline Ensemble boost(const SurvivalDataset& data, const BoostConfig& config,
                      std::size_t m_stop,
                      std::optional<Standardization> standardization = std::nullopt) {
  Booster booster(data, config,
                  standardization ? std::move(*standardization)
                                  : Standardization::identity(data.d()));
  booster.run(m_stop);
  return booster.ensemble();
}

/// Standardizes raw data, boosts, and keeps the standardization for predict_raw.
inline Ensemble fit_ensemble(const SurvivalDataset& raw, const BoostConfig& config,
                             std::size_t m_stop) {
  auto [scaled, st] = standardize(raw);
  return boost(scaled, config, m_stop, std::move(st));
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

struct CvCurve {
  std::vector<int> grid;
  std::vector<double> mean_heldout_loss;
  int chosen_mstop = 0;
  std::vector<int> fold_of_row;
  std::vector<std::string> warnings;
};

/// Seeded shuffle, then contiguous blocks (or, stratified, events and
/// censored rows dealt round-robin separately).
inline std::vector<int> assign_folds(const SurvivalDataset& data, int folds,
                                     std::uint64_t seed, bool stratify) {
  const std::size_t n = data.n();
  if (folds < 2 || static_cast<std::size_t>(folds) > n)
    throw UsageError("folds must lie in [2, n]");
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> fold(n, 0);
  if (stratify) {
    std::stable_partition(perm.begin(), perm.end(),
                          [&](std::size_t i) { return data.status()(static_cast<Eigen::Index>(i)) == 1; });
    for (std::size_t r = 0; r < n; ++r) fold[perm[r]] = static_cast<int>(r % static_cast<std::size_t>(folds));
  } else {
    const std::size_t v = static_cast<std::size_t>(folds);
    for (std::size_t r = 0; r < n; ++r) fold[perm[r]] = static_cast<int>(r * v / n);
  }
  return fold;
}

inline std::vector<int> cv_grid(const BoostConfig& config) {
  if (config.cv_grid_step < 1 || config.cv_grid_step > config.m_max)
    throw UsageError("empty CV grid");
  std::vector<int> grid;
  for (int m = config.cv_grid_step; m <= config.m_max; m += config.cv_grid_step) grid.push_back(m);
  return grid;
}

/// Held-out loss of every grid point for one fold. The held-out loss is the
/// training functional evaluated on the held-out rows alone (IPW weights
/// come from a censoring curve fitted to those rows).
inline std::vector<double> heldout_losses(const SurvivalDataset& train,
                                          const SurvivalDataset& test,
                                          const BoostConfig& config,
                                          const std::vector<int>& grid) {
  Booster booster(train, config, Standardization::identity(train.d()));
  const LossProblem heldout(test, config.loss, config.ipw_cap);
  Vector f_test = Vector::Zero(static_cast<Eigen::Index>(test.n()));
  std::vector<double> losses;
  losses.reserve(grid.size());
  std::size_t next = 0;
  for (int m = 1; m <= grid.back(); ++m) {
    f_test += config.nu * predict_learner_rows(booster.step(), test.covariates());
    if (m == grid[next]) {
      losses.push_back(heldout.loss(f_test));
      ++next;
    }
  }
  return losses;
}

inline CvCurve cross_validate_mstop(const SurvivalDataset& data, const BoostConfig& config) {
  config.validate();
  CvCurve curve;
  curve.grid = cv_grid(config);
  const auto folds = static_cast<std::size_t>(config.cv_folds);
  if (data.n() < std::max<std::size_t>(folds, 3)) throw UsageError("too few rows for the requested folds");
  curve.fold_of_row = assign_folds(data, config.cv_folds, config.seed, config.stratify_folds);

  std::vector<std::vector<double>> per_fold(folds);
  std::vector<std::string> fold_warning(folds);
  detail::parallel_for(folds, config.threads, [&](std::size_t v) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < data.n(); ++i)
      (curve.fold_of_row[i] == static_cast<int>(v) ? test_rows : train_rows).push_back(i);
    const SurvivalDataset test = data.subset(test_rows);
    const bool rank_loss = config.loss == LossKind::Gehan || config.loss == LossKind::CoxPH;
    if (rank_loss && test.event_count() == 0) {
      per_fold[v].assign(curve.grid.size(), 0.0);
      fold_warning[v] = "fold " + std::to_string(v + 1) + " has no events; contributes loss 0";
      return;
    }
    per_fold[v] = heldout_losses(data.subset(train_rows), test, config, curve.grid);
  });

  curve.mean_heldout_loss.assign(curve.grid.size(), 0.0);
  for (std::size_t v = 0; v < folds; ++v) {
    if (!fold_warning[v].empty()) curve.warnings.push_back(fold_warning[v]);
    for (std::size_t g = 0; g < curve.grid.size(); ++g)
      curve.mean_heldout_loss[g] += per_fold[v][g];
  }
  std::size_t best = 0;
  for (std::size_t g = 0; g < curve.grid.size(); ++g) {
    curve.mean_heldout_loss[g] /= static_cast<double>(folds);
    if (curve.mean_heldout_loss[g] < curve.mean_heldout_loss[best]) best = g;
  }
  curve.chosen_mstop = curve.grid[best];
  return curve;
}

}  // namespace survboost
