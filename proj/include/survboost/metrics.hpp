#pragma once

// Coefficient and risk-score performance measures.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "survboost/errors.hpp"
#include "survboost/survdata.hpp"

namespace survboost {

/// (b - b0)' S (b - b0).
inline double model_error(const Vector& beta_hat, const Vector& beta_0, const Matrix& covariance) {
  if (beta_hat.size() != beta_0.size() || covariance.rows() != beta_hat.size() ||
      covariance.cols() != beta_hat.size())
    throw UsageError("model_error: dimension mismatch");
  const Vector diff = beta_hat - beta_0;
  return std::max(0.0, diff.dot(covariance * diff));
}

/// Model error with the identity in place of the covariance.
inline double mse(const Vector& beta_hat, const Vector& beta_0) {
  if (beta_hat.size() != beta_0.size()) throw UsageError("mse: dimension mismatch");
  return (beta_hat - beta_0).squaredNorm();
}

struct SelectionCounts {
  int correct_zeros = 0;    // truly zero, estimated zero
  int incorrect_zeros = 0;  // truly nonzero, estimated zero
  int false_positives = 0;  // truly zero, estimated nonzero
  int active = 0;           // estimated nonzero
  double fsr = 0.0;         // false_positives / max(1, active)
};

/// A coefficient counts as zero only when it is exactly 0.0.
inline SelectionCounts selection_counts(const Vector& beta_hat, const Vector& beta_0) {
  if (beta_hat.size() != beta_0.size()) throw UsageError("selection_counts: dimension mismatch");
  SelectionCounts c;
  for (Eigen::Index j = 0; j < beta_hat.size(); ++j) {
    const bool truth_zero = beta_0(j) == 0.0;
    const bool est_zero = beta_hat(j) == 0.0;
    if (!est_zero) ++c.active;
    if (truth_zero && est_zero) ++c.correct_zeros;
    if (!truth_zero && est_zero) ++c.incorrect_zeros;
    if (truth_zero && !est_zero) ++c.false_positives;
  }
  c.fsr = static_cast<double>(c.false_positives) / static_cast<double>(std::max(1, c.active));
  return c;
}

struct ScoreAgreement {
  double pearson_r = 0.0;
  std::size_t sign_disagreements = 0;  // f_a * f_b < 0
  std::size_t gap_above_one = 0;       // |f_a - f_b| > 1
  std::size_t gap_above_two = 0;       // |f_a - f_b| > 2
};

inline ScoreAgreement score_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("score_correlation: length mismatch");
  if (a.size() < 3) throw UsageError("score_correlation: needs at least 3 scores");
  const double n = static_cast<double>(a.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  ScoreAgreement out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a, db = b[i] - mean_b;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
    if (a[i] * b[i] < 0.0) ++out.sign_disagreements;
    const double gap = std::abs(a[i] - b[i]);
    if (gap > 1.0) ++out.gap_above_one;
    if (gap > 2.0) ++out.gap_above_two;
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) throw NumericError("undefined correlation: constant scores");
  out.pearson_r = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
  return out;
}

inline ScoreAgreement score_correlation(const Vector& a, const Vector& b) {
  return score_correlation(as_span(a), as_span(b));
}

/// One replicate's scores. Tree fits leave the coefficient measures unset
/// (has_coefficients = false) and report score correlation instead.
struct ReplicateMetrics {
  bool has_coefficients = true;
  double model_error = 0.0;
  double mse = 0.0;
  int correct_zeros = 0;
  int incorrect_zeros = 0;
  double fsr = 0.0;
  double score_r = 0.0;
  int mstop = 0;
  double censoring_rate = 0.0;
};

inline ReplicateMetrics score_coefficients(const Vector& beta_hat, const Vector& beta_0,
                                           const Matrix& covariance) {
  ReplicateMetrics m;
  m.model_error = model_error(beta_hat, beta_0, covariance);
  m.mse = mse(beta_hat, beta_0);
  const auto c = selection_counts(beta_hat, beta_0);
  m.correct_zeros = c.correct_zeros;
  m.incorrect_zeros = c.incorrect_zeros;
  m.fsr = c.fsr;
  return m;
}

struct PerformanceAggregate {
  std::size_t replicates = 0;
  double median_model_error = 0.0;  // MME
  double mean_mse = 0.0;
  double mean_correct_zeros = 0.0;
  double mean_incorrect_zeros = 0.0;
  double mean_fsr = 0.0;
  double mean_score_r = 0.0;
  double mean_mstop = 0.0;
  double mean_censoring_rate = 0.0;
};

/// Even counts take the mean of the two central order statistics.
inline double median(std::vector<double> values) {
  if (values.empty()) throw UsageError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

inline PerformanceAggregate aggregate(std::span<const ReplicateMetrics> reps) {
  if (reps.empty()) throw UsageError("aggregate: no replicates");
  PerformanceAggregate agg;
  agg.replicates = reps.size();
  std::vector<double> me;
  me.reserve(reps.size());
  for (const auto& r : reps) {
    me.push_back(r.model_error);
    agg.mean_mse += r.mse;
    agg.mean_correct_zeros += r.correct_zeros;
    agg.mean_incorrect_zeros += r.incorrect_zeros;
    agg.mean_fsr += r.fsr;
    agg.mean_score_r += r.score_r;
    agg.mean_mstop += r.mstop;
    agg.mean_censoring_rate += r.censoring_rate;
  }
  const double n = static_cast<double>(reps.size());
  agg.median_model_error = median(std::move(me));
  agg.mean_mse /= n;
  agg.mean_correct_zeros /= n;
  agg.mean_incorrect_zeros /= n;
  agg.mean_fsr /= n;
  agg.mean_score_r /= n;
  agg.mean_mstop /= n;
  agg.mean_censoring_rate /= n;
  return agg;
}

// Report files: header, one row per replicate, then an "aggregate" footer.

inline std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s(buf);
  if (s == "-0." + std::string(static_cast<std::size_t>(digits), '0')) s.erase(0, 1);
  return s;
}

inline void write_report(std::ostream& out, std::span<const ReplicateMetrics> reps) {
  out << "replicate,model_error,mse,correct_zeros,incorrect_zeros,fsr,score_r,mstop,censoring_rate\n";
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto& r = reps[i];
    out << i + 1 << ',' << (r.has_coefficients ? fixed(r.model_error) : "NA") << ','
        << (r.has_coefficients ? fixed(r.mse) : "NA") << ',' << r.correct_zeros << ','
        << r.incorrect_zeros << ',' << fixed(r.fsr) << ',' << fixed(r.score_r) << ','
        << r.mstop << ',' << fixed(r.censoring_rate) << '\n';
  }
  const auto agg = aggregate(reps);
  const bool coef = reps.front().has_coefficients;
  out << "aggregate," << (coef ? fixed(agg.median_model_error) : "NA") << ','
      << (coef ? fixed(agg.mean_mse) : "NA") << ',' << fixed(agg.mean_correct_zeros) << ','
      << fixed(agg.mean_incorrect_zeros) << ',' << fixed(agg.mean_fsr) << ','
      << fixed(agg.mean_score_r) << ',' << fixed(agg.mean_mstop, 2) << ','
      << fixed(agg.mean_censoring_rate) << '\n';
}

}  // namespace survboost
