#pragma once

// Reverse Kaplan-Meier estimate of the censoring survival curve G and the
// inverse-probability-of-censoring weights built from it.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "survboost/errors.hpp"
#include "survboost/survdata.hpp"

namespace survboost {

/// Right-continuous step function starting at 1.
struct KaplanMeierCurve {
  std::vector<double> jump_times;  // strictly increasing
  std::vector<double> values;      // value from each jump onward

  /// S(t): value at the largest jump time <= t, else 1.
  double operator()(double t) const {
    const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    if (it == jump_times.begin()) return 1.0;
    return values[static_cast<std::size_t>(it - jump_times.begin()) - 1];
  }

  /// S(t-): value at the largest jump time < t, else 1.
  double left_limit(double t) const {
    const auto it = std::lower_bound(jump_times.begin(), jump_times.end(), t);
    if (it == jump_times.begin()) return 1.0;
    return values[static_cast<std::size_t>(it - jump_times.begin()) - 1];
  }
};

/// Product-limit estimate with censorings (status 0) as the events. Every
/// row with U >= t is at risk at t, so uncensored rows tied with a censoring
/// count in its risk set.
inline KaplanMeierCurve fit_censoring_km(std::span<const double> time,
                                         std::span<const int> status) {
  if (time.size() != status.size()) throw UsageError("km: length mismatch");
  const std::size_t n = time.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return time[a] < time[b]; });
  KaplanMeierCurve curve;
  double surv = 1.0;
  std::size_t at_risk = n;
  for (std::size_t r = 0; r < n;) {
    const double t = time[order[r]];
    std::size_t tied = 0, censored = 0;
    while (r < n && time[order[r]] == t) {
      censored += status[order[r]] == 0 ? 1 : 0;
      ++tied;
      ++r;
    }
    if (censored > 0) {
      surv *= 1.0 - static_cast<double>(censored) / static_cast<double>(at_risk);
      curve.jump_times.push_back(t);
      curve.values.push_back(surv);
    }
    at_risk -= tied;
  }
  return curve;
}

inline KaplanMeierCurve fit_censoring_km(const SurvivalDataset& data) {
  return fit_censoring_km(as_span(data.time()), as_span(data.status()));
}

/// w_i = Delta_i / G(U_i-), optionally capped from above.
inline Vector ipw_weights(std::span<const double> time, std::span<const int> status,
                          const KaplanMeierCurve& curve,
                          std::optional<double> cap = std::nullopt) {
  if (time.size() != status.size()) throw UsageError("ipw: length mismatch");
  Vector w(static_cast<Eigen::Index>(time.size()));
  for (std::size_t i = 0; i < time.size(); ++i) {
    double wi = 0.0;
    if (status[i] == 1) {
      const double g = curve.left_limit(time[i]);
      if (!(g > 0.0))
        throw NumericError("unbounded IPW weight at time " + std::to_string(time[i]));
      wi = 1.0 / g;
      if (cap) wi = std::min(wi, *cap);
    }
    w(static_cast<Eigen::Index>(i)) = wi;
  }
  return w;
}

inline Vector ipw_weights(const SurvivalDataset& data,
                          std::optional<double> cap = std::nullopt) {
  return ipw_weights(as_span(data.time()), as_span(data.status()),
                     fit_censoring_km(data), cap);
}

}  // namespace survboost
