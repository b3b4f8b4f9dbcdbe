#pragma once

// Convex survival losses and their negative gradients.
//
// Scale conventions (n = number of rows):
//   gehan:  D_G = n^-2 sum_i Delta_i sum_j (e_j - e_i) I(e_i <= e_j)
//           Z_k = -(G1_k - G2_k) / n, which is n times -dD_G/df_k
//   coxph:  -(1/n) sum_i Delta_i [f_i - log sum_{U_j >= U_i} exp f_j]
//           Z_i = martingale residual, n times -dL/df_i
//   l2:     (1/(2n)) sum_i w_i e_i^2,  Z_i = w_i e_i / n
// with residuals e_i = log U_i - f_i.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "survboost/errors.hpp"
#include "survboost/survdata.hpp"

namespace survboost {

enum class LossKind { Gehan, CoxPH, IpwL2, PlainL2 };

inline std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Gehan: return "gehan";
    case LossKind::CoxPH: return "coxph";
    case LossKind::IpwL2: return "ipw-l2";
    case LossKind::PlainL2: return "l2";
  }
  return "?";
}

inline LossKind parse_loss(std::string_view name) {
  if (name == "gehan") return LossKind::Gehan;
  if (name == "coxph" || name == "cox") return LossKind::CoxPH;
  if (name == "ipw-l2" || name == "ipw") return LossKind::IpwL2;
  if (name == "l2") return LossKind::PlainL2;
  throw UsageError("unknown loss '" + std::string(name) + "'");
}

/// Proportional-hazards losses estimate -beta on the log-time scale.
inline bool is_hazard_scale(LossKind kind) { return kind == LossKind::CoxPH; }

/// Residuals e_i = log U_i - f(X_i), event flags, optional IPW weights.
/// Empty `weights` means unweighted.
struct ResidualContext {
  std::span<const double> residuals;
  std::span<const int> status;
  std::span<const double> weights = {};

  std::size_t size() const { return residuals.size(); }
  bool weighted() const { return !weights.empty(); }
};

namespace detail {

inline void require_unweighted(const ResidualContext& ctx, const char* what) {
  if (ctx.weighted())
    throw UsageError(std::string(what) + " does not take weights");
  if (ctx.status.size() != ctx.residuals.size())
    throw UsageError(std::string(what) + ": status length mismatch");
}

inline std::vector<std::size_t> ascending_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  return order;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Gehan
// ---------------------------------------------------------------------------

/// Gehan loss in O(n log n) via suffix sums over sorted residuals.
inline double gehan_loss(const ResidualContext& ctx) {
  detail::require_unweighted(ctx, "gehan_loss");
  const std::size_t n = ctx.size();
  if (n == 0) return 0.0;
  const auto order = detail::ascending_order(ctx.residuals);
  // suffix_sum[r] = sum of sorted residuals at ranks >= r.
  std::vector<double> suffix_sum(n + 1, 0.0);
  for (std::size_t r = n; r-- > 0;)
    suffix_sum[r] = suffix_sum[r + 1] + ctx.residuals[order[r]];
  double total = 0.0;
  for (std::size_t r = 0; r < n;) {
    std::size_t end = r;
    const double e = ctx.residuals[order[r]];
    while (end < n && ctx.residuals[order[end]] == e) ++end;
    // Pairs with e_j >= e contribute (e_j - e); ties add exactly zero.
    const double tail = suffix_sum[end] - static_cast<double>(n - end) * e;
    for (std::size_t q = r; q < end; ++q)
      if (ctx.status[order[q]] == 1) total += tail;
    r = end;
  }
  const double nn = static_cast<double>(n);
  return total / (nn * nn);
}

/// Direct O(n^2) counting of G1 and G2.
inline Vector gehan_negative_gradient(const ResidualContext& ctx) {
  detail::require_unweighted(ctx, "gehan_negative_gradient");
  const std::size_t n = ctx.size();
  Vector z(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    long g1 = 0, g2 = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (ctx.residuals[k] <= ctx.residuals[j]) g1 += ctx.status[k];
      if (ctx.residuals[j] <= ctx.residuals[k]) g2 += ctx.status[j];
    }
    z(static_cast<Eigen::Index>(k)) =
        -static_cast<double>(g1 - g2) / static_cast<double>(n);
  }
  return z;
}

/// Same counts as gehan_negative_gradient from one sort plus cumulative
/// event counts. Integer arithmetic, so results agree exactly.
inline Vector gehan_negative_gradient_fast(const ResidualContext& ctx) {
  detail::require_unweighted(ctx, "gehan_negative_gradient_fast");
  const std::size_t n = ctx.size();
  Vector z(static_cast<Eigen::Index>(n));
  const auto order = detail::ascending_order(ctx.residuals);
  long events_through = 0;  // events with rank < current tie block
  for (std::size_t r = 0; r < n;) {
    std::size_t end = r;
    const double e = ctx.residuals[order[r]];
    long block_events = 0;
    while (end < n && ctx.residuals[order[end]] == e) {
      block_events += ctx.status[order[end]];
      ++end;
    }
    const long at_or_above = static_cast<long>(n - r);        // #{j: e <= e_j}
    const long events_at_or_below = events_through + block_events;  // #{j: Delta_j, e_j <= e}
    for (std::size_t q = r; q < end; ++q) {
      const std::size_t k = order[q];
      const long g1 = ctx.status[k] * at_or_above;
      z(static_cast<Eigen::Index>(k)) =
          -static_cast<double>(g1 - events_at_or_below) / static_cast<double>(n);
    }
    events_through += block_events;
    r = end;
  }
  return z;
}

// ---------------------------------------------------------------------------
// Cox partial likelihood (Breslow risk sets, U_j >= U_i with ties included)
// ---------------------------------------------------------------------------

namespace detail {

struct CoxRiskSets {
  std::vector<std::size_t> order;       // ascending time
  std::vector<std::size_t> block_start;  // tie blocks in `order`, plus sentinel n
  std::vector<double> risk_sum;         // per block: sum_{U_j >= t} exp(f_j - shift)
  double shift = 0.0;
};

inline CoxRiskSets cox_risk_sets(std::span<const double> f,
                                 std::span<const double> time) {
  if (f.size() != time.size()) throw UsageError("cox: length mismatch");
  CoxRiskSets rs;
  const std::size_t n = f.size();
  rs.order = ascending_order(time);
  for (std::size_t r = 0; r < n;) {
    rs.block_start.push_back(r);
    const double t = time[rs.order[r]];
    while (r < n && time[rs.order[r]] == t) ++r;
  }
  rs.block_start.push_back(n);
  rs.shift = n == 0 ? 0.0 : *std::max_element(f.begin(), f.end());
  const std::size_t blocks = rs.block_start.size() - 1;
  rs.risk_sum.assign(blocks, 0.0);
  double running = 0.0;
  for (std::size_t b = blocks; b-- > 0;) {
    for (std::size_t q = rs.block_start[b]; q < rs.block_start[b + 1]; ++q)
      running += std::exp(f[rs.order[q]] - rs.shift);
    rs.risk_sum[b] = running;
  }
  return rs;
}

}  // namespace detail

inline double cox_negative_log_pl(std::span<const double> f,
                                  std::span<const double> time,
                                  std::span<const int> status) {
  if (status.size() != f.size()) throw UsageError("cox: length mismatch");
  const std::size_t n = f.size();
  if (n == 0) return 0.0;
  const auto rs = detail::cox_risk_sets(f, time);
  double total = 0.0;
  for (std::size_t b = 0; b + 1 < rs.block_start.size(); ++b) {
    const double log_risk = std::log(rs.risk_sum[b]);
    for (std::size_t q = rs.block_start[b]; q < rs.block_start[b + 1]; ++q) {
      const std::size_t i = rs.order[q];
      if (status[i] == 1) total += (f[i] - rs.shift) - log_risk;
    }
  }
  return -total / static_cast<double>(n);
}

/// Martingale residuals Delta_i - exp(f_i) * sum_{U_k <= U_i} Delta_k / S_k.
inline Vector cox_negative_gradient(std::span<const double> f,
                                    std::span<const double> time,
                                    std::span<const int> status) {
  if (status.size() != f.size()) throw UsageError("cox: length mismatch");
  const std::size_t n = f.size();
  Vector z(static_cast<Eigen::Index>(n));
  if (n == 0) return z;
  const auto rs = detail::cox_risk_sets(f, time);
  double cumulative_hazard = 0.0;
  for (std::size_t b = 0; b + 1 < rs.block_start.size(); ++b) {
    long events = 0;
    for (std::size_t q = rs.block_start[b]; q < rs.block_start[b + 1]; ++q)
      events += status[rs.order[q]];
    cumulative_hazard += static_cast<double>(events) / rs.risk_sum[b];
    for (std::size_t q = rs.block_start[b]; q < rs.block_start[b + 1]; ++q) {
      const std::size_t i = rs.order[q];
      z(static_cast<Eigen::Index>(i)) =
          static_cast<double>(status[i]) -
          std::exp(f[i] - rs.shift) * cumulative_hazard;
    }
  }
  return z;
}

// ---------------------------------------------------------------------------
// Squared error, plain and inverse-probability weighted
// ---------------------------------------------------------------------------

inline double plain_l2_loss(const ResidualContext& ctx) {
  const std::size_t n = ctx.size();
  if (n == 0) return 0.0;
  double total = 0.0;
  for (double e : ctx.residuals) total += e * e;
  return total / (2.0 * static_cast<double>(n));
}

inline Vector plain_l2_negative_gradient(const ResidualContext& ctx) {
  const std::size_t n = ctx.size();
  Vector z(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    z(static_cast<Eigen::Index>(i)) = ctx.residuals[i] / static_cast<double>(n);
  return z;
}

namespace detail {
inline void require_weights(const ResidualContext& ctx, const char* what) {
  if (ctx.weights.size() != ctx.residuals.size())
    throw UsageError(std::string(what) + " requires one weight per row");
}
}  // namespace detail

inline double ipw_l2_loss(const ResidualContext& ctx) {
  detail::require_weights(ctx, "ipw_l2_loss");
  const std::size_t n = ctx.size();
  if (n == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    total += ctx.weights[i] * ctx.residuals[i] * ctx.residuals[i];
  return total / (2.0 * static_cast<double>(n));
}

inline Vector ipw_l2_negative_gradient(const ResidualContext& ctx) {
  detail::require_weights(ctx, "ipw_l2_negative_gradient");
  const std::size_t n = ctx.size();
  Vector z(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    z(static_cast<Eigen::Index>(i)) =
        ctx.weights[i] * ctx.residuals[i] / static_cast<double>(n);
  return z;
}

}  // namespace survboost
