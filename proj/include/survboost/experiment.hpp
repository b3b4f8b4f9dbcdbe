#pragma once

// End-to-end Monte Carlo replicates: generate, tune m_stop by CV, refit on
// the full replicate, score against the truth.

#include <cstdint>
#include <memory>
#include <vector>

#include "survboost/engine.hpp"
#include "survboost/metrics.hpp"
#include "survboost/simlab.hpp"

namespace survboost {

/// Coefficients mapped back to the raw covariate scale; hazard-scale losses
/// are multiplied by -1 so every loss targets the log-time coefficients.
inline Vector coefficients_on_truth_scale(const Ensemble& ens) {
  Vector beta = ens.linear_coefficients.cwiseQuotient(ens.standardization.scales);
  if (is_hazard_scale(ens.loss)) beta = -beta;
  return beta;
}

inline ReplicateMetrics run_replicate(const ScenarioSampler& sampler, std::uint64_t index,
                                      BoostConfig config) {
  const GeneratedReplicate rep = sampler.replicate(index);
  auto [scaled, st] = standardize(rep.dataset);
  config.seed = substream(sampler.scenario().seed, index, /*purpose=*/3)();
  config.threads = 1;
  const CvCurve curve = cross_validate_mstop(scaled, config);
  const Ensemble ens = boost(scaled, config, static_cast<std::size_t>(curve.chosen_mstop), st);

  ReplicateMetrics m;
  if (config.learner.is_linear()) {
    m = score_coefficients(coefficients_on_truth_scale(ens), rep.true_beta, rep.true_covariance);
  } else {
    m.has_coefficients = false;
  }
  Vector scores = predict(ens, scaled.covariates());
  if (is_hazard_scale(config.loss)) scores = -scores;
  try {
    m.score_r = score_correlation(scores, rep.linear_predictor).pearson_r;
  } catch (const NumericError&) {
    m.score_r = 0.0;
  }
  m.mstop = curve.chosen_mstop;
  m.censoring_rate = rep.realized_censoring_rate;
  return m;
}

struct PlanResult {
  // metrics[point][loss][replicate]
  std::vector<std::vector<std::vector<ReplicateMetrics>>> metrics;
};

inline PlanResult run_plan(const SimulationPlan& plan, const BoostConfig& base, unsigned threads) {
  const std::size_t points = plan.points.size();
  std::vector<std::unique_ptr<ScenarioSampler>> samplers(points);
  detail::parallel_for(points, threads, [&](std::size_t p) {
    samplers[p] = std::make_unique<ScenarioSampler>(plan.points[p].scenario);
  });

  PlanResult result;
  result.metrics.resize(points);
  struct Task {
    std::size_t point, loss, replicate;
  };
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < points; ++p) {
    const auto reps = static_cast<std::size_t>(plan.points[p].scenario.replicates);
    result.metrics[p].assign(plan.losses.size(), std::vector<ReplicateMetrics>(reps));
    for (std::size_t l = 0; l < plan.losses.size(); ++l)
      for (std::size_t r = 0; r < reps; ++r) tasks.push_back({p, l, r});
  }
  detail::parallel_for(tasks.size(), threads, [&](std::size_t t) {
    const Task& task = tasks[t];
    BoostConfig config = base;
    config.loss = plan.losses[task.loss];
    result.metrics[task.point][task.loss][task.replicate] =
        run_replicate(*samplers[task.point], task.replicate, config);
  });
  return result;
}

}  // namespace survboost
