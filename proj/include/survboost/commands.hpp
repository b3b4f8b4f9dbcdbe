#pragma once

// The fit / cv / simulate / compare commands. Each writes plain delimited
// files plus a manifest.json into the output directory; reruns with the same
// flags reproduce every file byte for byte, whatever the thread count.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "survboost/engine.hpp"
#include "survboost/ensemble_io.hpp"
#include "survboost/errors.hpp"
#include "survboost/experiment.hpp"
#include "survboost/metrics.hpp"
#include "survboost/report.hpp"
#include "survboost/simlab.hpp"
#include "survboost/survdata.hpp"

namespace survboost {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumeric = 3 };

struct CommandOptions {
  std::string input;
  std::string time_col = "time";
  std::string status_col = "status";
  std::vector<std::string> losses;
  std::string learner = "linear";
  int tree_depth = 2;
  double nu = 0.1;
  std::optional<int> mstop;
  int mstop_max = 1000;
  int grid_step = 10;
  int folds = 5;
  std::uint64_t seed = 1;
  bool stratify = false;
  std::optional<double> ipw_cap;
  std::string scenario;
  std::optional<int> replicates;
  unsigned threads = 1;
  std::string out_dir = ".";
};

namespace detail {

inline BoostConfig config_from(const CommandOptions& o, LossKind loss) {
  BoostConfig c;
  c.loss = loss;
  c.learner = parse_learner(o.learner, o.tree_depth);
  if (o.learner != "tree" && (o.tree_depth < 1 || o.tree_depth > 6))
    throw UsageError("tree depth must lie in [1, 6]");
  c.nu = o.nu;
  c.m_max = o.mstop_max;
  c.cv_folds = o.folds;
  c.cv_grid_step = o.grid_step;
  c.seed = o.seed;
  c.stratify_folds = o.stratify;
  c.threads = std::max(1u, o.threads);
  c.ipw_cap = o.ipw_cap;
  c.validate();
  if (o.mstop && *o.mstop < 0) throw UsageError("mstop must be nonnegative");
  if (o.threads < 1) throw UsageError("threads must be at least 1");
  return c;
}

inline std::vector<LossKind> parse_losses(const std::vector<std::string>& names) {
  std::vector<LossKind> out;
  for (const auto& entry : names) {
    std::stringstream list(entry);
    std::string item;
    while (std::getline(list, item, ',')) out.push_back(parse_loss(item));
  }
  return out;
}

inline LossKind single_loss(const CommandOptions& o) {
  const auto losses = parse_losses(o.losses);
  if (losses.size() > 1) throw UsageError("this command takes a single --loss");
  return losses.empty() ? LossKind::Gehan : losses.front();
}

inline char detect_delimiter(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string header;
  std::getline(in, header);
  return header.find('\t') != std::string::npos ? '\t' : ',';
}

inline SurvivalDataset load_input(const CommandOptions& o) {
  if (o.input.empty()) throw UsageError("--input is required");
  return load_delimited(o.input, o.time_col, o.status_col, detect_delimiter(o.input));
}

inline std::filesystem::path prepare_out_dir(const CommandOptions& o) {
  std::filesystem::path dir(o.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + o.out_dir + "': " + ec.message());
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

// Worker count and output location are left out so the manifest, like every
// other output, depends only on what determines the results.
inline void write_manifest(const std::filesystem::path& dir, const std::string& command,
                           const CommandOptions& o) {
  nlohmann::ordered_json m;
  m["tool"] = "survboost";
  m["version"] = kVersion;
  m["command"] = command;
  nlohmann::ordered_json flags;
  if (!o.input.empty()) {
    flags["input"] = o.input;
    flags["time_col"] = o.time_col;
    flags["status_col"] = o.status_col;
  }
  flags["losses"] = o.losses;
  flags["learner"] = o.learner;
  flags["tree_depth"] = o.tree_depth;
  flags["nu"] = o.nu;
  if (o.mstop) flags["mstop"] = *o.mstop;
  flags["mstop_max"] = o.mstop_max;
  flags["grid_step"] = o.grid_step;
  flags["folds"] = o.folds;
  flags["stratify"] = o.stratify;
  if (o.ipw_cap) flags["ipw_cap"] = *o.ipw_cap;
  if (!o.scenario.empty()) flags["scenario"] = o.scenario;
  if (o.replicates) flags["replicates"] = *o.replicates;
  m["flags"] = flags;
  m["seed"] = o.seed;
  m["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                       std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION);
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

inline std::string render_cv_curve(const CvCurve& curve, const BoostConfig& c) {
  std::ostringstream out;
  out << "# survboost cv\n";
  out << "# loss=" << to_string(c.loss) << " learner=" << to_string(c.learner.type)
      << " folds=" << c.cv_folds << " nu=" << format_real(c.nu)
      << " grid_step=" << c.cv_grid_step << " mstop_max=" << c.m_max << " seed=" << c.seed << '\n';
  for (const auto& w : curve.warnings) out << "# warning: " << w << '\n';
  out << "m,mean_heldout_loss\n";
  for (std::size_t g = 0; g < curve.grid.size(); ++g)
    out << curve.grid[g] << ',' << fixed(curve.mean_heldout_loss[g], 12) << '\n';
  out << "# chosen_mstop=" << curve.chosen_mstop << '\n';
  return out.str();
}

inline std::string render_scores(const SurvivalDataset& data,
                                 const std::vector<std::string>& labels,
                                 const std::vector<Vector>& scores) {
  std::ostringstream out;
  out << "row,time,status";
  for (const auto& l : labels) out << ",score_" << l;
  out << '\n';
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    out << i + 1 << ',' << format_real(data.time()(ii)) << ',' << data.status()(ii);
    for (const auto& s : scores) out << ',' << format_real(s(ii));
    out << '\n';
  }
  return out.str();
}

inline std::string render_tree_summary(const Ensemble& ens) {
  std::ostringstream out;
  out << "update,leaves,root_feature,root_threshold\n";
  for (std::size_t m = 0; m < ens.updates.size(); ++m) {
    const auto& tree = std::get<TreeUpdate>(ens.updates[m]);
    const auto& root = tree.nodes.front();
    out << m + 1 << ',' << tree.leaf_count() << ','
        << (root.is_leaf() ? std::string("-") : ens.column_names[static_cast<std::size_t>(root.feature)])
        << ',' << (root.is_leaf() ? std::string("-") : format_real(root.threshold)) << '\n';
  }
  return out.str();
}

struct TunedFit {
  Ensemble ensemble;
  std::optional<CvCurve> curve;
};

inline TunedFit tune_and_fit(const SurvivalDataset& scaled, const Standardization& st,
                             const BoostConfig& config, std::optional<int> mstop) {
  TunedFit fit;
  std::size_t m = 0;
  if (mstop) {
    m = static_cast<std::size_t>(*mstop);
  } else {
    fit.curve = cross_validate_mstop(scaled, config);
    m = static_cast<std::size_t>(fit.curve->chosen_mstop);
  }
  fit.ensemble = boost(scaled, config, m, st);
  return fit;
}

}  // namespace detail

/// Boosts one loss (m_stop from --mstop, else tuned by CV) and writes the
/// ensemble, coefficient table or tree summary, and training scores.
inline int cmd_fit(const CommandOptions& o, std::ostream& log) {
  const LossKind loss = detail::single_loss(o);
  const BoostConfig config = detail::config_from(o, loss);
  const SurvivalDataset raw = detail::load_input(o);
  const auto [scaled, st] = standardize(raw);
  const auto dir = detail::prepare_out_dir(o);

  const auto fit = detail::tune_and_fit(scaled, st, config, o.mstop);
  const Ensemble& ens = fit.ensemble;
  if (fit.curve) detail::write_file(dir / "cv_curve.csv", detail::render_cv_curve(*fit.curve, config));
  detail::write_file(dir / "ensemble.txt", ensemble_to_string(ens));
  const Vector scores = predict(ens, scaled.covariates());
  detail::write_file(dir / "scores.csv",
                     detail::render_scores(raw, {std::string(to_string(loss))}, {scores}));
  if (config.learner.is_linear()) {
    std::ostringstream table;
    write_coefficient_table(table, build_coefficient_table(raw.column_names(),
                                                           {std::string(to_string(loss))},
                                                           {ens.linear_coefficients}));
    detail::write_file(dir / "coefficients.csv", table.str());
  } else {
    detail::write_file(dir / "tree_summary.csv", detail::render_tree_summary(ens));
  }
  detail::write_manifest(dir, "fit", o);
  log << "fit: loss=" << to_string(loss) << " learner=" << to_string(config.learner.type)
      << " m_stop=" << ens.m_stop();
  if (config.learner.is_linear()) log << " active=" << ens.active_set().size();
  log << '\n';
  return kExitOk;
}

/// Cross-validates m_stop and writes the held-out loss curve.
inline int cmd_cv(const CommandOptions& o, std::ostream& log) {
  const LossKind loss = detail::single_loss(o);
  const BoostConfig config = detail::config_from(o, loss);
  const SurvivalDataset raw = detail::load_input(o);
  const auto [scaled, st] = standardize(raw);
  const auto dir = detail::prepare_out_dir(o);
  const CvCurve curve = cross_validate_mstop(scaled, config);
  detail::write_file(dir / "cv_curve.csv", detail::render_cv_curve(curve, config));
  detail::write_manifest(dir, "cv", o);
  for (const auto& w : curve.warnings) std::cerr << "warning: " << w << '\n';
  log << "chosen m_stop: " << curve.chosen_mstop << '\n';
  return kExitOk;
}

inline SimulationPlan resolve_plan(const CommandOptions& o) {
  if (o.scenario.empty()) throw UsageError("--scenario is required");
  const int replicates_override = o.replicates.value_or(-1);
  if (o.replicates && *o.replicates < 1) throw UsageError("replicates must be positive");
  SimulationPlan plan;
  if (o.scenario == "fig3" || o.scenario == "fig4" || o.scenario == "fig5" || o.scenario == "fig6") {
    plan = preset_plan(o.scenario, replicates_override > 0 ? replicates_override : 100, o.seed);
  } else {
    auto file = load_scenario_file(o.scenario);
    if (replicates_override > 0) file.scenario.replicates = replicates_override;
    plan.name = file.scenario.name;
    plan.losses = file.losses;
    std::string label = error_label(file.scenario.error);
    plan.points.push_back({"scenario", 0.0, std::move(label), file.scenario});
  }
  const auto requested = detail::parse_losses(o.losses);
  if (!requested.empty()) plan.losses = requested;
  return plan;
}

/// Runs every (scenario point, loss) of a preset or scenario file and writes
/// per-replicate reports, an aggregate table and a long-format plot file.
inline int cmd_simulate(const CommandOptions& o, std::ostream& log) {
  const SimulationPlan plan = resolve_plan(o);
  const BoostConfig base = detail::config_from(o, plan.losses.front());
  const auto dir = detail::prepare_out_dir(o);
  const PlanResult result = run_plan(plan, base, std::max(1u, o.threads));

  std::ostringstream agg_out, plot_out;
  agg_out << "point,parameter,value,error,loss,replicates,mme,mean_mse,mean_correct_zeros,"
             "mean_incorrect_zeros,mean_fsr,mean_score_r,mean_mstop,mean_censoring_rate\n";
  plot_out << "scenario,parameter,value,error,loss,metric,estimate\n";
  for (std::size_t p = 0; p < plan.points.size(); ++p) {
    const auto& point = plan.points[p];
    for (std::size_t l = 0; l < plan.losses.size(); ++l) {
      const auto& reps = result.metrics[p][l];
      const std::string loss(to_string(plan.losses[l]));
      const std::string value = format_real(point.value);
      std::ostringstream report;
      write_report(report, reps);
      const std::string file = "report_p" + std::to_string(p + 1) + "_" + point.parameter + value +
                               "_" + point.error_label + "_" + loss + ".csv";
      detail::write_file(dir / file, report.str());

      const auto agg = aggregate(reps);
      const bool coef = reps.front().has_coefficients;
      agg_out << p + 1 << ',' << point.parameter << ',' << value << ',' << point.error_label << ','
              << loss << ',' << agg.replicates << ',' << (coef ? fixed(agg.median_model_error) : "NA")
              << ',' << (coef ? fixed(agg.mean_mse) : "NA") << ',' << fixed(agg.mean_correct_zeros)
              << ',' << fixed(agg.mean_incorrect_zeros) << ',' << fixed(agg.mean_fsr) << ','
              << fixed(agg.mean_score_r) << ',' << fixed(agg.mean_mstop, 2) << ','
              << fixed(agg.mean_censoring_rate) << '\n';
      auto emit = [&](const char* metric, double v) {
        plot_out << plan.name << ',' << point.parameter << ',' << value << ',' << point.error_label
                 << ',' << loss << ',' << metric << ',' << fixed(v) << '\n';
      };
      if (coef) {
        emit("mme", agg.median_model_error);
        emit("mse", agg.mean_mse);
      }
      emit("correct_zeros", agg.mean_correct_zeros);
      emit("incorrect_zeros", agg.mean_incorrect_zeros);
      emit("fsr", agg.mean_fsr);
      emit("score_r", agg.mean_score_r);
    }
  }
  detail::write_file(dir / "aggregate.csv", agg_out.str());
  detail::write_file(dir / "plot.csv", plot_out.str());
  detail::write_manifest(dir, "simulate", o);
  log << "simulate: " << plan.name << ", " << plan.points.size() << " scenario points x "
      << plan.losses.size() << " losses\n";
  return kExitOk;
}

/// Fits two or more losses on one dataset (each with its own CV-tuned
/// m_stop unless --mstop is given) and writes the joint coefficient table
/// with active-set differences, or score agreement for tree learners.
inline int cmd_compare(const CommandOptions& o, std::ostream& log) {
  const auto losses = detail::parse_losses(o.losses);
  if (losses.size() < 2) throw UsageError("compare needs at least two losses");
  const SurvivalDataset raw = detail::load_input(o);
  const auto [scaled, st] = standardize(raw);
  const auto dir = detail::prepare_out_dir(o);

  std::vector<std::string> labels;
  std::vector<Ensemble> fits;
  std::vector<Vector> coefficients, scores;
  for (const LossKind loss : losses) {
    const BoostConfig config = detail::config_from(o, loss);
    auto fit = detail::tune_and_fit(scaled, st, config, o.mstop);
    labels.emplace_back(to_string(loss));
    detail::write_file(dir / ("ensemble_" + labels.back() + ".txt"), ensemble_to_string(fit.ensemble));
    if (fit.curve)
      detail::write_file(dir / ("cv_curve_" + labels.back() + ".csv"),
                         detail::render_cv_curve(*fit.curve, config));
    coefficients.push_back(fit.ensemble.linear_coefficients);
    scores.push_back(predict(fit.ensemble, scaled.covariates()));
    fits.push_back(std::move(fit.ensemble));
  }
  detail::write_file(dir / "scores.csv", detail::render_scores(raw, labels, scores));

  if (fits.front().learner.is_linear()) {
    std::ostringstream table, diffs;
    write_coefficient_table(table, build_coefficient_table(raw.column_names(), labels, coefficients));
    std::vector<NamedActiveSet> sets;
    for (std::size_t l = 0; l < fits.size(); ++l) {
      const auto active = fits[l].active_set();
      sets.push_back({labels[l], {active.begin(), active.end()}});
    }
    write_set_differences(diffs, set_differences(sets));
    detail::write_file(dir / "compare.csv", table.str());
    detail::write_file(dir / "set_differences.csv", diffs.str());
  } else {
    std::ostringstream agreement;
    agreement << "loss_a,loss_b,pearson_r,sign_disagreements,gap_above_one,gap_above_two\n";
    for (std::size_t a = 0; a < fits.size(); ++a)
      for (std::size_t b = a + 1; b < fits.size(); ++b) {
        agreement << labels[a] << ',' << labels[b] << ',';
        try {
          const auto s = score_correlation(scores[a], scores[b]);
          agreement << fixed(s.pearson_r) << ',' << s.sign_disagreements << ',' << s.gap_above_one
                    << ',' << s.gap_above_two << '\n';
        } catch (const NumericError&) {
          agreement << "NA,NA,NA,NA\n";
        }
      }
    detail::write_file(dir / "score_agreement.csv", agreement.str());
  }
  detail::write_manifest(dir, "compare", o);
  log << "compare:";
  for (std::size_t l = 0; l < fits.size(); ++l)
    log << ' ' << labels[l] << "(m_stop=" << fits[l].m_stop() << ")";
  log << '\n';
  return kExitOk;
}

/// Maps library errors to exit codes with a one-line diagnostic.
inline int run_command(const std::function<int()>& command, std::ostream& err = std::cerr) {
  try {
    return command();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace survboost
