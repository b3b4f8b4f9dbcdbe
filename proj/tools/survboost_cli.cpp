// survboost: fit, cv, simulate, compare.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "survboost/commands.hpp"

namespace {

void add_data_flags(CLI::App* cmd, survboost::CommandOptions& o) {
  cmd->add_option("--input", o.input, "delimited data file (comma or tab)")->required();
  cmd->add_option("--time-col", o.time_col, "name of the follow-up time column")->capture_default_str();
  cmd->add_option("--status-col", o.status_col, "name of the event indicator column")->capture_default_str();
}

void add_model_flags(CLI::App* cmd, survboost::CommandOptions& o) {
  cmd->add_option("--loss", o.losses, "gehan | coxph | ipw-l2 | l2 (repeat or comma-separate for compare)");
  cmd->add_option("--learner", o.learner, "linear | stump | tree")
      ->check(CLI::IsMember({"linear", "stump", "tree"}))
      ->capture_default_str();
  cmd->add_option("--tree-depth", o.tree_depth, "depth of tree base learners")->capture_default_str();
  cmd->add_option("--nu", o.nu, "step length")->capture_default_str();
  cmd->add_option("--mstop-max", o.mstop_max, "largest m_stop on the CV grid")->capture_default_str();
  cmd->add_option("--grid-step", o.grid_step, "CV grid spacing")->capture_default_str();
  cmd->add_option("--folds", o.folds, "CV folds")->capture_default_str();
  cmd->add_option("--seed", o.seed, "random seed")->capture_default_str();
  cmd->add_flag("--stratify", o.stratify, "balance events across CV folds");
  cmd->add_option("--ipw-cap", o.ipw_cap, "cap on inverse probability weights");
  cmd->add_option("--threads", o.threads, "worker threads")->capture_default_str();
  cmd->add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace survboost;
  CLI::App app{"Boosting for censored survival data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  CommandOptions o;
  auto* fit = app.add_subcommand("fit", "fit one loss and write the ensemble");
  add_data_flags(fit, o);
  add_model_flags(fit, o);
  fit->add_option("--mstop", o.mstop, "number of boosting iterations (tuned by CV if omitted)");

  auto* cv = app.add_subcommand("cv", "cross-validate m_stop");
  add_data_flags(cv, o);
  add_model_flags(cv, o);

  auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo study");
  add_model_flags(simulate, o);
  simulate->add_option("--scenario", o.scenario, "fig3 | fig4 | fig5 | fig6 | scenario file")->required();
  simulate->add_option("--replicates", o.replicates, "replicates per scenario point");

  auto* compare = app.add_subcommand("compare", "fit several losses side by side");
  add_data_flags(compare, o);
  add_model_flags(compare, o);
  compare->add_option("--mstop", o.mstop, "fixed m_stop for every loss (tuned by CV if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  return run_command([&] {
    if (*fit) return cmd_fit(o, std::cout);
    if (*cv) return cmd_cv(o, std::cout);
    if (*simulate) return cmd_simulate(o, std::cout);
    return cmd_compare(o, std::cout);
  });
}
