#include <CLI11.hpp>
#include <iostream>

#include "tsrate/commands.hpp"
#include "tsrate/errors.hpp"
#include "tsrate/version.hpp"

namespace {

void add_run_flags(CLI::App* cmd, std::string& config, tsrate::app::RunOptions& opts) {
  cmd->add_option("--config", config, "Run config (JSON)")->required();
  cmd->add_option("--out", opts.output_dir, "Output directory (overrides output_dir)");
  cmd->add_option("--seed", opts.seed, "Global seed (overrides seed)");
  cmd->add_option("--l-levels", opts.levels, "Rating levels L (overrides metrics.levels)");
  cmd->add_option("--jobs", opts.jobs, "Worker threads (overrides jobs)");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace tsrate::app;
  CLI::App app{"Rate time-series forecasters for robustness and bias"};
  app.set_version_flag("--version", std::string(tsrate::kVersion));
  app.require_subcommand(1);

  std::string config;
  RunOptions run_opts;
  auto* validate = app.add_subcommand("validate", "Check a run config without running it");
  add_run_flags(validate, config, run_opts);
  auto* run = app.add_subcommand("run", "Forecast, score and rate every configured model");
  add_run_flags(run, config, run_opts);
  auto* images = app.add_subcommand("images", "Write spectrogram and line-plot PNGs for every window");
  add_run_flags(images, config, run_opts);

  RateOptions rate_opts;
  std::string direction;
  std::string tie_rule = "distinct";
  std::optional<std::string> rate_out;
  auto* rate = app.add_subcommand("rate", "Rate models from a raw-score CSV");
  rate->add_option("--scores", rate_opts.scores, "Raw-score CSV")->required();
  rate->add_option("--l-levels", rate_opts.levels, "Rating levels L");
  rate->add_option("--direction", direction, "Force lower|higher is better for every metric")
      ->check(CLI::IsMember({"lower", "higher"}));
  rate->add_option("--tie-rule", tie_rule, "distinct|majority|first")
      ->check(CLI::IsMember({"distinct", "majority", "first"}));
  rate->add_option("--out", rate_out, "Write ratings.csv/ratings.json here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*validate) return cmd_validate(config, run_opts, std::cout, std::cerr);
    if (*run) return cmd_run(config, run_opts, std::cout, std::cerr);
    if (*images) return cmd_images(config, run_opts, std::cout, std::cerr);
    if (!direction.empty()) rate_opts.direction = tsrate::parse_direction(direction);
    rate_opts.rule = tsrate::parse_tie_rule(tie_rule);
    if (rate_out) rate_opts.output_dir = *rate_out;
    return cmd_rate(rate_opts, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStage;
  }
}
