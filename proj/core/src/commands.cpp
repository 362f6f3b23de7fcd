#include "tsrate/commands.hpp"

#include "tsrate/csv.hpp"
#include "tsrate/errors.hpp"
#include "tsrate/scores_io.hpp"

namespace tsrate::app {

namespace {

void print_issues(std::ostream& err, const std::vector<ConfigIssue>& issues) {
  for (const auto& i : issues) err << "error: " << i.path << ": " << i.message << '\n';
}

// Loads, applies overrides and validates; nullopt after printing problems.
std::optional<RunConfig> checked_config(const std::filesystem::path& path, const RunOptions& options,
                                        std::ostream& err) {
  try {
    auto cfg = load_config(path);
    apply_overrides(cfg, options);
    const auto issues = validate_config(cfg);
    if (!issues.empty()) {
      print_issues(err, issues);
      return std::nullopt;
    }
    return cfg;
  } catch (const ConfigInvalid& e) {
    print_issues(err, e.issues());
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  }
  return std::nullopt;
}

}  // namespace

int cmd_validate(const std::filesystem::path& config, const RunOptions& options, std::ostream& out,
                 std::ostream& err) {
  if (!checked_config(config, options, err)) return kExitConfig;
  out << "OK\n";
  return kExitOk;
}

int cmd_run(const std::filesystem::path& config, const RunOptions& options, std::ostream& out,
            std::ostream& err) {
  const auto cfg = checked_config(config, options, err);
  if (!cfg) return kExitConfig;
  RunArtifacts partial;
  try {
    const auto art = compute_run(*cfg, &partial);
    write_run_outputs(*cfg, art);
    for (const auto& w : art.warnings) err << "warning: " << w << '\n';
    out << "run complete: " << art.windows.size() << " windows, " << art.predictions.size()
        << " predictions, " << art.raw_scores.size() << " raw scores -> "
        << cfg->output_dir.string() << '\n';
    return kExitOk;
  } catch (const StageError& e) {
    err << "error: " << e.what() << '\n';
    try {
      write_run_outputs(*cfg, partial, e.stage(), e.what());
      err << "partial outputs flagged in " << (cfg->output_dir / "manifest.json").string() << '\n';
    } catch (const std::exception& inner) {
      err << "error: could not write the failure manifest: " << inner.what() << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: stage 'write' failed: " << e.what() << '\n';
  }
  return kExitStage;
}

int cmd_rate(const RateOptions& options, std::ostream& out, std::ostream& err) {
  if (options.levels < 1) {
    err << "error: --l-levels: must be >= 1\n";
    return kExitConfig;
  }
  std::vector<RawScore> scores;
  try {
    scores = read_raw_scores(options.scores);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    const auto rows = rate_scores(scores, {options.levels, options.rule, options.direction});
    const auto csv_text = format_ratings_csv(rows);
    if (options.output_dir) {
      csv::write_file(*options.output_dir / "ratings.csv", csv_text);
      csv::write_file(*options.output_dir / "ratings.json",
                      format_ratings_json(rows, options.levels, to_string(options.rule)));
      out << "wrote " << rows.size() << " ratings to " << options.output_dir->string() << '\n';
    } else {
      out << csv_text;
    }
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: stage 'rating' failed: " << e.what() << '\n';
    return kExitStage;
  }
  return kExitOk;
}

int cmd_images(const std::filesystem::path& config, const RunOptions& options, std::ostream& out,
               std::ostream& err) {
  const auto cfg = checked_config(config, options, err);
  if (!cfg) return kExitConfig;
  try {
    const auto dir = cfg->output_dir / "images";
    const auto n = write_images(*cfg, dir);
    out << "wrote " << n << " images to " << dir.string() << '\n';
  } catch (const std::exception& e) {
    err << "error: stage 'images' failed: " << e.what() << '\n';
    return kExitStage;
  }
  return kExitOk;
}

}  // namespace tsrate::app
