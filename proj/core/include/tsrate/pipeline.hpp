#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsrate/config.hpp"
#include "tsrate/predictions_io.hpp"
#include "tsrate/rating.hpp"
#include "tsrate/series.hpp"

namespace tsrate::app {

/// Command-line overrides applied on top of a loaded config.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> levels;
  std::optional<std::size_t> jobs;
  std::optional<std::filesystem::path> output_dir;
};

void apply_overrides(RunConfig& config, const RunOptions& options);

/// Extra numbers behind one raw score.
struct ScoreDetail {
  RawScore score;
  std::string source;  ///< distribution name for APE/PIE, empty otherwise
  std::optional<double> stddev;
  std::size_t windows = 0;
  std::optional<double> ape_o;
  std::optional<double> ape_m;
  std::optional<double> signed_o;
  std::optional<double> signed_m;
  std::size_t treated = 0;
  std::size_t controls = 0;
  std::size_t matched = 0;
  std::size_t excluded_treated = 0;
};

struct AssignmentRow {
  std::string distribution;
  std::string model_id;
  std::string window_id;
  std::string confounder;
  Perturbation perturbation = Perturbation::P0;
};

struct ModelReject {
  std::string model_id;
  PredictionReject reject;
};

struct RunArtifacts {
  std::vector<EvalWindow> windows;
  std::size_t skipped_rows = 0;
  std::vector<PredictionRecord> predictions;
  std::vector<ResidualRecord> residuals;
  CausalFrame frame;
  std::vector<AssignmentRow> assignments;
  std::vector<ScoreDetail> details;   ///< per distribution for APE/PIE
  std::vector<RawScore> raw_scores;   ///< one per metric x model x perturbation
  std::vector<RatingRow> ratings;
  std::vector<std::string> warnings;
  std::vector<ModelReject> rejects;
  std::vector<std::pair<std::string, AuditEntry>> http_audit;  ///< (model id, entry)
  std::vector<std::string> completed_stages;
};

/// Raised when a pipeline stage fails; carries the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Runs every stage in memory. `partial` receives whatever was finished
/// before a StageError.
RunArtifacts compute_run(const RunConfig& config, RunArtifacts* partial = nullptr);

/// Writes the run's CSV/JSON outputs and manifest into config.output_dir.
void write_run_outputs(const RunConfig& config, const RunArtifacts& artifacts,
                       const std::optional<std::string>& failed_stage = std::nullopt,
                       const std::string& error = {});

/// Writes spectrogram and line-plot PNGs for every window; returns the
/// number of files written.
std::size_t write_images(const RunConfig& config, const std::filesystem::path& dir);

/// Hex SHA-256.
std::string sha256_hex(std::string_view data);

/// ISO 8601 UTC time; honours SOURCE_DATE_EPOCH when set.
std::string timestamp_utc();

}  // namespace tsrate::app
