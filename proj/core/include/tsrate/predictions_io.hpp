#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tsrate/series.hpp"

namespace tsrate {

// Exchange format: header `window_id,model_id,perturbation,v1,...,vd`, one
// row per prediction. Trailing empty cells are ignored so files with a wider
// header than some rows still load.

struct PredictionReject {
  std::size_t line = 0;  ///< 1-based line in the file
  std::string window_id;
  std::string reason;
};

struct ExternalPredictions {
  std::vector<PredictionRecord> records;
  std::vector<PredictionReject> rejects;
};

/// Rows for unknown windows or with a length other than `horizon` are
/// rejected and reported. Structurally malformed rows (too few fields, bad
/// perturbation tag, non-numeric value) throw DataError naming the line.
ExternalPredictions load_external_predictions(const std::filesystem::path& path,
                                              const std::set<std::string, std::less<>>& known_windows,
                                              std::size_t horizon);

std::string format_predictions_csv(std::span<const PredictionRecord> records);

void write_predictions_csv(const std::filesystem::path& path,
                           std::span<const PredictionRecord> records);

}  // namespace tsrate
