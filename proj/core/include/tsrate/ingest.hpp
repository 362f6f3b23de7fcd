#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsrate/series.hpp"

namespace tsrate {

enum class PriceColumn { kClose, kAdjClose };

struct LoadResult {
  LabeledSeries series;
  std::size_t skipped_rows = 0;  ///< rows whose price did not parse
};

/// Loads a Yahoo!-Finance style CSV (header row; Date and Close columns,
/// case-insensitive). Output is sorted by date. Rows with an unparseable
/// price are skipped and counted; unparseable dates and duplicate dates are
/// errors.
LoadResult load_csv(const std::filesystem::path& path, const std::string& company,
                    const std::string& industry, PriceColumn column = PriceColumn::kClose);

/// ISO 8601 (YYYY-MM-DD) or MM/DD/YYYY. Returns nullopt for anything else.
std::optional<Date> parse_date(std::string_view text);

struct ManifestEntry {
  std::filesystem::path csv_path;
  std::string company;
  std::string industry;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::optional<Date> start;  ///< inclusive
  std::optional<Date> end;    ///< inclusive
  PriceColumn column = PriceColumn::kClose;
};

struct Dataset {
  std::vector<LabeledSeries> series;
  std::size_t skipped_rows = 0;

  std::vector<std::string> companies() const;
  std::vector<std::string> industries() const;  ///< first-seen order
};

/// Checks company uniqueness and the company -> industry mapping. Throws
/// DataError on violation.
void validate_manifest(const DatasetManifest& manifest);

/// Loads every entry and trims each series to the manifest's date range.
Dataset load_dataset(const DatasetManifest& manifest);

/// Zero-mean, unit (population) variance. Constant input maps to zeros.
std::vector<double> standardize(std::span<const double> values);

}  // namespace tsrate
