#include "tsrate/predictions_io.hpp"

#include <algorithm>

#include "tsrate/csv.hpp"
#include "tsrate/errors.hpp"

namespace tsrate {

ExternalPredictions load_external_predictions(const std::filesystem::path& path,
                                              const std::set<std::string, std::less<>>& known_windows,
                                              std::size_t horizon) {
  if (!std::filesystem::exists(path)) {
    throw DataError("prediction file '" + path.string() + "' does not exist");
  }
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw DataError("prediction file '" + path.string() + "' is empty");
  const auto header = csv::split(lines[0]);
  if (header.size() < 3 || csv::trim(header[0]) != "window_id" ||
      csv::trim(header[1]) != "model_id" || csv::trim(header[2]) != "perturbation") {
    throw DataError(path.string() + ":1: header must start with window_id,model_id,perturbation");
  }
  ExternalPredictions out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (csv::trim(lines[i]).empty()) continue;
    auto fields = csv::split(lines[i]);
    while (!fields.empty() && csv::trim(fields.back()).empty()) fields.pop_back();
    const auto where = path.string() + ":" + std::to_string(line_no) + ": ";
    if (fields.size() < 3) throw DataError(where + "expected window_id,model_id,perturbation,values");
    PredictionRecord rec;
    rec.window_id = std::string(csv::trim(fields[0]));
    rec.model_id = std::string(csv::trim(fields[1]));
    if (rec.window_id.empty() || rec.model_id.empty()) throw DataError(where + "empty id");
    try {
      rec.perturbation = parse_perturbation(csv::trim(fields[2]));
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
    for (std::size_t k = 3; k < fields.size(); ++k) {
      const auto v = csv::parse_double(fields[k]);
      if (!v) throw DataError(where + "value " + std::to_string(k - 2) + " is not a finite number");
      rec.prediction.push_back(*v);
    }
    if (known_windows.count(rec.window_id) == 0) {
      out.rejects.push_back({line_no, rec.window_id, "unknown window id"});
      continue;
    }
    if (rec.prediction.size() != horizon) {
      out.rejects.push_back({line_no, rec.window_id,
                             "expected " + std::to_string(horizon) + " values, got " +
                                 std::to_string(rec.prediction.size())});
      continue;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::string format_predictions_csv(std::span<const PredictionRecord> records) {
  std::size_t width = 0;
  for (const auto& r : records) width = std::max(width, r.prediction.size());
  std::string s = "window_id,model_id,perturbation";
  for (std::size_t k = 1; k <= width; ++k) s += ",v" + std::to_string(k);
  s += '\n';
  for (const auto& r : records) {
    s += csv::escape(r.window_id) + ',' + csv::escape(r.model_id) + ',' +
         std::string(to_string(r.perturbation));
    for (std::size_t k = 0; k < width; ++k) {
      s += ',';
      if (k < r.prediction.size()) s += csv::format_double(r.prediction[k]);
    }
    s += '\n';
  }
  return s;
}

void write_predictions_csv(const std::filesystem::path& path,
                           std::span<const PredictionRecord> records) {
  csv::write_file(path, format_predictions_csv(records));
}

}  // namespace tsrate
