#include "tsrate/scores_io.hpp"

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "tsrate/csv.hpp"
#include "tsrate/errors.hpp"

namespace tsrate {

namespace {

std::string format_value(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return csv::format_double(v);
}

}  // namespace

std::vector<RawScore> parse_raw_scores(std::string_view text, std::string_view source) {
  std::vector<RawScore> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    const auto where = std::string(source) + ":" + std::to_string(line_no) + ": ";
    if (!header_seen) {
      const char* expected[] = {"metric", "model_id", "perturbation", "confounder", "value"};
      if (fields.size() != 5) throw DataError(where + "header must be metric,model_id,perturbation,confounder,value");
      for (std::size_t k = 0; k < 5; ++k) {
        if (csv::trim(fields[k]) != expected[k]) {
          throw DataError(where + "header must be metric,model_id,perturbation,confounder,value");
        }
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 5) {
      throw DataError(where + "expected 5 fields, found " + std::to_string(fields.size()));
    }
    RawScore s;
    s.metric = std::string(csv::trim(fields[0]));
    s.model_id = std::string(csv::trim(fields[1]));
    s.confounder = std::string(csv::trim(fields[3]));
    if (s.metric.empty() || s.model_id.empty()) throw DataError(where + "empty metric or model id");
    if (s.confounder.empty()) s.confounder = "none";
    try {
      s.perturbation = parse_perturbation(csv::trim(fields[2]));
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
    const auto value = csv::trim(fields[4]);
    if (value == "inf") {
      s.value = std::numeric_limits<double>::infinity();
    } else if (const auto v = csv::parse_double(value)) {
      s.value = *v;
    } else {
      throw DataError(where + "value '" + std::string(value) + "' is not a number");
    }
    out.push_back(std::move(s));
  }
  if (!header_seen) throw DataError(std::string(source) + ": no header row");
  return out;
}

std::vector<RawScore> read_raw_scores(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("scores file '" + path.string() + "' does not exist");
  std::string text;
  for (const auto& l : csv::read_lines(path)) text += l + '\n';
  return parse_raw_scores(text, path.string());
}

std::string format_raw_scores(std::span<const RawScore> scores) {
  std::string s = "metric,model_id,perturbation,confounder,value\n";
  for (const auto& r : scores) {
    s += csv::escape(r.metric) + ',' + csv::escape(r.model_id) + ',' +
         std::string(to_string(r.perturbation)) + ',' + csv::escape(r.confounder) + ',' +
         format_value(r.value) + '\n';
  }
  return s;
}

std::string format_ratings_csv(std::span<const RatingRow> rows) {
  std::string s = "metric,perturbation,confounder,model_id,value,rank,rating,ascending_rating\n";
  for (const auto& r : rows) {
    s += csv::escape(r.metric) + ',' + std::string(to_string(r.perturbation)) + ',' +
         csv::escape(r.confounder) + ',' + csv::escape(r.model_id) + ',' + format_value(r.value) +
         ',' + std::to_string(r.rank) + ',' + std::to_string(r.rating) + ',' +
         std::to_string(r.ascending_rating) + '\n';
  }
  return s;
}

std::string format_ratings_json(std::span<const RatingRow> rows, std::size_t levels,
                                std::string_view tie_rule) {
  nlohmann::ordered_json doc;
  doc["levels"] = levels;
  doc["tie_rule"] = tie_rule;
  auto& tables = doc["tables"];
  tables = nlohmann::ordered_json::object();
  for (const auto& r : rows) {
    auto& cell = tables[r.metric][r.confounder][std::string(to_string(r.perturbation))];
    nlohmann::ordered_json e;
    e["model_id"] = r.model_id;
    if (std::isinf(r.value)) {
      e["value"] = format_value(r.value);
    } else {
      e["value"] = r.value;
    }
    e["rank"] = r.rank;
    e["rating"] = r.rating;
    e["ascending_rating"] = r.ascending_rating;
    cell.push_back(std::move(e));
  }
  return doc.dump(2) + '\n';
}

}  // namespace tsrate
