#include "tsrate/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "tsrate/csv.hpp"
#include "tsrate/errors.hpp"

namespace tsrate {

namespace {

std::string lower(std::string_view s) {
  std::string out(csv::trim(s));
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::optional<int> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<Date> make_date(std::optional<int> y, std::optional<int> m, std::optional<int> d) {
  if (!y || !m || !d || *m < 1 || *d < 1) return std::nullopt;
  const Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  const auto s = csv::trim(text);
  // YYYY-MM-DD
  if (s.size() == 10 && s[4] == '-' && s[7] == '-') {
    return make_date(parse_int(s.substr(0, 4)), parse_int(s.substr(5, 2)),
                     parse_int(s.substr(8, 2)));
  }
  // MM/DD/YYYY, one- or two-digit month and day
  const auto a = s.find('/');
  const auto b = a == std::string_view::npos ? a : s.find('/', a + 1);
  if (a != std::string_view::npos && b != std::string_view::npos && a >= 1 && a <= 2 &&
      b - a - 1 >= 1 && b - a - 1 <= 2 && s.size() - b - 1 == 4) {
    return make_date(parse_int(s.substr(b + 1)), parse_int(s.substr(0, a)),
                     parse_int(s.substr(a + 1, b - a - 1)));
  }
  return std::nullopt;
}

LoadResult load_csv(const std::filesystem::path& path, const std::string& company,
                    const std::string& industry, PriceColumn column) {
  const auto lines = csv::read_lines(path);
  std::size_t header_idx = 0;
  while (header_idx < lines.size() && csv::trim(lines[header_idx]).empty()) ++header_idx;
  if (header_idx == lines.size()) throw DataError("'" + path.string() + "' is empty");

  const auto header = csv::split(lines[header_idx]);
  const std::string price_name = column == PriceColumn::kAdjClose ? "adj close" : "close";
  std::optional<std::size_t> date_col;
  std::optional<std::size_t> price_col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto h = lower(header[i]);
    if (h == "date") date_col = i;
    if (h == price_name || (column == PriceColumn::kAdjClose && h == "adj_close")) price_col = i;
  }
  if (!date_col || !price_col) {
    std::string available;
    for (const auto& h : header) available += (available.empty() ? "" : ", ") + std::string(csv::trim(h));
    throw DataError("'" + path.string() + "' lacks required column(s) Date and " +
                    (column == PriceColumn::kAdjClose ? "Adj Close" : "Close") +
                    "; available headers: " + available);
  }

  std::vector<std::pair<Date, double>> rows;
  LoadResult out;
  for (std::size_t li = header_idx + 1; li < lines.size(); ++li) {
    if (csv::trim(lines[li]).empty()) continue;
    const auto fields = csv::split(lines[li]);
    const auto need = std::max(*date_col, *price_col);
    if (fields.size() <= need) {
      ++out.skipped_rows;
      continue;
    }
    const auto date = parse_date(fields[*date_col]);
    if (!date) {
      throw DataError("'" + path.string() + "' line " + std::to_string(li + 1) +
                      ": unrecognised date '" + std::string(csv::trim(fields[*date_col])) +
                      "' (expected YYYY-MM-DD or MM/DD/YYYY)");
    }
    const auto price = csv::parse_double(fields[*price_col]);
    if (!price) {
      ++out.skipped_rows;
      continue;
    }
    rows.emplace_back(*date, *price);
  }
  if (rows.empty()) throw DataError("'" + path.string() + "' contains no usable price rows");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].first == rows[i - 1].first) {
      throw DataError("'" + path.string() + "' has duplicate date " + format_date(rows[i].first));
    }
  }
  out.series.company = company;
  out.series.industry = industry;
  out.series.dates.reserve(rows.size());
  out.series.values.reserve(rows.size());
  for (const auto& [d, v] : rows) {
    out.series.dates.push_back(d);
    out.series.values.push_back(v);
  }
  return out;
}

std::vector<std::string> Dataset::companies() const {
  std::vector<std::string> out;
  for (const auto& s : series) out.push_back(s.company);
  return out;
}

std::vector<std::string> Dataset::industries() const {
  std::vector<std::string> out;
  for (const auto& s : series) {
    if (std::find(out.begin(), out.end(), s.industry) == out.end()) out.push_back(s.industry);
  }
  return out;
}

void validate_manifest(const DatasetManifest& manifest) {
  if (manifest.entries.empty()) throw DataError("dataset manifest has no entries");
  std::set<std::string> companies;
  for (const auto& e : manifest.entries) {
    if (e.company.empty() || e.industry.empty()) {
      throw DataError("manifest entry '" + e.csv_path.string() + "' needs company and industry");
    }
    if (!companies.insert(e.company).second) {
      throw DataError("company '" + e.company + "' appears more than once in the manifest");
    }
  }
  if (manifest.start && manifest.end && *manifest.end < *manifest.start) {
    throw DataError("dataset date range ends before it starts");
  }
}

Dataset load_dataset(const DatasetManifest& manifest) {
  validate_manifest(manifest);
  Dataset ds;
  for (const auto& e : manifest.entries) {
    auto loaded = load_csv(e.csv_path, e.company, e.industry, manifest.column);
    ds.skipped_rows += loaded.skipped_rows;
    auto& s = loaded.series;
    if (manifest.start || manifest.end) {
      LabeledSeries trimmed{{}, {}, s.company, s.industry};
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (manifest.start && s.dates[i] < *manifest.start) continue;
        if (manifest.end && *manifest.end < s.dates[i]) continue;
        trimmed.dates.push_back(s.dates[i]);
        trimmed.values.push_back(s.values[i]);
      }
      s = std::move(trimmed);
    }
    ds.series.push_back(std::move(s));
  }
  return ds;
}

std::vector<double> standardize(std::span<const double> values) {
  if (values.size() < 2) throw DataError("standardize needs at least 2 values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / n);
  std::vector<double> out(values.size(), 0.0);
  if (!(sigma > 1e-12 * std::max(1.0, std::abs(mean)))) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) / sigma;
  return out;
}

}  // namespace tsrate
