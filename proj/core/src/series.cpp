#include "tsrate/series.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>

#include "tsrate/errors.hpp"

namespace tsrate {

namespace {

constexpr std::string_view kPerturbationNames[kPerturbationCount] = {
    "P0", "P1", "P2", "P3", "P4", "P5", "P6"};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view to_string(Perturbation p) {
  return kPerturbationNames[static_cast<std::size_t>(p)];
}

Perturbation parse_perturbation(std::string_view text) {
  if (text.size() == 2 && (text[0] == 'P' || text[0] == 'p') && text[1] >= '0' &&
      text[1] <= '6') {
    return static_cast<Perturbation>(text[1] - '0');
  }
  throw DataError("unknown perturbation '" + std::string(text) + "' (expected P0..P6)");
}

std::vector<Perturbation> all_perturbations() {
  std::vector<Perturbation> out;
  for (std::size_t i = 0; i < kPerturbationCount; ++i) out.push_back(static_cast<Perturbation>(i));
  return out;
}

bool is_numeric_perturbation(Perturbation p) {
  return p == Perturbation::P1 || p == Perturbation::P2 || p == Perturbation::P3;
}

bool is_image_perturbation(Perturbation p) {
  return p == Perturbation::P4 || p == Perturbation::P5 || p == Perturbation::P6;
}

std::string_view to_string(ConfounderField f) {
  return f == ConfounderField::kCompany ? "company" : "industry";
}

ConfounderField parse_confounder_field(std::string_view text) {
  const auto t = lower(text);
  if (t == "company") return ConfounderField::kCompany;
  if (t == "industry") return ConfounderField::kIndustry;
  throw DataError("unknown confounder field '" + std::string(text) +
                  "' (expected company or industry)");
}

const std::string& confounder_value(const CausalRow& row, ConfounderField field) {
  return field == ConfounderField::kCompany ? row.company : row.industry;
}

std::vector<CausalRow> CausalFrame::select(std::string_view model_id, Perturbation p) const {
  std::vector<CausalRow> out;
  for (const auto& r : rows) {
    if (r.model_id == model_id && r.perturbation == p) out.push_back(r);
  }
  return out;
}

std::vector<Perturbation> CausalFrame::perturbations() const {
  std::set<Perturbation> seen;
  for (const auto& r : rows) seen.insert(r.perturbation);
  return {seen.begin(), seen.end()};
}

std::string make_window_id(std::string_view company, std::size_t offset) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05zu", offset);
  return std::string(company) + "-" + buf;
}

std::vector<EvalWindow> slide_windows(const LabeledSeries& series, std::size_t n, std::size_t d,
                                      std::size_t stride) {
  if (n < 1 || d < 1 || stride < 1) {
    throw DataError("slide_windows: n, d and stride must all be >= 1");
  }
  const std::size_t len = series.values.size();
  if (len < n + d) {
    throw DataError("series '" + series.company + "' has " + std::to_string(len) +
                    " values; at least " + std::to_string(n + d) + " (n + d) are required");
  }
  const std::size_t count = (len - n - d) / stride + 1;
  std::vector<EvalWindow> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t off = k * stride;
    EvalWindow w;
    w.window_id = make_window_id(series.company, off);
    w.company = series.company;
    w.industry = series.industry;
    w.offset = off;
    const auto first = series.values.begin() + static_cast<std::ptrdiff_t>(off);
    w.history.assign(first, first + static_cast<std::ptrdiff_t>(n));
    w.truth.assign(first + static_cast<std::ptrdiff_t>(n),
                   first + static_cast<std::ptrdiff_t>(n + d));
    out.push_back(std::move(w));
  }
  return out;
}

double max_residual(std::span<const double> residuals, MaxResidualMode mode) {
  if (residuals.empty()) return 0.0;
  if (mode == MaxResidualMode::kSigned) {
    return *std::max_element(residuals.begin(), residuals.end());
  }
  double m = 0.0;
  for (double r : residuals) m = std::max(m, std::abs(r));
  return m;
}

ResidualRecord residuals(const PredictionRecord& pred, const EvalWindow& window,
                         MaxResidualMode mode) {
  if (pred.window_id != window.window_id) {
    throw DataError("prediction for window '" + pred.window_id +
                    "' joined with window '" + window.window_id + "'");
  }
  if (pred.prediction.size() != window.truth.size()) {
    throw DataError("prediction for window '" + pred.window_id + "' has " +
                    std::to_string(pred.prediction.size()) + " values, truth has " +
                    std::to_string(window.truth.size()));
  }
  ResidualRecord out;
  out.window_id = pred.window_id;
  out.model_id = pred.model_id;
  out.perturbation = pred.perturbation;
  out.residuals.resize(window.truth.size());
  for (std::size_t i = 0; i < window.truth.size(); ++i) {
    if (!std::isfinite(pred.prediction[i])) {
      throw DataError("non-finite prediction value at index " + std::to_string(i) +
                      " for window '" + pred.window_id + "', model '" + pred.model_id + "'");
    }
    out.residuals[i] = pred.prediction[i] - window.truth[i];
  }
  out.max_residual = max_residual(out.residuals, mode);
  return out;
}

CausalFrame build_causal_frame(std::span<const ResidualRecord> records, const LabelIndex& labels) {
  CausalFrame frame;
  frame.rows.reserve(records.size());
  for (const auto& rec : records) {
    const auto it = labels.find(rec.window_id);
    if (it == labels.end()) {
      throw DataError("residual record references unknown window '" + rec.window_id + "'");
    }
    frame.rows.push_back(CausalRow{rec.model_id, rec.perturbation, rec.window_id,
                                   it->second.company, it->second.industry, rec.max_residual});
  }
  return frame;
}

LabelIndex index_labels(std::span<const EvalWindow> windows) {
  LabelIndex out;
  for (const auto& w : windows) out.emplace(w.window_id, WindowLabels{w.company, w.industry});
  return out;
}

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

}  // namespace tsrate
