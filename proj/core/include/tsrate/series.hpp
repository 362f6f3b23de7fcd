#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsrate {

using Date = std::chrono::year_month_day;

/// Treatment levels. P0 is the unperturbed control; P1-P3 act on the numeric
/// history, P4-P6 on image inputs.
enum class Perturbation { P0 = 0, P1, P2, P3, P4, P5, P6 };

inline constexpr std::size_t kPerturbationCount = 7;

std::string_view to_string(Perturbation p);
/// Accepts "P0".."P6" (case-insensitive). Throws DataError otherwise.
Perturbation parse_perturbation(std::string_view text);
std::vector<Perturbation> all_perturbations();
bool is_numeric_perturbation(Perturbation p);
bool is_image_perturbation(Perturbation p);

/// A univariate daily price series labelled with its company and industry.
struct LabeledSeries {
  std::vector<double> values;
  std::vector<Date> dates;
  std::string company;
  std::string industry;

  std::size_t size() const { return values.size(); }
};

/// One sliding-window sample: `history` (n values) immediately followed by
/// `truth` (d values) in the source series.
struct EvalWindow {
  std::string window_id;
  std::string company;
  std::string industry;
  std::size_t offset = 0;  ///< index of history[0] in the source series
  std::vector<double> history;
  std::vector<double> truth;
};

struct PredictionRecord {
  std::string window_id;
  std::string model_id;
  Perturbation perturbation = Perturbation::P0;
  std::vector<double> prediction;
};

/// How R^max is reduced from the residual vector.
enum class MaxResidualMode {
  kAbsolute,  ///< max_i |r_i| (default)
  kSigned,    ///< max_i r_i, kept for ablation
};

struct ResidualRecord {
  std::string window_id;
  std::string model_id;
  Perturbation perturbation = Perturbation::P0;
  std::vector<double> residuals;
  double max_residual = 0.0;
};

struct WindowLabels {
  std::string company;
  std::string industry;
};

using LabelIndex = std::map<std::string, WindowLabels, std::less<>>;

struct CausalRow {
  std::string model_id;
  Perturbation perturbation = Perturbation::P0;
  std::string window_id;
  std::string company;
  std::string industry;
  double max_residual = 0.0;
};

/// Which label acts as the sensitive attribute / confounder.
enum class ConfounderField { kCompany, kIndustry };

std::string_view to_string(ConfounderField f);
ConfounderField parse_confounder_field(std::string_view text);
const std::string& confounder_value(const CausalRow& row, ConfounderField field);

/// Flat table of (model, perturbation, labels, R^max) rows.
struct CausalFrame {
  std::vector<CausalRow> rows;

  /// Rows of one model under one perturbation, in frame order.
  std::vector<CausalRow> select(std::string_view model_id, Perturbation p) const;
  /// Distinct perturbations present, ascending.
  std::vector<Perturbation> perturbations() const;
};

std::string make_window_id(std::string_view company, std::size_t offset);

/// Extracts floor((len - n - d) / stride) + 1 contiguous windows.
/// Throws DataError when the series is shorter than n + d.
std::vector<EvalWindow> slide_windows(const LabeledSeries& series, std::size_t n,
                                      std::size_t d, std::size_t stride = 1);

/// R_t = prediction - truth, reduced to R^max according to `mode`.
ResidualRecord residuals(const PredictionRecord& pred, const EvalWindow& window,
                         MaxResidualMode mode = MaxResidualMode::kAbsolute);

double max_residual(std::span<const double> residuals, MaxResidualMode mode);

/// Joins residual records with window labels. Throws DataError for window ids
/// missing from `labels`.
CausalFrame build_causal_frame(std::span<const ResidualRecord> records,
                               const LabelIndex& labels);

LabelIndex index_labels(std::span<const EvalWindow> windows);

std::string format_date(const Date& date);

}  // namespace tsrate
