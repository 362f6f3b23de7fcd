#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsrate/series.hpp"

namespace tsrate {

/// How equal scores are kept in one rating when ArraySplit boundaries would
/// separate them.
enum class TieRule {
  kDistinct,  ///< split the sorted distinct score levels (default)
  kMajority,  ///< each score takes the group holding most of its copies, lower on ties
  kFirst,     ///< each score takes the first group containing it
};

std::string_view to_string(TieRule r);
TieRule parse_tie_rule(std::string_view text);

enum class Direction { kLowerIsBetter, kHigherIsBetter };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);

/// One metric value for one model under one perturbation and confounder
/// field ("industry", "company" or "none").
struct RawScore {
  std::string metric;
  std::string model_id;
  Perturbation perturbation = Perturbation::P0;
  std::string confounder = "none";
  double value = 0.0;
};

struct ScoredModel {
  std::string model_id;
  double score = 0.0;
};

/// Models of one perturbation sorted by ascending score, ties by model id.
struct PartialOrder {
  Perturbation perturbation = Perturbation::P0;
  std::vector<ScoredModel> entries;
};

PartialOrder create_partial_order(std::span<const ScoredModel> scores, Perturbation p);

/// Near-equal contiguous split of `n` items into `levels` groups: the first
/// n % levels groups get one extra item.
std::vector<std::size_t> array_split(std::size_t n, std::size_t levels);

struct ModelRating {
  std::string model_id;
  double score = 0.0;
  std::size_t rank = 0;              ///< 1 + number of strictly better models
  std::size_t rating = 0;            ///< 1 = best
  std::size_t ascending_rating = 0;  ///< 1 = lowest score, as printed in score tables
};

/// Ratings in partial-order (ascending) sequence. A lone model gets
/// ascending rating 1 when its score is 0 and `levels` otherwise.
std::vector<ModelRating> assign_rating(const PartialOrder& po, std::size_t levels,
                                       Direction direction = Direction::kLowerIsBetter,
                                       TieRule rule = TieRule::kDistinct);

/// Ascending-orientation group indices for already sorted scores.
std::vector<std::size_t> split_ratings(std::span<const double> sorted_scores, std::size_t levels,
                                       TieRule rule);

struct RatingRow {
  std::string metric;
  Perturbation perturbation = Perturbation::P0;
  std::string confounder;
  std::string model_id;
  double value = 0.0;
  std::size_t rank = 0;
  std::size_t rating = 0;
  std::size_t ascending_rating = 0;
};

struct RatingOptions {
  std::size_t levels = 3;
  TieRule rule = TieRule::kDistinct;
  /// Forces one direction for every metric; otherwise SIGN_ACC is higher-is-better.
  std::optional<Direction> direction;
};

/// Rates every (metric, perturbation, confounder) cell independently. Output
/// is sorted by metric, confounder, perturbation, then ascending score.
/// Throws DataError when a model appears twice within one cell.
std::vector<RatingRow> rate_scores(std::span<const RawScore> scores, const RatingOptions& options);

}  // namespace tsrate
