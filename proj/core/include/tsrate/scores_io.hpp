#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tsrate/rating.hpp"

namespace tsrate {

/// Raw-score CSV: header `metric,model_id,perturbation,confounder,value`.
/// `inf` is accepted as a value. Malformed rows throw DataError naming the line.
std::vector<RawScore> read_raw_scores(const std::filesystem::path& path);
std::vector<RawScore> parse_raw_scores(std::string_view text, std::string_view source);

std::string format_raw_scores(std::span<const RawScore> scores);

/// `metric,perturbation,confounder,model_id,value,rank,rating,ascending_rating`.
std::string format_ratings_csv(std::span<const RatingRow> rows);

/// Nested as metric -> confounder -> perturbation -> [{model_id, value, rank,
/// rating, ascending_rating}] in partial-order sequence.
std::string format_ratings_json(std::span<const RatingRow> rows, std::size_t levels,
                                std::string_view tie_rule);

}  // namespace tsrate
