#include "tsrate/rating.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "tsrate/errors.hpp"
#include "tsrate/metrics.hpp"

namespace tsrate {

std::string_view to_string(TieRule r) {
  switch (r) {
    case TieRule::kDistinct: return "distinct";
    case TieRule::kMajority: return "majority";
    case TieRule::kFirst: return "first";
  }
  return "distinct";
}

TieRule parse_tie_rule(std::string_view text) {
  if (text == "distinct") return TieRule::kDistinct;
  if (text == "majority") return TieRule::kMajority;
  if (text == "first") return TieRule::kFirst;
  throw DataError("unknown tie rule '" + std::string(text) + "' (distinct|majority|first)");
}

std::string_view to_string(Direction d) {
  return d == Direction::kLowerIsBetter ? "lower" : "higher";
}

Direction parse_direction(std::string_view text) {
  if (text == "lower") return Direction::kLowerIsBetter;
  if (text == "higher") return Direction::kHigherIsBetter;
  throw DataError("unknown direction '" + std::string(text) + "' (lower|higher)");
}

PartialOrder create_partial_order(std::span<const ScoredModel> scores, Perturbation p) {
  PartialOrder po{p, {scores.begin(), scores.end()}};
  std::stable_sort(po.entries.begin(), po.entries.end(), [](const auto& a, const auto& b) {
    return std::tie(a.score, a.model_id) < std::tie(b.score, b.model_id);
  });
  return po;
}

std::vector<std::size_t> array_split(std::size_t n, std::size_t levels) {
  if (levels == 0) throw DataError("rating levels must be >= 1");
  std::vector<std::size_t> sizes(levels, n / levels);
  for (std::size_t i = 0; i < n % levels; ++i) ++sizes[i];
  return sizes;
}

namespace {

std::vector<std::size_t> group_of_position(std::size_t n, std::size_t levels) {
  std::vector<std::size_t> out;
  out.reserve(n);
  const auto sizes = array_split(n, levels);
  for (std::size_t g = 0; g < sizes.size(); ++g) out.insert(out.end(), sizes[g], g + 1);
  return out;
}

}  // namespace

std::vector<std::size_t> split_ratings(std::span<const double> sorted_scores, std::size_t levels,
                                       TieRule rule) {
  const std::size_t n = sorted_scores.size();
  if (levels == 0) throw DataError("rating levels must be >= 1");
  if (n == 0) return {};
  if (n == 1) return {sorted_scores[0] == 0.0 ? std::size_t{1} : levels};

  std::vector<std::size_t> out(n);
  if (rule == TieRule::kDistinct) {
    std::vector<double> distinct;
    for (double v : sorted_scores) {
      if (distinct.empty() || distinct.back() != v) distinct.push_back(v);
    }
    const auto groups = group_of_position(distinct.size(), levels);
    std::size_t d = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (sorted_scores[i] != distinct[d]) ++d;
      out[i] = groups[d];
    }
    return out;
  }

  const auto groups = group_of_position(n, levels);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && sorted_scores[j] == sorted_scores[i]) ++j;
    std::size_t chosen = groups[i];
    if (rule == TieRule::kMajority) {
      std::map<std::size_t, std::size_t> count;
      for (std::size_t k = i; k < j; ++k) ++count[groups[k]];
      std::size_t best = 0;
      for (const auto& [g, c] : count) {  // ascending g, so ties go to the lower group
        if (c > best) {
          best = c;
          chosen = g;
        }
      }
    }
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(i),
              out.begin() + static_cast<std::ptrdiff_t>(j), chosen);
    i = j;
  }
  return out;
}

std::vector<ModelRating> assign_rating(const PartialOrder& po, std::size_t levels,
                                       Direction direction, TieRule rule) {
  const std::size_t n = po.entries.size();
  std::vector<double> asc(n);
  for (std::size_t i = 0; i < n; ++i) asc[i] = po.entries[i].score;
  const auto asc_ratings = split_ratings(asc, levels, rule);

  std::vector<std::size_t> best_first;
  if (direction == Direction::kLowerIsBetter) {
    best_first = asc_ratings;
  } else if (n == 1) {
    best_first = {levels + 1 - asc_ratings[0]};
  } else {
    // Split the descending sequence; position i ascending is n-1-i descending.
    std::vector<double> desc(asc.rbegin(), asc.rend());
    for (double& v : desc) v = -v;
    const auto r = split_ratings(desc, levels, rule);
    best_first.assign(r.rbegin(), r.rend());
  }

  std::vector<ModelRating> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = po.entries[i].score;
    std::size_t better = 0;
    for (const auto& e : po.entries) {
      if (direction == Direction::kLowerIsBetter ? e.score < s : e.score > s) ++better;
    }
    out[i] = {po.entries[i].model_id, s, better + 1, best_first[i], asc_ratings[i]};
  }
  return out;
}

std::vector<RatingRow> rate_scores(std::span<const RawScore> scores, const RatingOptions& options) {
  using Key = std::tuple<std::string, std::string, Perturbation>;  // metric, confounder, p
  std::map<Key, std::vector<ScoredModel>> cells;
  std::map<Key, std::set<std::string>> seen;
  for (const auto& s : scores) {
    const Key key{s.metric, s.confounder, s.perturbation};
    if (!seen[key].insert(s.model_id).second) {
      throw DataError("model '" + s.model_id + "' appears twice for " + s.metric + "/" +
                      std::string(to_string(s.perturbation)) + "/" + s.confounder);
    }
    cells[key].push_back({s.model_id, s.value});
  }
  std::vector<RatingRow> out;
  for (const auto& [key, entries] : cells) {
    const auto& [metric, confounder, p] = key;
    const Direction dir = options.direction.value_or(
        higher_is_better(metric) ? Direction::kHigherIsBetter : Direction::kLowerIsBetter);
    const auto po = create_partial_order(entries, p);
    for (const auto& r : assign_rating(po, options.levels, dir, options.rule)) {
      out.push_back({metric, p, confounder, r.model_id, r.score, r.rank, r.rating, r.ascending_rating});
    }
  }
  return out;
}

}  // namespace tsrate
