#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "golden.hpp"
#include "oracles.hpp"
#include "tsrate/errors.hpp"
#include "tsrate/rating.hpp"
#include "tsrate/scores_io.hpp"

using namespace tsrate;

namespace {

std::vector<std::size_t> asc_ratings(const std::vector<double>& scores, std::size_t levels = 3,
                                     TieRule rule = TieRule::kDistinct) {
  std::vector<ScoredModel> s;
  for (std::size_t i = 0; i < scores.size(); ++i) s.push_back({"m" + std::to_string(100 + i), scores[i]});
  const auto po = create_partial_order(s, Perturbation::P0);
  std::vector<std::size_t> out;
  for (const auto& r : assign_rating(po, levels, Direction::kLowerIsBetter, rule)) out.push_back(r.rating);
  return out;
}

std::vector<double> repeat(std::initializer_list<std::pair<double, int>> blocks) {
  std::vector<double> out;
  for (auto [v, n] : blocks) out.insert(out.end(), static_cast<std::size_t>(n), v);
  return out;
}

}  // namespace

TEST_CASE("array_split") {
  CHECK(array_split(11, 3) == std::vector<std::size_t>{4, 4, 3});
  CHECK(array_split(2, 4) == std::vector<std::size_t>{1, 1, 0, 0});
  CHECK(array_split(5, 1) == std::vector<std::size_t>{5});
  CHECK_THROWS_AS(array_split(3, 0), DataError);
}

TEST_CASE("partial order") {
  std::vector<ScoredModel> s{{"b", 2}, {"a", 2}, {"c", 1}};
  const auto po = create_partial_order(s, Perturbation::P2);
  CHECK(po.entries[0].model_id == "c");
  CHECK(po.entries[1].model_id == "a");
  CHECK(po.entries[2].model_id == "b");
  std::reverse(s.begin(), s.end());
  const auto again = create_partial_order(s, Perturbation::P2);
  for (std::size_t i = 0; i < 3; ++i) CHECK(again.entries[i].model_id == po.entries[i].model_id);
  CHECK(create_partial_order(std::vector<ScoredModel>{{"x", 1}}, Perturbation::P0).entries.size() == 1);
}

TEST_CASE("rating examples") {
  CHECK(asc_ratings(repeat({{4.6, 4}, {5.9, 4}, {6.9, 3}})) ==
        std::vector<std::size_t>{1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3});
  CHECK(asc_ratings(repeat({{2.6, 1}, {4.6, 4}, {5.9, 2}, {6.9, 4}})) ==
        std::vector<std::size_t>{1, 1, 1, 1, 1, 2, 2, 3, 3, 3, 3});
  CHECK(asc_ratings({5.02, 5.42, 8.84, 10.86, 14.52, 19.25, 24.44, 25.11, 42.84, 51.0, 87.51}) ==
        std::vector<std::size_t>{1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3});
  CHECK(asc_ratings({0.0}) == std::vector<std::size_t>{1});
  CHECK(asc_ratings({7.0}) == std::vector<std::size_t>{3});
  CHECK(asc_ratings({7.0}, 5) == std::vector<std::size_t>{5});
}

TEST_CASE("tie rules differ only where ties straddle a boundary") {
  const auto s = repeat({{1, 3}, {2, 1}, {3, 2}});  // six items, ties at 1 and 3
  CHECK(asc_ratings(s, 3, TieRule::kFirst) == std::vector<std::size_t>{1, 1, 1, 2, 3, 3});
  CHECK(asc_ratings(s, 3, TieRule::kMajority) == std::vector<std::size_t>{1, 1, 1, 2, 3, 3});
  const auto straddle = repeat({{1, 1}, {2, 3}, {3, 2}});
  CHECK(asc_ratings(straddle, 3, TieRule::kFirst) == std::vector<std::size_t>{1, 1, 1, 1, 3, 3});
  CHECK(asc_ratings(straddle, 3, TieRule::kMajority) == std::vector<std::size_t>{1, 2, 2, 2, 3, 3});
  CHECK(asc_ratings(straddle, 3, TieRule::kDistinct) == std::vector<std::size_t>{1, 2, 2, 2, 3, 3});
  CHECK(parse_tie_rule("majority") == TieRule::kMajority);
  CHECK(to_string(TieRule::kDistinct) == "distinct");
  CHECK_THROWS_AS(parse_tie_rule("median"), DataError);
}

TEST_CASE("rating properties") {
  oracle::Rng rng(51);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(15);
    const std::size_t levels = 1 + rng.below(5);
    std::vector<double> s(n);
    for (auto& v : s) v = static_cast<double>(rng.below(6));
    std::sort(s.begin(), s.end());
    for (auto rule : {TieRule::kDistinct, TieRule::kMajority, TieRule::kFirst}) {
      const auto r = asc_ratings(s, levels, rule);
      for (std::size_t i = 1; i < n; ++i) {
        CHECK(r[i - 1] <= r[i]);
        if (s[i] == s[i - 1]) CHECK(r[i] == r[i - 1]);
      }
      for (auto x : r) {
        CHECK(x >= 1);
        CHECK(x <= levels);
      }
      // strictly monotone transform keeps ratings; a lone model is rated on
      // whether its score is zero, so it is left out
      if (n == 1) continue;
      std::vector<double> t(s);
      for (auto& v : t) v = std::exp(0.3 * v) - 4;
      CHECK(asc_ratings(t, levels, rule) == r);
    }
  }
}

TEST_CASE("tie-free lists reproduce plain array_split") {
  oracle::Rng rng(52);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(20);
    const std::size_t levels = 1 + rng.below(6);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<double>(i) + rng.uniform() * 0.5;
    std::vector<std::size_t> expect;
    const auto sizes = array_split(n, levels);
    for (std::size_t g = 0; g < sizes.size(); ++g) expect.insert(expect.end(), sizes[g], g + 1);
    for (auto rule : {TieRule::kDistinct, TieRule::kMajority, TieRule::kFirst})
      CHECK(asc_ratings(s, levels, rule) == expect);
  }
}

TEST_CASE("higher-is-better ratings") {
  std::vector<ScoredModel> s{{"a", 40.7}, {"b", 45.1}, {"c", 47.7}, {"d", 60.1}, {"e", 62.6}};
  const auto po = create_partial_order(s, Perturbation::P0);
  const auto r = assign_rating(po, 3, Direction::kHigherIsBetter);
  CHECK(r.front().model_id == "a");
  CHECK(r.front().rating == 3);
  CHECK(r.back().rating == 1);
  CHECK(r.back().rank == 1);
  CHECK(r.front().rank == 5);
  CHECK(r.front().ascending_rating == 1);
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i].rating <= r[i - 1].rating);

  std::vector<ScoredModel> tied{{"a", 50}, {"b", 50}, {"c", 51}};
  const auto rt = assign_rating(create_partial_order(tied, Perturbation::P0), 3, Direction::kHigherIsBetter);
  CHECK(rt[0].rating == rt[1].rating);

  const auto single = assign_rating(create_partial_order(std::vector<ScoredModel>{{"x", 7}}, Perturbation::P0), 3,
                                    Direction::kHigherIsBetter);
  CHECK(single[0].rating == 1);
  CHECK(single[0].ascending_rating == 3);
}

TEST_CASE("rate_scores keys cells and rejects duplicates") {
  const std::vector<RawScore> scores{{"SMAPE", "a", Perturbation::P0, "none", 0.1},
                                     {"SMAPE", "b", Perturbation::P0, "none", 0.2},
                                     {"SMAPE", "a", Perturbation::P1, "none", 0.3},
                                     {"SIGN_ACC", "a", Perturbation::P0, "none", 60},
                                     {"SIGN_ACC", "b", Perturbation::P0, "none", 40}};
  const auto rows = rate_scores(scores, {});
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].metric == "SIGN_ACC");
  CHECK(rows[0].model_id == "b");
  CHECK(rows[0].rating == 2);
  const auto forced = rate_scores(scores, {3, TieRule::kDistinct, Direction::kLowerIsBetter});
  CHECK(forced[0].rating == 1);
  CHECK(rows.back().perturbation == Perturbation::P1);

  auto dup = scores;
  dup.push_back({"SMAPE", "a", Perturbation::P0, "none", 0.5});
  CHECK_THROWS_AS(rate_scores(dup, {}), DataError);
}

TEST_CASE("raw score CSV parsing") {
  const auto s = parse_raw_scores("metric,model_id,perturbation,confounder,value\nWRS_I,S_a,P0,industry,inf\n", "x");
  REQUIRE(s.size() == 1);
  CHECK(std::isinf(s[0].value));
  try {
    parse_raw_scores("metric,model_id,perturbation,confounder,value\nWRS_I,S_a,P0,none,1\nWRS_I,S_b,P9,none,1\n", "f");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_raw_scores("metric,model,value\n", "f"), DataError);
  const auto round = parse_raw_scores(format_raw_scores(s), "y");
  CHECK(round[0].model_id == "S_a");
}

TEST_CASE("golden rows") {
  const auto file = golden::load(oracle::data_dir() / "golden_ratings.txt");
  const auto rows = rate_scores(parse_raw_scores(golden::consistent_scores_csv(file), "golden"), {3});
  std::size_t consistent = 0, matched = 0;
  for (const auto& g : file.rows) {
    if (!g.consistent()) continue;
    ++consistent;
    bool ok = true;
    for (const auto& [model, rating] : g.rating_map()) {
      const auto it = std::find_if(rows.begin(), rows.end(), [&](const RatingRow& r) {
        return r.metric == g.metric && std::string(to_string(r.perturbation)) == g.perturbation &&
               r.model_id == model;
      });
      REQUIRE(it != rows.end());
      ok = ok && it->ascending_rating == rating;
    }
    if (ok) {
      ++matched;
    } else {
      INFO(g.key());
      CHECK(file.annotations.count(g.key()) == 1);
    }
  }
  CHECK(consistent == 56);
  CHECK(static_cast<double>(matched) >= 0.9 * static_cast<double>(consistent));
}
