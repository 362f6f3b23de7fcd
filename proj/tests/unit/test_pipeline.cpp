#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "oracles.hpp"
#include "tsrate/commands.hpp"
#include "tsrate/png_io.hpp"
#include "tsrate/pipeline.hpp"

using namespace tsrate;
using namespace tsrate::app;

namespace {

std::filesystem::path fixture_config() { return oracle::data_dir() / "fixture" / "run.json"; }

std::map<std::string, std::string> read_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[std::filesystem::relative(e.path(), root).generic_string()] =
        std::string(std::istreambuf_iterator<char>(in), {});
  }
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// A config in `dir` over one synthetic company with `rows` business days.
std::filesystem::path small_config(const std::filesystem::path& dir, std::size_t rows,
                                   const nlohmann::json& perturbations) {
  std::ofstream csv(dir / "X.csv");
  csv << "Date,Close\n";
  for (std::size_t i = 0; i < rows; ++i) {
    csv << "2024-" << (i / 28 + 1 < 10 ? "0" : "") << i / 28 + 1 << '-' << (i % 28 + 1 < 10 ? "0" : "")
        << i % 28 + 1 << ',' << 100 + 5 * std::sin(0.3 * static_cast<double>(i)) << '\n';
  }
  nlohmann::json j = {{"schema_version", 1},
                      {"dataset", {{"entries", {{{"path", "X.csv"}, {"company", "X"}, {"industry", "x"}}}}}},
                      {"perturbations", {{"set", perturbations}}},
                      {"models", {{{"id", "S_a"}, {"kind", "ar"}}}},
                      {"output_dir", "out"},
                      {"seed", 1}};
  std::ofstream(dir / "run.json") << j.dump(2);
  return dir / "run.json";
}

}  // namespace

TEST_CASE("fixture pipeline in memory") {
  auto cfg = load_config(fixture_config());
  const auto a = compute_run(cfg);
  CHECK(a.windows.size() == 6 * (262 - 100 + 1));
  CHECK(a.predictions.size() == a.windows.size() * 3 * 4);
  CHECK(a.completed_stages.size() == 5);
  CHECK_FALSE(a.raw_scores.empty());
  CHECK(a.ratings.size() == a.raw_scores.size());
  for (const auto& s : a.raw_scores) CHECK(std::isfinite(s.value));

  cfg.jobs = 4;
  const auto b = compute_run(cfg);
  REQUIRE(a.raw_scores.size() == b.raw_scores.size());
  for (std::size_t i = 0; i < a.raw_scores.size(); ++i) {
    CHECK(a.raw_scores[i].metric == b.raw_scores[i].metric);
    CHECK(a.raw_scores[i].value == b.raw_scores[i].value);
  }

  // S_b is exact on META, so its SMAPE sits below S_r's everywhere
  const auto find = [&](std::string_view metric, std::string_view model, Perturbation p) {
    for (const auto& s : a.raw_scores)
      if (s.metric == metric && s.model_id == model && s.perturbation == p) return s.value;
    FAIL("missing score");
    return 0.0;
  };
  CHECK(find("SIGN_ACC", "S_b", Perturbation::P0) > find("SIGN_ACC", "S_r", Perturbation::P0));
  CHECK(find("WRS_C", "S_b", Perturbation::P0) > 0.0);
}

TEST_CASE("run outputs are byte-identical across runs") {
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  const auto dir = oracle::temp_dir("determinism");
  std::ostringstream out, err;
  RunOptions o1;
  o1.output_dir = dir / "a";
  RunOptions o2 = o1;
  o2.output_dir = dir / "b";
  o2.jobs = 3;
  REQUIRE(cmd_run(fixture_config(), o1, out, err) == kExitOk);
  REQUIRE(cmd_run(fixture_config(), o2, out, err) == kExitOk);
  auto ta = read_tree(dir / "a");
  auto tb = read_tree(dir / "b");
  CHECK(ta.size() >= 10);
  CHECK(ta.count("manifest.json") == 1);
  CHECK(ta.count("ratings.json") == 1);
  // jobs is recorded in the manifest, everything else must match
  ta.erase("manifest.json");
  tb.erase("manifest.json");
  CHECK(ta == tb);

  const auto manifest = nlohmann::json::parse(read_file(dir / "a" / "manifest.json"));
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["created_at"] == "2023-11-14T22:13:20Z");
  CHECK(manifest["config_sha256"] == sha256_hex(read_file(fixture_config())));
  CHECK(manifest["seed"] == 7);
  ::unsetenv("SOURCE_DATE_EPOCH");
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("validate command") {
  std::ostringstream out, err;
  CHECK(cmd_validate(fixture_config(), {}, out, err) == kExitOk);
  CHECK(out.str() == "OK\n");

  RunOptions zero;
  zero.levels = 0;
  std::ostringstream out2, err2;
  CHECK(cmd_validate(fixture_config(), zero, out2, err2) == kExitConfig);
  CHECK(err2.str().find("levels") != std::string::npos);

  std::ostringstream out3, err3;
  CHECK(cmd_validate(oracle::data_dir() / "nope.json", {}, out3, err3) == kExitConfig);
}

TEST_CASE("stage failures are reported with the stage name") {
  const auto dir = oracle::temp_dir("stagefail");
  auto j = nlohmann::json::parse(read_file(fixture_config()));
  for (auto& e : j["dataset"]["entries"]) e["path"] = (oracle::data_dir() / "fixture" / e["path"].get<std::string>()).string();
  std::ofstream(dir / "ext.csv") << "window_id,model_id,perturbation,v1\nMETA-00000,ext,P0,1\n";
  j["models"].push_back({{"id", "ext"}, {"kind", "external"}, {"predictions", "ext.csv"}});
  std::ofstream(dir / "run.json") << j.dump();
  std::ostringstream out, err;
  CHECK(cmd_run(dir / "run.json", {}, out, err) == kExitStage);
  CHECK(err.str().find("forecast") != std::string::npos);
  const auto manifest = nlohmann::json::parse(read_file(dir / "out" / "manifest.json"));
  CHECK(manifest["status"] == "failed");
  CHECK(manifest["failed_stage"] == "forecast");
}

TEST_CASE("rate command") {
  const auto dir = oracle::temp_dir("rate");
  std::ofstream(dir / "zero.csv") << "metric,model_id,perturbation,confounder,value\nSMAPE,M,P0,none,0\n";
  std::ofstream(dir / "seven.csv") << "metric,model_id,perturbation,confounder,value\nSMAPE,M,P0,none,7\n";
  std::ofstream(dir / "bad.csv") << "metric,model_id,perturbation,confounder,value\nSMAPE,M,P0,none\n";

  const auto rating_of = [&](const std::string& file, std::size_t levels) {
    RateOptions o;
    o.scores = dir / file;
    o.levels = levels;
    std::ostringstream out, err;
    REQUIRE(cmd_rate(o, out, err) == kExitOk);
    std::istringstream lines(out.str());
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    // metric,perturbation,confounder,model_id,value,rank,rating,ascending_rating
    std::vector<std::string> f;
    std::stringstream ss(row);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    REQUIRE(f.size() == 8);
    return std::stoul(f[6]);
  };
  CHECK(rating_of("zero.csv", 3) == 1);
  CHECK(rating_of("seven.csv", 3) == 3);
  CHECK(rating_of("seven.csv", 5) == 5);

  RateOptions bad;
  bad.scores = dir / "bad.csv";
  std::ostringstream out, err;
  CHECK(cmd_rate(bad, out, err) == kExitConfig);
  CHECK(err.str().find("2") != std::string::npos);

  RateOptions to_dir;
  to_dir.scores = dir / "seven.csv";
  to_dir.output_dir = dir / "ratings";
  CHECK(cmd_rate(to_dir, out, err) == kExitOk);
  CHECK(std::filesystem::exists(dir / "ratings" / "ratings.csv"));
  CHECK(std::filesystem::exists(dir / "ratings" / "ratings.json"));
}

TEST_CASE("images command") {
  const auto dir = oracle::temp_dir("images");
  const auto cfg = small_config(dir, 100, {"P0", "P4", "P5"});
  std::ostringstream out, err;
  REQUIRE(cmd_images(cfg, {}, out, err) == kExitOk);
  const auto tree = read_tree(dir / "out" / "images");
  CHECK(tree.size() == 4);
  const auto p0 = read_png(dir / "out" / "images" / "spectrogram" / "X-00000_P0.png");
  const auto p4 = read_png(dir / "out" / "images" / "spectrogram" / "X-00000_P4.png");
  const auto p5 = read_png(dir / "out" / "images" / "spectrogram" / "X-00000_P5.png");
  CHECK(diff_count(p0, p4) == 1);
  CHECK(diff_count(p0, p5) > 0);
  for (const auto& [name, bytes] : tree) {
    const auto img = read_png(dir / "out" / "images" / name);
    CHECK(img.width() == 128);
    CHECK(img.height() == 128);
  }

  const auto dir2 = oracle::temp_dir("images6");
  const auto cfg2 = small_config(dir2, 101, {"P0", "P6"});
  REQUIRE(cmd_images(cfg2, {}, out, err) == kExitOk);
  CHECK(read_tree(dir2 / "out" / "images").size() == 2 * 3);
}
