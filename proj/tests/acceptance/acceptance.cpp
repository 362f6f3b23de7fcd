// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Tolerances are fixed here, not tuned
// per run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "golden.hpp"
#include "oracles.hpp"
#include "tsrate/commands.hpp"
#include "tsrate/imaging.hpp"
#include "tsrate/metrics.hpp"
#include "tsrate/perturb.hpp"
#include "tsrate/pipeline.hpp"
#include "tsrate/stats.hpp"

using namespace tsrate;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failures; the first few are kept for the report line.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  Outcome outcome(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    return {false, std::to_string(failures_) + "/" + std::to_string(checks_) + " checks failed: " + notes_};
  }

 private:
  std::size_t checks_ = 0;
  std::size_t failures_ = 0;
  std::string notes_;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

// 1. Golden rating reproduction through the rate command.
Outcome golden_ratings() {
  const auto file = golden::load(oracle::data_dir() / "golden_ratings.txt");
  const auto dir = oracle::temp_dir("acc_golden");
  std::ofstream(dir / "scores.csv") << golden::consistent_scores_csv(file);

  const auto t0 = std::chrono::steady_clock::now();
  app::RateOptions opts;
  opts.scores = dir / "scores.csv";
  opts.levels = 3;
  std::ostringstream out, err;
  const int rc = app::cmd_rate(opts, out, err);
  std::map<std::string, std::map<std::string, std::size_t>> got;  // METRIC|P -> model -> ascending rating
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    const auto f = split_csv(line);
    if (f.size() != 8) continue;
    got[f[0] + "|" + f[1]][f[3]] = std::stoul(f[7]);
  }
  const double elapsed = seconds_since(t0);
  if (rc != 0) return {false, "rate exited " + std::to_string(rc) + ": " + err.str()};

  std::size_t consistent = 0, matched = 0;
  std::vector<std::string> mismatched, unexplained;
  for (const auto& row : file.rows) {
    if (!row.consistent()) continue;
    ++consistent;
    if (got[row.key()] == row.rating_map()) {
      ++matched;
    } else {
      mismatched.push_back(row.key());
      if (!file.annotations.count(row.key())) unexplained.push_back(row.key());
    }
  }
  std::vector<std::string> missing_must;
  for (const auto& key : golden::must_pass()) {
    if (std::find(mismatched.begin(), mismatched.end(), key) != mismatched.end() || !got.count(key)) {
      missing_must.push_back(key);
    }
  }
  const double rate = consistent ? static_cast<double>(matched) / static_cast<double>(consistent) : 0.0;
  std::string detail = std::to_string(matched) + "/" + std::to_string(consistent) + " consistent rows (" +
                       fmt(100 * rate) + "%), must-pass " +
                       std::to_string(golden::must_pass().size() - missing_must.size()) + "/" +
                       std::to_string(golden::must_pass().size()) + ", annotated mismatches:";
  for (const auto& k : mismatched) detail += " " + k;
  detail += ", " + fmt(elapsed) + " s";
  bool pass = rate >= 0.9 && missing_must.empty() && unexplained.empty() && elapsed < 1.0;
  if (!unexplained.empty()) detail += ", UNANNOTATED: " + unexplained.front();
  return {pass, detail};
}

// 2. SMAPE, MASE and sign accuracy.
Outcome metric_units() {
  Checker c;
  constexpr double tol = 1e-9;
  c.expect(std::abs(smape(std::vector<double>{5, 6}, std::vector<double>{5, 6})) <= tol, "SMAPE identity");
  c.expect(std::abs(smape(std::vector<double>{1}, std::vector<double>{3}) - 1.0) <= tol, "SMAPE [1] vs [3]");
  c.expect(std::abs(smape(std::vector<double>{100, 100}, std::vector<double>{110, 90}) -
                    (10.0 / 105 + 10.0 / 95) / 2) <= tol,
           "SMAPE two-term");
  const std::vector<double> train{0, 1, 2, 3, 4};
  c.expect(std::abs(mase(train, std::vector<double>{5, 6}, std::vector<double>{5, 6})) <= tol, "MASE identity");
  c.expect(std::abs(mase(train, std::vector<double>{5, 6, 7}, std::vector<double>{4.5, 6.5, 7.5}) - 0.5) <= tol,
           "MASE 0.5");
  const std::vector<double> t{1, 0, 1};
  c.expect(std::abs(sign_accuracy(t, t, 0) - 1.0) <= tol, "sign identity");
  std::vector<double> shifted{106, 104, 109, 109, 102};
  c.expect(std::abs(sign_accuracy(std::vector<double>{105, 103, 108, 108, 101}, shifted, 100) - 1.0) <= tol,
           "sign shifted");
  c.expect(std::abs(sign_accuracy(t, std::vector<double>{1, 2, 3}, 0) - 2.0 / 3) <= tol, "sign 2/3");

  oracle::Rng rng(2024);
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> a(1 + rng.below(40)), b(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      a[k] = rng.below(8) == 0 ? 0.0 : rng.normal() * std::pow(10.0, static_cast<double>(rng.below(16)) - 8);
      b[k] = rng.below(8) == 0 ? 0.0 : rng.normal() * std::pow(10.0, static_cast<double>(rng.below(16)) - 8);
    }
    const double s = smape(a, b);
    c.expect(s >= 0.0 && s <= 2.0, "SMAPE out of [0,2]: " + fmt(s));
  }
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> tr(80), tt(20), pp(20);
    for (auto& v : tr) v = 100 + 10 * rng.normal();
    for (auto& v : tt) v = 100 + 10 * rng.normal();
    for (auto& v : pp) v = 100 + 10 * rng.normal();
    const double base = mase(tr, tt, pp);
    const double k = std::pow(10.0, 8 * rng.uniform() - 4);
    for (auto* vec : {&tr, &tt, &pp})
      for (auto& v : *vec) v *= k;
    const double rel = std::abs(mase(tr, tt, pp) - base) / base;
    worst = std::max(worst, rel);
    c.expect(rel <= tol, "MASE scale invariance " + fmt(rel));
  }
  return c.outcome("8 hand examples, 10^4 SMAPE fuzz vectors in [0,2], MASE scale drift " + fmt(worst));
}

// 3. APE against the rational exact-matching oracle, plus the confounded instance.
Outcome causal_oracle() {
  Checker c;
  oracle::Rng rng(303);
  std::size_t instances = 0;
  double worst = 0;
  while (instances < 2000) {
    const std::size_t n = 2 + rng.below(29);
    std::vector<oracle::CatRow> rows;
    std::vector<TreatedRow> tr;
    for (std::size_t i = 0; i < n; ++i) {
      const oracle::CatRow r{static_cast<int>(rng.below(4)), rng.uniform() < 0.45,
                             static_cast<long long>(rng.below(201)) - 100};
      rows.push_back(r);
      tr.push_back({std::string(1, static_cast<char>('a' + r.category)),
                    r.treated ? Perturbation::P2 : Perturbation::P0, static_cast<double>(r.outcome)});
    }
    const auto [num, den] = oracle::exact_att(rows);
    if (den == 0) continue;
    ++instances;
    const double expect = std::abs(static_cast<double>(num) / static_cast<double>(den));
    try {
      const double got = ape(tr, Perturbation::P2).ape_m;
      worst = std::max(worst, std::abs(got - expect));
      c.expect(std::abs(got - expect) <= 1e-12, "instance " + std::to_string(instances) + ": " + fmt(got) +
                                                    " vs " + fmt(expect));
    } catch (const std::exception& e) {
      c.expect(false, std::string("instance threw: ") + e.what());
    }
  }

  // category A: 12 treated / 4 controls at R=10; B: 3 treated / 11 controls at R=2; no effect
  std::vector<TreatedRow> conf;
  for (int i = 0; i < 16; ++i) conf.push_back({"A", i < 12 ? Perturbation::P1 : Perturbation::P0, 10.0});
  for (int i = 0; i < 14; ++i) conf.push_back({"B", i < 3 ? Perturbation::P1 : Perturbation::P0, 2.0});
  const auto r = ape(conf, Perturbation::P1);
  const double ape_o = (12 * 10.0 + 3 * 2.0) / 15 - (4 * 10.0 + 11 * 2.0) / 15;
  c.expect(std::abs(r.ape_m) <= 1e-6, "confounded APE_m " + fmt(r.ape_m));
  c.expect(std::abs(r.ape_o - ape_o) <= 1e-6, "confounded APE_o " + fmt(r.ape_o));
  c.expect(std::abs(r.pie_percent - 100 * r.ape_o) <= 1e-6, "confounded PIE " + fmt(r.pie_percent));
  return c.outcome(std::to_string(instances) + " instances <= 30 rows, max |diff| " + fmt(worst) +
                   "; confounded APE_o " + fmt(r.ape_o) + ", APE_m " + fmt(r.ape_m) + ", PIE% " +
                   fmt(r.pie_percent));
}

// 4. PIE% under independent assignment, seeds 1..20.
Outcome deconfounding() {
  const double baseline[] = {2.0, 2.5, 3.0};
  int below = 0;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    oracle::Rng rng(seed);
    std::vector<TreatedRow> rows;
    rows.reserve(10000);
    for (int i = 0; i < 10000; ++i) {
      const auto cat = rng.below(3);
      const bool treated = rng.uniform() < 0.5;
      const double y = baseline[cat] + rng.normal() + (treated ? 1.0 : 0.0);
      rows.push_back({std::string(1, static_cast<char>('a' + cat)), treated ? Perturbation::P3 : Perturbation::P0, y});
    }
    const double pie = ape(rows, Perturbation::P3).pie_percent;
    worst = std::max(worst, pie);
    below += pie < 5.0;
  }
  return {below >= 19, std::to_string(below) + "/20 seeds with PIE% < 5 (worst " + fmt(worst) + ")"};
}

// 5. t statistics, critical values and WRS anchors.
Outcome stats_kernels() {
  Checker c;
  const std::vector<double> a{1, 2, 3}, b{2, 3, 4};
  c.expect(std::abs(students_t(a, b).t + std::sqrt(1.5)) <= 1e-9, "t([1,2,3],[2,3,4])");
  oracle::Rng rng(55);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(3), y(3);
    for (auto& v : x) v = 10 * rng.normal();
    for (auto& v : y) v = 10 * rng.normal();
    const double want = oracle::pooled_t(x, y);
    c.expect(std::abs(students_t(x, y).t - want) <= 1e-9 * std::max(1.0, std::abs(want)), "3-element t");
  }
  double worst = 0;
  for (int dof = 1; dof <= 200; ++dof) {
    for (double ci : {95.0, 75.0, 60.0}) {
      const double d = std::abs(t_critical(ci, dof) - oracle::t_critical(ci, dof));
      worst = std::max(worst, d);
      c.expect(d <= 1e-3, "t_critical(" + fmt(ci) + ", " + std::to_string(dof) + ") off by " + fmt(d));
    }
  }
  std::vector<NamedSample> same{{"x", {4, 5, 6, 7}}, {"y", {4, 5, 6, 7}}, {"z", {4, 5, 6, 7}}};
  const double w0 = wrs(same).value;
  c.expect(w0 == 0.0, "identical groups WRS " + fmt(w0));
  std::vector<NamedSample> apart{{"x", {1, 2, 3}}, {"y", {1001, 1002, 1003}}};
  const double w1 = wrs(apart).value;
  c.expect(w1 == 2.4, "separated pair WRS " + fmt(w1));
  return c.outcome("3-element t to 1e-9, t_critical dof 1..200 max diff " + fmt(worst) + ", WRS " + fmt(w0) +
                   " / " + fmt(w1));
}

// 6. Perturbation contracts, image checks on real pipeline inputs.
Outcome perturbation_contracts() {
  Checker c;
  oracle::Rng rng(66);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t len = 1 + rng.below(200);
    const std::size_t n = 1 + rng.below(len + 10);
    std::vector<double> v(len);
    for (auto& x : v) x = 1 + rng.uniform();
    const auto z = drop_to_zero(v, n);
    const auto h = halve(v, n);
    const auto m = missing(v, n);
    std::size_t dz = 0, dh = 0;
    for (std::size_t k = 0; k < len; ++k) {
      dz += z[k] != v[k];
      dh += h[k] != v[k];
    }
    c.expect(dz == len / n && dh == len / n && count_missing(m) == len / n, "P1-P3 count");
  }

  auto cfg = app::load_config(oracle::data_dir() / "fixture" / "run.json");
  const auto artifacts_windows = [&] {
    std::vector<EvalWindow> all;
    for (const auto& s : load_dataset(cfg.dataset).series) {
      auto w = slide_windows(s, cfg.n, cfg.d, 37);
      all.insert(all.end(), w.begin(), w.end());
    }
    return all;
  }();
  std::size_t images = 0;
  double worst_h = 0, worst_v = 0;
  const SlopeSignSentiment provider;
  for (const auto& w : artifacts_windows) {
    const auto spec = spectrogram_image(w.history);
    c.expect(spec.width() == 128 && spec.height() == 128, "spectrogram size");
    bool stripe_ok = true;
    for (std::size_t x = 0; x < 128; ++x) {
      const auto top = spec.at(x, 0);
      stripe_ok = stripe_ok && top[0] == top[1] && top[1] == top[2];
      for (std::size_t y = 1; y < 16; ++y) stripe_ok = stripe_ok && spec.at(x, y) == top;
    }
    c.expect(stripe_ok, "16-row stripe in " + w.window_id);
    c.expect(diff_count(spec, pixel_center_black(spec)) == 1, "P4 pixel count in " + w.window_id);

    const auto plot = render_lineplot(w.history);
    const auto p6 = overlay_stripe(plot, sentiment_stripe(plot, w.history, provider));
    for (const RgbImage* img : {&spec, &plot, &p6}) {
      const auto out = saturation_scale(*img, cfg.saturation_factor);
      ++images;
      for (std::size_t y = 0; y < img->height(); ++y) {
        for (std::size_t x = 0; x < img->width(); ++x) {
          const auto p = img->at(x, y);
          const auto q = out.at(x, y);
          const auto hp = oracle::rgb_to_hsv(p[0], p[1], p[2]);
          const auto hq = oracle::rgb_to_hsv(q[0], q[1], q[2]);
          worst_v = std::max(worst_v, std::abs(hp[2] - hq[2]));
          if (hp[1] == 0.0) {
            c.expect(p == q, "gray pixel changed");
            continue;
          }
          double dh = std::abs(hp[0] - hq[0]);
          dh = std::min(dh, 1.0 - dh);
          worst_h = std::max(worst_h, dh);
        }
      }
    }
  }
  c.expect(worst_h <= 1.0 / 255, "P5 hue drift " + fmt(worst_h));
  c.expect(worst_v <= 1.0 / 255, "P5 value drift " + fmt(worst_v));
  return c.outcome("P1-P3 counts on 2000 series; " + std::to_string(artifacts_windows.size()) +
                   " fixture windows: 128x128 with 16-row stripe, P4 one pixel; P5 on " + std::to_string(images) +
                   " images: hue drift " + fmt(worst_h) + ", value drift " + fmt(worst_v));
}

// 7. Morlet value and sinusoid ridge.
Outcome wavelet() {
  Checker c;
  const auto m = morlet(0, 1, 5);
  c.expect(std::abs(m - std::complex<double>(std::pow(std::numbers::pi, -0.25), 0)) <= 1e-12, "morlet(0,1,5)");
  const auto scales = default_scales(80);
  std::string ridges;
  for (double period : {3.0, 5.0, 8.0, 13.0, 21.0}) {
    std::vector<double> x(80);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::cos(2 * std::numbers::pi * static_cast<double>(i) / period);
    const auto lib = cwt(x, scales).magnitudes;
    const auto ref = oracle::brute_cwt(x, scales, kDefaultOmega0);
    double diff = 0;
    for (std::size_t r = 0; r < scales.size(); ++r)
      for (std::size_t t = 0; t < x.size(); ++t) diff = std::max(diff, std::abs(lib[r][t] - ref[r][t]));
    c.expect(diff <= 1e-9, "cwt vs brute force " + fmt(diff));
    const std::size_t mid = x.size() / 2;
    std::size_t peak = 0, ref_peak = 0;
    for (std::size_t r = 1; r < scales.size(); ++r) {
      if (lib[r][mid] > lib[peak][mid]) peak = r;
      if (ref[r][mid] > ref[ref_peak][mid]) ref_peak = r;
    }
    const double expected = scale_for_period(period);
    std::size_t nearest = 0;
    for (std::size_t r = 1; r < scales.size(); ++r)
      if (std::abs(std::log(scales[r] / expected)) < std::abs(std::log(scales[nearest] / expected))) nearest = r;
    const auto gap = peak > nearest ? peak - nearest : nearest - peak;
    c.expect(peak == ref_peak, "library and oracle ridges differ");
    c.expect(gap <= 1, "ridge at row " + std::to_string(peak) + ", expected " + std::to_string(nearest));
    ridges += " " + std::to_string(peak) + "/" + std::to_string(nearest);
  }
  return c.outcome("morlet(0,1,5) = pi^-1/4; ridge row / expected row:" + ridges);
}

// 8. Fixture pipeline twice, byte-identical outputs.
Outcome end_to_end() {
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  const auto dir = oracle::temp_dir("acc_e2e");
  const auto config = oracle::data_dir() / "fixture" / "run.json";
  double slowest = 0;
  for (const char* sub : {"a", "b"}) {
    app::RunOptions o;
    o.output_dir = dir / sub;
    std::ostringstream out, err;
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = app::cmd_run(config, o, out, err);
    slowest = std::max(slowest, seconds_since(t0));
    if (rc != 0) return {false, std::string("run ") + sub + " exited " + std::to_string(rc) + ": " + err.str()};
  }
  const auto tree = [](const std::filesystem::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
      if (!e.is_regular_file()) continue;
      std::ifstream in(e.path(), std::ios::binary);
      files[std::filesystem::relative(e.path(), root).generic_string()] =
          std::string(std::istreambuf_iterator<char>(in), {});
    }
    return files;
  };
  const auto a = tree(dir / "a");
  const auto b = tree(dir / "b");
  std::size_t bytes = 0;
  for (const auto& [name, content] : a) bytes += content.size();
  const bool same = a == b;
  std::string differing;
  if (!same) {
    for (const auto& [name, content] : a)
      if (!b.count(name) || b.at(name) != content) differing += " " + name;
  }
  return {same && slowest < 60.0 && !a.empty(),
          std::to_string(a.size()) + " files, " + std::to_string(bytes) + " bytes, " +
              (same ? "identical" : "DIFFER:" + differing) + ", slowest run " + fmt(slowest) + " s"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"golden rating reproduction", golden_ratings},
      {"metric unit suite", metric_units},
      {"causal oracle equivalence", causal_oracle},
      {"de-confounding property", deconfounding},
      {"statistics kernels", stats_kernels},
      {"perturbation contracts", perturbation_contracts},
      {"wavelet check", wavelet},
      {"end-to-end determinism", end_to_end},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
