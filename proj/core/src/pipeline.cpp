#include "tsrate/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <set>

#include "tsrate/csv.hpp"
#include "tsrate/errors.hpp"
#include "tsrate/forecast.hpp"
#include "tsrate/http_forecaster.hpp"
#include "tsrate/imaging.hpp"
#include "tsrate/ingest.hpp"
#include "tsrate/metrics.hpp"
#include "tsrate/parallel.hpp"
#include "tsrate/perturb.hpp"
#include "tsrate/png_io.hpp"
#include "tsrate/scores_io.hpp"
#include "tsrate/version.hpp"

namespace tsrate::app {

using ordered_json = nlohmann::ordered_json;

void apply_overrides(RunConfig& config, const RunOptions& options) {
  if (options.seed) config.seed = *options.seed;
  if (options.levels) {
    if (*options.levels < 1) throw ConfigInvalid(std::vector<ConfigIssue>{{"--l-levels", "must be >= 1"}});
    config.metrics.levels = *options.levels;
  }
  if (options.jobs) {
    if (*options.jobs < 1) throw ConfigInvalid(std::vector<ConfigIssue>{{"--jobs", "must be >= 1"}});
    config.jobs = *options.jobs;
  }
  if (options.output_dir) config.output_dir = *options.output_dir;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string timestamp_utc() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (end != epoch && *end == '\0') t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

// Where a window sits in the loaded dataset.
struct WindowSource {
  std::size_t series = 0;
  std::size_t offset = 0;
};

struct PreparedData {
  Dataset dataset;
  std::vector<EvalWindow> windows;
  std::vector<WindowSource> sources;
  // perturbed[series][perturbation] for P0..P3; image perturbations reuse P0.
  std::vector<std::map<Perturbation, MaskedSeries>> perturbed;
};

PreparedData prepare(const RunConfig& cfg) {
  PreparedData data;
  data.dataset = load_dataset(cfg.dataset);
  for (std::size_t s = 0; s < data.dataset.series.size(); ++s) {
    const auto& series = data.dataset.series[s];
    auto windows = slide_windows(series, cfg.n, cfg.d, cfg.stride);
    for (auto& w : windows) {
      data.sources.push_back({s, w.offset});
      data.windows.push_back(std::move(w));
    }
    std::map<Perturbation, MaskedSeries> per;
    for (auto p : {Perturbation::P0, Perturbation::P1, Perturbation::P2, Perturbation::P3}) {
      per[p] = apply_numeric(p, series.values, cfg.numeric);
    }
    data.perturbed.push_back(std::move(per));
  }
  return data;
}

MaskedSeries history_for(const PreparedData& data, std::size_t w, Perturbation p, std::size_t n) {
  const auto& src = data.sources[w];
  const auto key = is_numeric_perturbation(p) ? p : Perturbation::P0;
  const auto& full = data.perturbed[src.series].at(key);
  return {full.begin() + static_cast<std::ptrdiff_t>(src.offset),
          full.begin() + static_cast<std::ptrdiff_t>(src.offset + n)};
}

RgbImage image_for(const RunConfig& cfg, const EvalWindow& window, const MaskedSeries& history,
                   Perturbation p) {
  switch (p) {
    case Perturbation::P4: return pixel_center_black(spectrogram_image(window.history));
    case Perturbation::P5:
      return saturation_scale(spectrogram_image(window.history), cfg.saturation_factor);
    case Perturbation::P6: {
      const auto plot = render_lineplot(window.history);
      static const SlopeSignSentiment provider;
      return overlay_stripe(plot, sentiment_stripe(plot, window.history, provider));
    }
    default: return spectrogram_image(impute_locf(history));
  }
}

std::unique_ptr<Forecaster> make_forecaster(const RunConfig& cfg, const ModelConfig& m,
                                            const PreparedData& data, RunArtifacts& art) {
  switch (m.kind) {
    case ModelKind::kAr: return std::make_unique<ArBaseline>(m.id, m.ar_p, m.ar_d);
    case ModelKind::kBiased:
      return std::make_unique<BiasedSystem>(m.id, m.offsets, m.default_offset);
    case ModelKind::kRandom:
      return std::make_unique<RandomSystem>(m.id, company_ranges(data.dataset.series),
                                            m.seed.value_or(cfg.seed));
    case ModelKind::kExternal: {
      std::set<std::string, std::less<>> known;
      for (const auto& w : data.windows) known.insert(w.window_id);
      auto loaded = load_external_predictions(m.predictions, known, cfg.d);
      for (auto& r : loaded.rejects) art.rejects.push_back({m.id, std::move(r)});
      return std::make_unique<ExternalForecaster>(m.id, m.modality, loaded.records);
    }
    case ModelKind::kHttp:
      return std::make_unique<HttpForecaster>(m.id, m.modality, m.endpoint, m.prompt_template);
  }
  throw Error("unhandled model kind");
}

std::string_view confounder_name(std::string_view metric) {
  if (metric == metric_name::kWrsIndustry || metric == metric_name::kApeIndustry ||
      metric == metric_name::kPieIndustry) {
    return "industry";
  }
  if (metric == metric_name::kWrsCompany || metric == metric_name::kApeCompany ||
      metric == metric_name::kPieCompany) {
    return "company";
  }
  return "none";
}

const std::vector<std::string_view>& metric_order() {
  static const std::vector<std::string_view> order = {
      metric_name::kWrsIndustry, metric_name::kWrsCompany, metric_name::kApeIndustry,
      metric_name::kApeCompany,  metric_name::kPieIndustry, metric_name::kPieCompany,
      metric_name::kSmape,       metric_name::kMase,        metric_name::kSignAccuracy};
  return order;
}

class StageRunner {
 public:
  StageRunner(RunArtifacts& art, RunArtifacts* partial) : art_(art), partial_(partial) {}

  template <typename Fn>
  void operator()(const std::string& name, Fn&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      if (partial_) *partial_ = art_;
      throw StageError(name, e.what());
    }
    art_.completed_stages.push_back(name);
  }

 private:
  RunArtifacts& art_;
  RunArtifacts* partial_;
};

}  // namespace

RunArtifacts compute_run(const RunConfig& cfg, RunArtifacts* partial) {
  RunArtifacts art;
  StageRunner stage(art, partial);
  PreparedData data;

  stage("ingest", [&] {
    data = prepare(cfg);
    art.windows = data.windows;
    art.skipped_rows = data.dataset.skipped_rows;
    if (art.skipped_rows > 0) {
      art.warnings.push_back(std::to_string(art.skipped_rows) + " CSV row(s) with unparseable prices skipped");
    }
  });

  // Forecast slots: model-major, then perturbation, then window.
  struct Slot {
    std::size_t model;
    Perturbation p;
    std::size_t window;
  };
  std::vector<Slot> slots;
  std::map<std::pair<std::size_t, Perturbation>, std::size_t> slot_base;
  const std::size_t nw = data.windows.size();

  stage("forecast", [&] {
    std::vector<std::unique_ptr<Forecaster>> forecasters;
    for (const auto& m : cfg.models) forecasters.push_back(make_forecaster(cfg, m, data, art));
    for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
      for (auto p : cfg.models[mi].perturbations) {
        slot_base[{mi, p}] = slots.size();
        for (std::size_t w = 0; w < nw; ++w) slots.push_back({mi, p, w});
      }
    }
    std::vector<ForecastResult> results(slots.size());
    parallel_for(slots.size(), cfg.jobs, [&](std::size_t i) {
      const auto& s = slots[i];
      const auto& window = data.windows[s.window];
      const auto history = history_for(data, s.window, s.p, cfg.n);
      const auto& f = *forecasters[s.model];
      std::optional<RgbImage> image;
      if (f.modality() == Modality::kNumericImage) image = image_for(cfg, window, history, s.p);
      const ForecastRequest req{window, history, s.p, cfg.d, image ? &*image : nullptr};
      results[i] = f.predict(req);
      if (results[i].values.size() != cfg.d) {
        throw DataError(f.id() + " returned " + std::to_string(results[i].values.size()) +
                        " values for " + window.window_id + ", expected " + std::to_string(cfg.d));
      }
    });
    std::map<std::pair<std::size_t, std::string>, std::size_t> warned;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      for (const auto& w : results[i].warnings) ++warned[{slots[i].model, w}];
      art.predictions.push_back({data.windows[slots[i].window].window_id, cfg.models[slots[i].model].id,
                                 slots[i].p, std::move(results[i].values)});
    }
    for (const auto& [key, count] : warned) {
      art.warnings.push_back(cfg.models[key.first].id + ": " + key.second + " in " +
                             std::to_string(count) + " forecast(s)");
    }
    for (std::size_t mi = 0; mi < forecasters.size(); ++mi) {
      if (const auto* http = dynamic_cast<const HttpForecaster*>(forecasters[mi].get())) {
        auto entries = http->audit();
        std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
          return std::tie(a.window_id, a.perturbation, a.attempt) <
                 std::tie(b.window_id, b.perturbation, b.attempt);
        });
        for (auto& e : entries) art.http_audit.emplace_back(cfg.models[mi].id, std::move(e));
      }
    }
  });

  stage("residuals", [&] {
    for (std::size_t i = 0; i < art.predictions.size(); ++i) {
      art.residuals.push_back(residuals(art.predictions[i], data.windows[slots[i].window], cfg.metrics.rmax));
    }
    art.frame = build_causal_frame(art.residuals, index_labels(data.windows));
  });

  std::map<std::tuple<std::string_view, std::size_t, Perturbation>, double> scores;
  stage("metrics", [&] {
    for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
      const auto& m = cfg.models[mi];
      for (auto p : m.perturbations) {
        const std::size_t base = slot_base.at({mi, p});
        std::vector<std::string> companies;
        std::vector<double> sm;
        std::vector<double> sa;
        std::vector<std::string> mase_companies;
        std::vector<double> ms;
        std::size_t degenerate = 0;
        for (std::size_t w = 0; w < nw; ++w) {
          const auto& window = data.windows[w];
          const auto& pred = art.predictions[base + w].prediction;
          companies.push_back(window.company);
          sm.push_back(smape(window.truth, pred));
          sa.push_back(100.0 * sign_accuracy(window.truth, pred, window.history.back()));
          try {
            ms.push_back(mase(window.history, window.truth, pred));
            mase_companies.push_back(window.company);
          } catch (const DegenerateError&) {
            ++degenerate;
          }
        }
        auto add = [&](std::string_view metric, const Aggregate& a) {
          scores[{metric, mi, p}] = a.mean;
          ScoreDetail d;
          d.score = {std::string(metric), m.id, p, std::string(confounder_name(metric)), a.mean};
          d.stddev = a.stddev;
          d.windows = a.count;
          art.details.push_back(std::move(d));
        };
        add(metric_name::kSmape, aggregate_by_group(companies, sm));
        add(metric_name::kSignAccuracy, aggregate_by_group(companies, sa));
        if (degenerate > 0) {
          art.warnings.push_back(m.id + "/" + std::string(to_string(p)) + ": MASE skipped " +
                                 std::to_string(degenerate) + " window(s) with a flat history");
        }
        if (!ms.empty()) add(metric_name::kMase, aggregate_by_group(mase_companies, ms));

        const auto rows = art.frame.select(m.id, p);
        for (auto metric : {metric_name::kWrsIndustry, metric_name::kWrsCompany}) {
          try {
            const auto r = metric == metric_name::kWrsIndustry ? wrs_industry(rows, cfg.metrics.wrs)
                                                               : wrs_company(rows, cfg.metrics.wrs);
            scores[{metric, mi, p}] = r.value;
            ScoreDetail d;
            d.score = {std::string(metric), m.id, p, std::string(confounder_name(metric)), r.value};
            d.windows = rows.size();
            art.details.push_back(std::move(d));
          } catch (const DataError& e) {
            art.warnings.push_back(m.id + "/" + std::string(to_string(p)) + ": " +
                                   std::string(metric) + " not computed: " + e.what());
          }
        }
      }
    }

    for (std::size_t k = 0; k < cfg.distributions.size(); ++k) {
      const auto& dc = cfg.distributions[k];
      const TreatmentDistribution dist{dc.name, dc.field, dc.favored, dc.ratio, cfg.distribution_seed(k)};
      std::vector<std::string> conf;
      for (const auto& w : data.windows) conf.push_back(dc.field == ConfounderField::kCompany ? w.company : w.industry);
      const bool industry = dc.field == ConfounderField::kIndustry;
      const auto ape_metric = industry ? metric_name::kApeIndustry : metric_name::kApeCompany;
      const auto pie_metric = industry ? metric_name::kPieIndustry : metric_name::kPieCompany;
      for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
        const auto& m = cfg.models[mi];
        if (m.perturbations.size() < 2) continue;
        const auto assigned = assign_treatments(conf, dist, m.perturbations);
        std::vector<TreatedRow> rows;
        for (std::size_t w = 0; w < nw; ++w) {
          art.assignments.push_back({dc.name, m.id, data.windows[w].window_id, conf[w], assigned[w]});
          const auto& rec = art.residuals[slot_base.at({mi, assigned[w]}) + w];
          rows.push_back({conf[w], assigned[w], rec.max_residual});
        }
        for (auto p : m.perturbations) {
          if (p == Perturbation::P0) continue;
          ApeResult r;
          try {
            r = ape(rows, p);
          } catch (const Error& e) {
            art.warnings.push_back(m.id + "/" + std::string(to_string(p)) + "/" + dc.name +
                                   ": APE not computed: " + e.what());
            continue;
          }
          if (!r.unmatchable.empty() || r.excluded_treated > 0) {
            art.warnings.push_back(m.id + "/" + std::string(to_string(p)) + "/" + dc.name + ": " +
                                   std::to_string(r.excluded_treated) +
                                   " treated row(s) without a control in their stratum");
          }
          for (auto metric : {ape_metric, pie_metric}) {
            const double v = metric == ape_metric ? r.ape_m : r.pie_percent;
            const auto key = std::make_tuple(metric, mi, p);
            const auto it = scores.find(key);
            if (it == scores.end() || v > it->second) scores[key] = v;
            ScoreDetail d;
            d.score = {std::string(metric), m.id, p, std::string(confounder_name(metric)), v};
            d.source = dc.name;
            d.windows = r.treated + r.controls;
            d.ape_o = r.ape_o;
            d.ape_m = r.ape_m;
            d.signed_o = r.signed_o;
            d.signed_m = r.signed_m;
            d.treated = r.treated;
            d.controls = r.controls;
            d.matched = r.matched;
            d.excluded_treated = r.excluded_treated;
            art.details.push_back(std::move(d));
          }
        }
      }
    }

    for (auto metric : metric_order()) {
      for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
        for (auto p : cfg.models[mi].perturbations) {
          const auto it = scores.find({metric, mi, p});
          if (it == scores.end()) continue;
          art.raw_scores.push_back({std::string(metric), cfg.models[mi].id, p,
                                    std::string(confounder_name(metric)), it->second});
        }
      }
    }
  });

  stage("rating", [&] {
    art.ratings = rate_scores(art.raw_scores, {cfg.metrics.levels, cfg.metrics.tie_rule, std::nullopt});
  });
  return art;
}

namespace {

std::string opt_value(const std::optional<double>& v) {
  return v ? csv::format_double(*v) : std::string();
}

std::string format_residual_frame(const CausalFrame& frame) {
  std::string s = "model_id,perturbation,window_id,company,industry,max_residual\n";
  for (const auto& r : frame.rows) {
    s += csv::escape(r.model_id) + ',' + std::string(to_string(r.perturbation)) + ',' +
         csv::escape(r.window_id) + ',' + csv::escape(r.company) + ',' + csv::escape(r.industry) +
         ',' + csv::format_double(r.max_residual) + '\n';
  }
  return s;
}

std::string format_assignments(const std::vector<AssignmentRow>& rows) {
  std::string s = "distribution,model_id,window_id,confounder,perturbation\n";
  for (const auto& r : rows) {
    s += csv::escape(r.distribution) + ',' + csv::escape(r.model_id) + ',' + csv::escape(r.window_id) +
         ',' + csv::escape(r.confounder) + ',' + std::string(to_string(r.perturbation)) + '\n';
  }
  return s;
}

std::string format_details(const std::vector<ScoreDetail>& rows) {
  std::string s =
      "metric,model_id,perturbation,confounder,source,value,stddev,windows,ape_o,ape_m,signed_o,"
      "signed_m,treated,controls,matched,excluded_treated\n";
  for (const auto& d : rows) {
    const bool causal = d.ape_o.has_value();
    s += csv::escape(d.score.metric) + ',' + csv::escape(d.score.model_id) + ',' +
         std::string(to_string(d.score.perturbation)) + ',' + d.score.confounder + ',' +
         csv::escape(d.source) + ',' + csv::format_double(d.score.value) + ',' + opt_value(d.stddev) +
         ',' + std::to_string(d.windows) + ',' + opt_value(d.ape_o) + ',' + opt_value(d.ape_m) + ',' +
         opt_value(d.signed_o) + ',' + opt_value(d.signed_m) + ',' +
         (causal ? std::to_string(d.treated) : "") + ',' + (causal ? std::to_string(d.controls) : "") +
         ',' + (causal ? std::to_string(d.matched) : "") + ',' +
         (causal ? std::to_string(d.excluded_treated) : "") + '\n';
  }
  return s;
}

std::string format_partial_orders(const std::vector<RatingRow>& rows) {
  ordered_json doc = ordered_json::object();
  for (const auto& r : rows) {
    ordered_json e;
    e["model_id"] = r.model_id;
    e["value"] = r.value;
    doc[r.metric][r.confounder][std::string(to_string(r.perturbation))].push_back(std::move(e));
  }
  return doc.dump(2) + '\n';
}

std::string format_radar(const RunConfig& cfg, const std::vector<RawScore>& scores) {
  ordered_json doc;
  doc["axes"] = ordered_json::array();
  for (auto p : cfg.perturbations) doc["axes"].push_back(to_string(p));
  doc["axes"].push_back("average");
  auto& metrics = doc["metrics"];
  metrics = ordered_json::object();
  std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> avg;
  for (const auto& s : scores) {
    metrics[s.metric][s.model_id][std::string(to_string(s.perturbation))] = s.value;
    auto& a = avg[{s.metric, s.model_id}];
    a.first += s.value;
    ++a.second;
  }
  for (auto& [metric, models] : metrics.items()) {
    for (auto& [model, values] : models.items()) {
      const auto& a = avg.at({metric, model});
      values["average"] = a.first / static_cast<double>(a.second);
    }
  }
  return doc.dump(2) + '\n';
}

std::string relative_or_plain(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (base.empty()) return p.generic_string();
  const auto rel = p.lexically_relative(base);
  return rel.empty() ? p.generic_string() : rel.generic_string();
}

}  // namespace

void write_run_outputs(const RunConfig& cfg, const RunArtifacts& art,
                       const std::optional<std::string>& failed_stage, const std::string& error) {
  const auto& dir = cfg.output_dir;
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    csv::write_file(dir / name, content);
    written.push_back(name);
  };
  const auto done = [&](const std::string& s) {
    return std::find(art.completed_stages.begin(), art.completed_stages.end(), s) !=
           art.completed_stages.end();
  };
  if (done("forecast")) emit("predictions.csv", format_predictions_csv(art.predictions));
  if (done("residuals")) emit("residual_frame.csv", format_residual_frame(art.frame));
  if (done("metrics")) {
    emit("assignments.csv", format_assignments(art.assignments));
    emit("raw_scores.csv", format_raw_scores(art.raw_scores));
    emit("raw_score_details.csv", format_details(art.details));
    emit("radar.json", format_radar(cfg, art.raw_scores));
  }
  if (done("rating")) {
    emit("partial_orders.json", format_partial_orders(art.ratings));
    emit("ratings.csv", format_ratings_csv(art.ratings));
    emit("ratings.json", format_ratings_json(art.ratings, cfg.metrics.levels, to_string(cfg.metrics.tie_rule)));
  }
  if (!art.http_audit.empty()) {
    std::string s;
    for (const auto& [model, e] : art.http_audit) {
      ordered_json j;
      j["model_id"] = model;
      j["window_id"] = e.window_id;
      j["perturbation"] = to_string(e.perturbation);
      j["attempt"] = e.attempt;
      j["status"] = e.status;
      j["raw"] = e.raw;
      s += j.dump() + '\n';
    }
    emit("http_audit.jsonl", s);
  }

  ordered_json m;
  m["tool"] = "tsrate";
  m["version"] = kVersion;
  m["created_at"] = timestamp_utc();
  m["status"] = failed_stage ? "failed" : "ok";
  if (failed_stage) {
    m["failed_stage"] = *failed_stage;
    m["error"] = error;
    m["partial_outputs"] = true;
  }
  m["seed"] = cfg.seed;
  m["config_sha256"] = sha256_hex(cfg.text);
  m["config"] = cfg.source.empty() ? std::string() : cfg.source.filename().string();
  m["window"] = {{"n", cfg.n}, {"d", cfg.d}, {"stride", cfg.stride}};
  m["levels"] = cfg.metrics.levels;
  m["tie_rule"] = to_string(cfg.metrics.tie_rule);
  m["completed_stages"] = art.completed_stages;
  ordered_json inputs = ordered_json::array();
  const auto base = cfg.source.empty() ? std::filesystem::path() : std::filesystem::absolute(cfg.source).parent_path();
  for (const auto& e : cfg.dataset.entries) {
    inputs.push_back({{"path", relative_or_plain(e.csv_path, base)}, {"company", e.company}, {"industry", e.industry}});
  }
  m["inputs"] = inputs;
  ordered_json models = ordered_json::array();
  for (const auto& mc : cfg.models) {
    ordered_json pj = ordered_json::array();
    for (auto p : mc.perturbations) pj.push_back(to_string(p));
    models.push_back({{"id", mc.id}, {"modality", to_string(mc.modality)}, {"perturbations", pj}});
  }
  m["models"] = models;
  ordered_json dists = ordered_json::array();
  for (std::size_t k = 0; k < cfg.distributions.size(); ++k) {
    const auto& d = cfg.distributions[k];
    dists.push_back({{"name", d.name}, {"field", to_string(d.field)}, {"favored", d.favored},
                     {"ratio", d.ratio}, {"seed", cfg.distribution_seed(k)}});
  }
  m["distributions"] = dists;
  m["counts"] = {{"windows", art.windows.size()},
                 {"predictions", art.predictions.size()},
                 {"raw_scores", art.raw_scores.size()},
                 {"skipped_csv_rows", art.skipped_rows}};
  m["warnings"] = art.warnings;
  ordered_json rejects = ordered_json::array();
  for (const auto& r : art.rejects) {
    rejects.push_back({{"model_id", r.model_id}, {"line", r.reject.line},
                       {"window_id", r.reject.window_id}, {"reason", r.reject.reason}});
  }
  m["rejects"] = rejects;
  m["lineage"] = {
      {"ratings.csv", "raw_scores.csv rows with the same metric, perturbation and confounder"},
      {"raw_scores.csv", "raw_score_details.csv; APE/PIE take the maximum over distributions"},
      {"raw_score_details.csv (WRS, APE, PIE)", "residual_frame.csv rows of the model and perturbation; APE/PIE via assignments.csv"},
      {"raw_score_details.csv (SMAPE, MASE, SIGN_ACC)", "predictions.csv rows of the model and perturbation against the window truth"},
      {"residual_frame.csv", "predictions.csv joined with window labels by window_id"}};
  m["outputs"] = written;
  csv::write_file(dir / "manifest.json", m.dump(2) + '\n');
}

std::size_t write_images(const RunConfig& cfg, const std::filesystem::path& dir) {
  const auto data = prepare(cfg);
  const auto has = [&](Perturbation p) {
    return std::find(cfg.perturbations.begin(), cfg.perturbations.end(), p) != cfg.perturbations.end();
  };
  std::vector<std::size_t> counts(data.windows.size(), 0);
  parallel_for(data.windows.size(), cfg.jobs, [&](std::size_t w) {
    const auto& window = data.windows[w];
    const auto spec = spectrogram_image(window.history);
    const auto name = [&](Perturbation p) { return window.window_id + "_" + std::string(to_string(p)) + ".png"; };
    write_png(dir / "spectrogram" / name(Perturbation::P0), spec);
    std::size_t n = 1;
    if (has(Perturbation::P4)) {
      write_png(dir / "spectrogram" / name(Perturbation::P4), pixel_center_black(spec));
      ++n;
    }
    if (has(Perturbation::P5)) {
      write_png(dir / "spectrogram" / name(Perturbation::P5), saturation_scale(spec, cfg.saturation_factor));
      ++n;
    }
    const auto plot = render_lineplot(window.history);
    write_png(dir / "lineplot" / name(Perturbation::P0), plot);
    ++n;
    if (has(Perturbation::P6)) {
      const SlopeSignSentiment provider;
      write_png(dir / "lineplot" / name(Perturbation::P6),
                overlay_stripe(plot, sentiment_stripe(plot, window.history, provider)));
      ++n;
    }
    counts[w] = n;
  });
  std::size_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

}  // namespace tsrate::app
