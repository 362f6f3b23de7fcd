#include "tsrate/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "tsrate/errors.hpp"

namespace tsrate::app {

using nlohmann::json;

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string s;
  for (const auto& i : issues) {
    if (!s.empty()) s += '\n';
    s += i.path + ": " + i.message;
  }
  return s;
}

class Reader {
 public:
  std::vector<ConfigIssue> issues;

  void fail(const std::string& path, std::string message) {
    issues.push_back({path, std::move(message)});
  }

  bool object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    fail(path, "expected an object");
    return false;
  }

  void only_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : j.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(path + "." + key, "unknown key");
      }
    }
  }

  std::optional<std::string> string(const json& j, std::string_view key, const std::string& path,
                                    bool required) {
    const auto p = path + "." + std::string(key);
    if (!j.contains(key)) {
      if (required) fail(p, "required");
      return std::nullopt;
    }
    const auto& v = j.at(std::string(key));
    if (!v.is_string()) {
      fail(p, "expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<std::uint64_t> uint(const json& j, std::string_view key, const std::string& path,
                                    std::uint64_t min, bool required = false) {
    const auto p = path + "." + std::string(key);
    if (!j.contains(key)) {
      if (required) fail(p, "required");
      return std::nullopt;
    }
    const auto& v = j.at(std::string(key));
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      fail(p, "expected a non-negative integer");
      return std::nullopt;
    }
    const auto u = v.get<std::uint64_t>();
    if (u < min) {
      fail(p, "must be >= " + std::to_string(min));
      return std::nullopt;
    }
    return u;
  }

  std::optional<double> number(const json& j, std::string_view key, const std::string& path) {
    const auto p = path + "." + std::string(key);
    if (!j.contains(key)) return std::nullopt;
    const auto& v = j.at(std::string(key));
    if (!v.is_number()) {
      fail(p, "expected a number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<std::vector<double>> numbers(const json& j, std::string_view key, const std::string& path) {
    const auto p = path + "." + std::string(key);
    if (!j.contains(key)) return std::nullopt;
    const auto& v = j.at(std::string(key));
    if (!v.is_array()) {
      fail(p, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        fail(p + "[" + std::to_string(i) + "]", "expected a number");
        return std::nullopt;
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::optional<std::vector<Perturbation>> perturbation_list(const json& j, std::string_view key,
                                                             const std::string& path) {
    const auto p = path + "." + std::string(key);
    if (!j.contains(key)) return std::nullopt;
    const auto& v = j.at(std::string(key));
    if (!v.is_array() || v.empty()) {
      fail(p, "expected a non-empty array of perturbation tags");
      return std::nullopt;
    }
    std::set<Perturbation> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto ip = p + "[" + std::to_string(i) + "]";
      if (!v[i].is_string()) {
        fail(ip, "expected a string such as \"P1\"");
        continue;
      }
      try {
        if (!out.insert(parse_perturbation(v[i].get<std::string>())).second) fail(ip, "duplicate");
      } catch (const DataError& e) {
        fail(ip, e.what());
      }
    }
    if (!out.count(Perturbation::P0)) fail(p, "must include the control P0");
    return std::vector<Perturbation>(out.begin(), out.end());
  }
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

void parse_dataset(Reader& r, const json& j, const std::filesystem::path& base, RunConfig& cfg) {
  const std::string path = "$.dataset";
  if (!r.object(j, path)) return;
  r.only_keys(j, path, {"entries", "start", "end", "price_column"});
  if (!j.contains("entries") || !j["entries"].is_array() || j["entries"].empty()) {
    r.fail(path + ".entries", "required: a non-empty array of {path, company, industry}");
  } else {
    const auto& entries = j["entries"];
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto ep = path + ".entries[" + std::to_string(i) + "]";
      if (!r.object(entries[i], ep)) continue;
      r.only_keys(entries[i], ep, {"path", "company", "industry"});
      const auto file = r.string(entries[i], "path", ep, true);
      const auto company = r.string(entries[i], "company", ep, true);
      const auto industry = r.string(entries[i], "industry", ep, true);
      if (file && company && industry) {
        cfg.dataset.entries.push_back({resolve(base, *file), *company, *industry});
      }
    }
  }
  for (const char* key : {"start", "end"}) {
    if (const auto s = r.string(j, key, path, false)) {
      const auto d = parse_date(*s);
      if (!d) {
        r.fail(path + "." + key, "expected a date YYYY-MM-DD");
      } else {
        (std::string_view(key) == "start" ? cfg.dataset.start : cfg.dataset.end) = d;
      }
    }
  }
  if (const auto c = r.string(j, "price_column", path, false)) {
    if (*c == "close") {
      cfg.dataset.column = PriceColumn::kClose;
    } else if (*c == "adj_close") {
      cfg.dataset.column = PriceColumn::kAdjClose;
    } else {
      r.fail(path + ".price_column", "expected \"close\" or \"adj_close\"");
    }
  }
}

ModelKind parse_kind(Reader& r, const std::string& kind, const std::string& path) {
  if (kind == "ar") return ModelKind::kAr;
  if (kind == "biased") return ModelKind::kBiased;
  if (kind == "random") return ModelKind::kRandom;
  if (kind == "external") return ModelKind::kExternal;
  if (kind == "http") return ModelKind::kHttp;
  r.fail(path, "unknown model kind '" + kind + "' (ar|biased|random|external|http)");
  return ModelKind::kAr;
}

void parse_model(Reader& r, const json& j, const std::string& path,
                 const std::filesystem::path& base, RunConfig& cfg) {
  if (!r.object(j, path)) return;
  ModelConfig m;
  const auto id = r.string(j, "id", path, true);
  const auto kind = r.string(j, "kind", path, true);
  if (!id || !kind) return;
  m.id = *id;
  if (m.id.empty() || m.id.find_first_of(",\"\n") != std::string::npos) {
    r.fail(path + ".id", "must be non-empty without commas, quotes or newlines");
  }
  m.kind = parse_kind(r, *kind, path + ".kind");
  std::initializer_list<std::string_view> common = {"id", "kind", "modality", "perturbations"};
  std::vector<std::string_view> allowed(common);
  switch (m.kind) {
    case ModelKind::kAr: allowed.insert(allowed.end(), {"p", "d_diff"}); break;
    case ModelKind::kBiased: allowed.insert(allowed.end(), {"offsets", "default_offset"}); break;
    case ModelKind::kRandom: allowed.insert(allowed.end(), {"seed"}); break;
    case ModelKind::kExternal: allowed.insert(allowed.end(), {"predictions"}); break;
    case ModelKind::kHttp:
      allowed.insert(allowed.end(), {"url", "auth_header", "auth_env", "timeout_ms", "max_attempts",
                                     "backoff_ms", "max_in_flight", "prompt_template"});
      break;
  }
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      r.fail(path + "." + key, "unknown key for model kind '" + *kind + "'");
    }
  }
  if (const auto mod = r.string(j, "modality", path, false)) {
    if (*mod == "numeric") {
      m.modality = Modality::kNumeric;
    } else if (*mod == "numeric+image") {
      m.modality = Modality::kNumericImage;
    } else {
      r.fail(path + ".modality", "expected \"numeric\" or \"numeric+image\"");
    }
    if (m.modality == Modality::kNumericImage &&
        (m.kind == ModelKind::kAr || m.kind == ModelKind::kBiased || m.kind == ModelKind::kRandom)) {
      r.fail(path + ".modality", "built-in baselines are numeric-only");
    }
  }
  if (auto ps = r.perturbation_list(j, "perturbations", path)) {
    m.perturbations = std::move(*ps);
  } else {
    m.perturbations = default_model_perturbations(m.modality, cfg.perturbations);
  }
  for (auto p : m.perturbations) {
    if (std::find(cfg.perturbations.begin(), cfg.perturbations.end(), p) == cfg.perturbations.end()) {
      r.fail(path + ".perturbations", std::string(to_string(p)) + " is not in $.perturbations.set");
    }
  }

  switch (m.kind) {
    case ModelKind::kAr:
      if (auto v = r.uint(j, "p", path, 1)) m.ar_p = *v;
      if (auto v = r.uint(j, "d_diff", path, 0)) m.ar_d = *v;
      if (m.ar_p + m.ar_d >= cfg.n) r.fail(path + ".p", "p + d_diff must be smaller than the window size n");
      break;
    case ModelKind::kBiased:
      if (j.contains("offsets")) {
        m.offsets.clear();
        const auto& o = j["offsets"];
        if (!o.is_object()) {
          r.fail(path + ".offsets", "expected an object mapping company to offset");
        } else {
          for (const auto& [company, value] : o.items()) {
            if (!value.is_number()) {
              r.fail(path + ".offsets." + company, "expected a number");
            } else {
              m.offsets[company] = value.get<double>();
            }
          }
        }
      }
      if (j.contains("default_offset")) {
        if (j["default_offset"].is_null()) {
          m.default_offset.reset();
        } else if (auto v = r.number(j, "default_offset", path)) {
          m.default_offset = *v;
        }
      }
      break;
    case ModelKind::kRandom:
      if (auto v = r.uint(j, "seed", path, 0)) m.seed = *v;
      break;
    case ModelKind::kExternal:
      if (auto v = r.string(j, "predictions", path, true)) m.predictions = resolve(base, *v);
      break;
    case ModelKind::kHttp: {
      if (auto v = r.string(j, "url", path, true)) {
        m.endpoint.url = *v;
        if (v->rfind("http://", 0) != 0 && v->rfind("https://", 0) != 0) {
          r.fail(path + ".url", "expected an http:// or https:// url");
        }
      }
      if (auto v = r.string(j, "auth_header", path, false)) m.endpoint.auth_header = *v;
      if (auto v = r.string(j, "auth_env", path, false)) m.endpoint.auth_env = *v;
      if (!m.endpoint.auth_header.empty() && m.endpoint.auth_env.empty()) {
        r.fail(path + ".auth_env", "required when auth_header is set");
      }
      if (auto v = r.uint(j, "timeout_ms", path, 1)) m.endpoint.timeout = std::chrono::milliseconds(*v);
      if (auto v = r.uint(j, "max_attempts", path, 1)) m.endpoint.max_attempts = static_cast<int>(*v);
      if (auto v = r.uint(j, "backoff_ms", path, 0)) m.endpoint.backoff = std::chrono::milliseconds(*v);
      if (auto v = r.uint(j, "max_in_flight", path, 1)) {
        if (*v > 1024) r.fail(path + ".max_in_flight", "must be <= 1024");
        m.endpoint.max_in_flight = static_cast<std::size_t>(*v);
      }
      m.prompt_template = r.string(j, "prompt_template", path, false).value_or(default_prompt_template());
      if (m.prompt_template.find("{{series}}") == std::string::npos) {
        r.fail(path + ".prompt_template", "must contain the {{series}} placeholder");
      }
      break;
    }
  }
  cfg.models.push_back(std::move(m));
}

void parse_distribution(Reader& r, const json& j, const std::string& path, RunConfig& cfg) {
  if (!r.object(j, path)) return;
  r.only_keys(j, path, {"name", "field", "favored", "ratio", "seed"});
  DistributionConfig d;
  const auto name = r.string(j, "name", path, true);
  const auto field = r.string(j, "field", path, true);
  const auto favored = r.string(j, "favored", path, true);
  if (!name || !field || !favored) return;
  d.name = *name;
  d.favored = *favored;
  try {
    d.field = parse_confounder_field(*field);
  } catch (const Error& e) {
    r.fail(path + ".field", e.what());
  }
  if (auto v = r.number(j, "ratio", path)) {
    if (!(*v > 0.0) || !std::isfinite(*v)) r.fail(path + ".ratio", "must be > 0");
    d.ratio = *v;
  }
  if (auto v = r.uint(j, "seed", path, 0)) d.seed = *v;
  cfg.distributions.push_back(std::move(d));
}

void default_distributions(RunConfig& cfg) {
  std::vector<std::string> industries;
  std::vector<std::string> companies;
  for (const auto& e : cfg.dataset.entries) {
    if (std::find(industries.begin(), industries.end(), e.industry) == industries.end()) {
      industries.push_back(e.industry);
    }
    companies.push_back(e.company);
  }
  for (std::size_t i = 0; i < industries.size(); ++i) {
    cfg.distributions.push_back(
        {"DI" + std::to_string(i + 1), ConfounderField::kIndustry, industries[i], 2.0, std::nullopt});
  }
  for (std::size_t i = 0; i < companies.size(); ++i) {
    cfg.distributions.push_back(
        {"DC" + std::to_string(i + 1), ConfounderField::kCompany, companies[i], 2.0, std::nullopt});
  }
  cfg.distributions_defaulted = true;
}

void parse_metrics(Reader& r, const json& j, RunConfig& cfg) {
  const std::string path = "$.metrics";
  if (!r.object(j, path)) return;
  r.only_keys(j, path, {"cis", "weights", "levels", "rmax_mode", "tie_rule"});
  if (auto v = r.numbers(j, "cis", path)) cfg.metrics.wrs.cis = *v;
  if (auto v = r.numbers(j, "weights", path)) cfg.metrics.wrs.weights = *v;
  try {
    cfg.metrics.wrs.validate();
  } catch (const ConfigError& e) {
    r.fail(path + ".cis", e.what());
  }
  if (j.contains("levels")) {
    if (auto v = r.uint(j, "levels", path, 1)) cfg.metrics.levels = *v;
  }
  if (auto v = r.string(j, "rmax_mode", path, false)) {
    if (*v == "absolute") {
      cfg.metrics.rmax = MaxResidualMode::kAbsolute;
    } else if (*v == "signed") {
      cfg.metrics.rmax = MaxResidualMode::kSigned;
    } else {
      r.fail(path + ".rmax_mode", "expected \"absolute\" or \"signed\"");
    }
  }
  if (auto v = r.string(j, "tie_rule", path, false)) {
    try {
      cfg.metrics.tie_rule = parse_tie_rule(*v);
    } catch (const DataError& e) {
      r.fail(path + ".tie_rule", e.what());
    }
  }
}

}  // namespace

ConfigInvalid::ConfigInvalid(std::vector<ConfigIssue> issues)
    : ConfigError(join_issues(issues)), issues_(std::move(issues)) {}

std::uint64_t RunConfig::distribution_seed(std::size_t index) const {
  const auto& d = distributions.at(index);
  return d.seed ? *d.seed : seed + index + 1;
}

std::vector<Perturbation> default_model_perturbations(Modality m,
                                                      const std::vector<Perturbation>& run_set) {
  if (m == Modality::kNumericImage) return run_set;
  std::vector<Perturbation> out;
  for (auto p : run_set) {
    if (!is_image_perturbation(p)) out.push_back(p);
  }
  return out;
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid({{"$", std::string("not valid JSON: ") + e.what()}});
  }
  Reader r;
  RunConfig cfg;
  cfg.text = text;
  if (!r.object(j, "$")) throw ConfigInvalid(r.issues);
  r.only_keys(j, "$", {"schema_version", "dataset", "window", "perturbations", "distributions",
                       "models", "metrics", "output_dir", "seed", "jobs"});
  if (auto v = r.uint(j, "schema_version", "$", 0, true); v && *v != kSchemaVersion) {
    r.fail("$.schema_version", "unsupported version " + std::to_string(*v) + " (expected " +
                                   std::to_string(kSchemaVersion) + ")");
  }
  if (j.contains("dataset")) {
    parse_dataset(r, j["dataset"], base_dir, cfg);
  } else {
    r.fail("$.dataset", "required");
  }
  if (j.contains("window") && r.object(j["window"], "$.window")) {
    const auto& w = j["window"];
    r.only_keys(w, "$.window", {"n", "d", "stride"});
    if (auto v = r.uint(w, "n", "$.window", 2)) cfg.n = *v;
    if (auto v = r.uint(w, "d", "$.window", 1)) cfg.d = *v;
    if (auto v = r.uint(w, "stride", "$.window", 1)) cfg.stride = *v;
  }
  cfg.perturbations = all_perturbations();
  if (j.contains("perturbations") && r.object(j["perturbations"], "$.perturbations")) {
    const auto& p = j["perturbations"];
    r.only_keys(p, "$.perturbations", {"set", "period", "phase", "saturation_factor"});
    if (auto v = r.perturbation_list(p, "set", "$.perturbations")) cfg.perturbations = *v;
    if (auto v = r.uint(p, "period", "$.perturbations", 1)) cfg.numeric.period = *v;
    if (auto v = r.uint(p, "phase", "$.perturbations", 0)) cfg.numeric.phase = *v;
    if (cfg.numeric.phase >= cfg.numeric.period) {
      r.fail("$.perturbations.phase", "must be smaller than period");
    }
    if (auto v = r.number(p, "saturation_factor", "$.perturbations")) {
      if (!(*v >= 0.0) || !std::isfinite(*v)) r.fail("$.perturbations.saturation_factor", "must be >= 0");
      cfg.saturation_factor = *v;
    }
  }
  if (j.contains("metrics")) parse_metrics(r, j["metrics"], cfg);
  if (auto v = r.uint(j, "seed", "$", 0)) cfg.seed = *v;
  if (auto v = r.uint(j, "jobs", "$", 1)) cfg.jobs = *v;
  cfg.output_dir = resolve(base_dir, r.string(j, "output_dir", "$", false).value_or("out"));

  if (j.contains("distributions")) {
    const auto& d = j["distributions"];
    if (!d.is_array()) {
      r.fail("$.distributions", "expected an array");
    } else {
      for (std::size_t i = 0; i < d.size(); ++i) {
        parse_distribution(r, d[i], "$.distributions[" + std::to_string(i) + "]", cfg);
      }
    }
  } else {
    default_distributions(cfg);
  }

  if (!j.contains("models") || !j["models"].is_array() || j["models"].empty()) {
    r.fail("$.models", "required: a non-empty array");
  } else {
    std::set<std::string> ids;
    for (std::size_t i = 0; i < j["models"].size(); ++i) {
      const auto mp = "$.models[" + std::to_string(i) + "]";
      const auto before = cfg.models.size();
      parse_model(r, j["models"][i], mp, base_dir, cfg);
      if (cfg.models.size() > before && !ids.insert(cfg.models.back().id).second) {
        r.fail(mp + ".id", "duplicate model id '" + cfg.models.back().id + "'");
      }
    }
  }
  if (!r.issues.empty()) throw ConfigInvalid(r.issues);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigInvalid({{"$", "cannot read config file '" + path.string() + "'"}});
  std::ostringstream ss;
  ss << in.rdbuf();
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  auto cfg = parse_config_text(ss.str(), std::filesystem::absolute(base).lexically_normal());
  cfg.source = path;
  return cfg;
}

std::vector<ConfigIssue> validate_config(const RunConfig& config) {
  std::vector<ConfigIssue> issues;
  std::map<std::string, std::string> industry_of;
  std::set<std::string> industries;
  for (std::size_t i = 0; i < config.dataset.entries.size(); ++i) {
    const auto& e = config.dataset.entries[i];
    const auto p = "$.dataset.entries[" + std::to_string(i) + "]";
    if (!std::filesystem::is_regular_file(e.csv_path)) {
      issues.push_back({p + ".path", "file not found: " + e.csv_path.string()});
    } else {
      try {
        const auto loaded = load_csv(e.csv_path, e.company, e.industry, config.dataset.column);
        const auto& dates = loaded.series.dates;
        const auto in_range = std::count_if(dates.begin(), dates.end(), [&](const Date& dt) {
          return (!config.dataset.start || dt >= *config.dataset.start) &&
                 (!config.dataset.end || dt <= *config.dataset.end);
        });
        if (static_cast<std::size_t>(in_range) < config.n + config.d) {
          issues.push_back({p + ".path", std::to_string(in_range) + " rows in the date range, need at least n + d = " +
                                             std::to_string(config.n + config.d)});
        }
      } catch (const Error& ex) {
        issues.push_back({p + ".path", ex.what()});
      }
    }
    if (!industry_of.emplace(e.company, e.industry).second) {
      issues.push_back({p + ".company", "company '" + e.company + "' listed twice"});
    }
    industries.insert(e.industry);
  }
  if (config.dataset.start && config.dataset.end && *config.dataset.end < *config.dataset.start) {
    issues.push_back({"$.dataset.end", "end date precedes start date"});
  }
  if (config.metrics.levels < 1) issues.push_back({"$.metrics.levels", "must be >= 1"});
  for (std::size_t i = 0; i < config.distributions.size(); ++i) {
    const auto& d = config.distributions[i];
    const auto p = config.distributions_defaulted ? std::string("$.distributions")
                                                  : "$.distributions[" + std::to_string(i) + "]";
    const bool known = d.field == ConfounderField::kCompany ? industry_of.count(d.favored) != 0
                                                            : industries.count(d.favored) != 0;
    if (!known) {
      issues.push_back({p + ".favored", "'" + d.favored + "' is not a " +
                                            std::string(to_string(d.field)) + " in the dataset"});
    }
  }
  for (std::size_t i = 0; i < config.models.size(); ++i) {
    const auto& m = config.models[i];
    const auto p = "$.models[" + std::to_string(i) + "]";
    if (m.kind == ModelKind::kExternal && !std::filesystem::is_regular_file(m.predictions)) {
      issues.push_back({p + ".predictions", "file not found: " + m.predictions.string()});
    }
    if (m.kind == ModelKind::kBiased && !m.default_offset) {
      for (const auto& [company, industry] : industry_of) {
        if (!m.offsets.count(company)) {
          issues.push_back({p + ".offsets", "no offset for company '" + company +
                                                "' and default_offset is null"});
        }
      }
    }
  }
  return issues;
}

}  // namespace tsrate::app
