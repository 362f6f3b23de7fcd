#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsrate/errors.hpp"
#include "tsrate/forecast.hpp"
#include "tsrate/http_forecaster.hpp"
#include "tsrate/ingest.hpp"
#include "tsrate/metrics.hpp"
#include "tsrate/perturb.hpp"
#include "tsrate/rating.hpp"

namespace tsrate::app {

inline constexpr int kSchemaVersion = 1;

/// One problem found in a config, located by a JSON path such as
/// `$.models[1].kind`.
struct ConfigIssue {
  std::string path;
  std::string message;
};

/// Thrown with every issue found, one per line in what().
class ConfigInvalid : public ConfigError {
 public:
  explicit ConfigInvalid(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

enum class ModelKind { kAr, kBiased, kRandom, kExternal, kHttp };

struct ModelConfig {
  std::string id;
  ModelKind kind = ModelKind::kAr;
  Modality modality = Modality::kNumeric;
  std::vector<Perturbation> perturbations;  ///< resolved; always contains P0

  std::size_t ar_p = 5;
  std::size_t ar_d = 1;

  std::map<std::string, double, std::less<>> offsets{{"META", 0.0}, {"GOOG", 200.0}};
  std::optional<double> default_offset = 400.0;

  std::optional<std::uint64_t> seed;  ///< random model; defaults to the run seed

  std::filesystem::path predictions;  ///< external model

  HttpEndpoint endpoint;       ///< http model
  std::string prompt_template;
};

struct DistributionConfig {
  std::string name;
  ConfounderField field = ConfounderField::kIndustry;
  std::string favored;
  double ratio = 2.0;
  std::optional<std::uint64_t> seed;  ///< defaults to run seed + position
};

struct MetricsConfig {
  WrsConfig wrs;
  std::size_t levels = 3;
  MaxResidualMode rmax = MaxResidualMode::kAbsolute;
  TieRule tie_rule = TieRule::kDistinct;
};

struct RunConfig {
  std::filesystem::path source;  ///< config file, empty when parsed from text
  std::string text;              ///< raw bytes, hashed into the run manifest
  DatasetManifest dataset;
  std::size_t n = 80;
  std::size_t d = 20;
  std::size_t stride = 1;
  std::vector<Perturbation> perturbations;  ///< ascending, contains P0
  NumericPerturbationParams numeric;
  double saturation_factor = 10.0;
  std::vector<DistributionConfig> distributions;  ///< resolved (defaults filled in)
  bool distributions_defaulted = false;
  std::vector<ModelConfig> models;
  MetricsConfig metrics;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  /// Seed a distribution draws with.
  std::uint64_t distribution_seed(std::size_t index) const;
};

/// Parses JSON text. Relative paths resolve against `base_dir`. Throws
/// ConfigInvalid listing every structural problem.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir);

/// Reads and parses a config file.
RunConfig load_config(const std::filesystem::path& path);

/// Semantic checks that need the filesystem or cross-field knowledge
/// (files exist, labels consistent, favoured values known). Returns the
/// issues instead of throwing.
std::vector<ConfigIssue> validate_config(const RunConfig& config);

/// Models' default perturbations: the run set restricted to P0-P3 for
/// numeric models, the full run set for image models.
std::vector<Perturbation> default_model_perturbations(Modality m,
                                                      const std::vector<Perturbation>& run_set);

}  // namespace tsrate::app
