#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsrate/forecast.hpp"

namespace tsrate {

struct HttpEndpoint {
  std::string url;                  ///< http(s)://host[:port]/path
  std::string auth_header;          ///< e.g. "Authorization"; empty for none
  std::string auth_env;             ///< env var holding the header value
  std::chrono::milliseconds timeout{30000};
  int max_attempts = 3;
  std::chrono::milliseconds backoff{250};  ///< doubled after each failed attempt
  std::size_t max_in_flight = 4;
};

/// Default prompt. Placeholders: {{n}}, {{d}}, {{series}}.
std::string default_prompt_template();

/// Substitutes the placeholders; missing values serialize as `null`.
std::string render_prompt(std::string_view tmpl, const MaskedSeries& history, std::size_t horizon);

/// Finds the last run of numbers separated only by whitespace, commas,
/// semicolons or brackets that holds exactly `count` values.
std::optional<std::vector<double>> parse_numeric_list(std::string_view text, std::size_t count);

struct AuditEntry {
  std::string window_id;
  Perturbation perturbation = Perturbation::P0;
  int attempt = 0;
  int status = 0;  ///< HTTP status, 0 on transport failure
  std::string raw;
};

/// Sends {"prompt": ..., "image_png_base64": ...} as JSON and reads the
/// forecast from the "text" field of a JSON reply, or from the raw body.
class HttpForecaster final : public Forecaster {
 public:
  HttpForecaster(std::string id, Modality modality, HttpEndpoint endpoint,
                 std::string prompt_template);
  ~HttpForecaster() override;

  const std::string& id() const override { return id_; }
  Modality modality() const override { return modality_; }
  ForecastResult predict(const ForecastRequest& request) const override;

  std::vector<AuditEntry> audit() const;

 private:
  struct Gate;
  std::string id_;
  Modality modality_;
  HttpEndpoint endpoint_;
  std::string template_;
  std::unique_ptr<Gate> gate_;
  mutable std::mutex audit_mutex_;
  mutable std::vector<AuditEntry> audit_;
};

}  // namespace tsrate
