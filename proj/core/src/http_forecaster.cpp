#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "tsrate/http_forecaster.hpp"

#include <httplib.h>

#include <cstdlib>
#include <nlohmann/json.hpp>
#include <regex>
#include <semaphore>
#include <thread>

#include "tsrate/csv.hpp"
#include "tsrate/errors.hpp"
#include "tsrate/png_io.hpp"

namespace tsrate {

std::string default_prompt_template() {
  return "Below are {{n}} consecutive daily closing prices, oldest first. "
         "Entries marked null were not observed.\n"
         "{{series}}\n"
         "Predict the next {{d}} daily closing prices. "
         "Answer with exactly {{d}} numbers separated by commas and nothing else.";
}

std::string render_prompt(std::string_view tmpl, const MaskedSeries& history, std::size_t horizon) {
  std::string series;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (i) series += ", ";
    series += history[i] ? csv::format_double(*history[i]) : "null";
  }
  const std::pair<std::string_view, std::string> subs[] = {
      {"{{series}}", series},
      {"{{n}}", std::to_string(history.size())},
      {"{{d}}", std::to_string(horizon)},
  };
  std::string out(tmpl);
  for (const auto& [key, value] : subs) {
    for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size())) {
      out.replace(pos, key.size(), value);
    }
  }
  return out;
}

std::optional<std::vector<double>> parse_numeric_list(std::string_view text, std::size_t count) {
  static const std::regex number(R"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)");
  const std::string s(text);
  std::vector<std::vector<double>> runs;
  std::size_t prev_end = std::string::npos;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), number); it != std::sregex_iterator(); ++it) {
    const auto begin = static_cast<std::size_t>(it->position());
    bool joined = prev_end != std::string::npos && !runs.empty();
    if (joined) {
      for (std::size_t k = prev_end; k < begin; ++k) {
        const char c = s[k];
        if (!(std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ';' || c == '[' ||
              c == ']')) {
          joined = false;
          break;
        }
      }
    }
    const auto v = csv::parse_double(it->str());
    if (!v) {
      prev_end = std::string::npos;
      continue;
    }
    if (!joined) runs.emplace_back();
    runs.back().push_back(*v);
    prev_end = begin + static_cast<std::size_t>(it->length());
  }
  for (auto r = runs.rbegin(); r != runs.rend(); ++r) {
    if (r->size() == count) return *r;
  }
  return std::nullopt;
}

struct HttpForecaster::Gate {
  explicit Gate(std::size_t n) : slots(static_cast<std::ptrdiff_t>(n)) {}
  std::counting_semaphore<1024> slots;
};

HttpForecaster::HttpForecaster(std::string id, Modality modality, HttpEndpoint endpoint,
                               std::string prompt_template)
    : id_(std::move(id)),
      modality_(modality),
      endpoint_(std::move(endpoint)),
      template_(std::move(prompt_template)) {
  if (endpoint_.max_in_flight < 1 || endpoint_.max_in_flight > 1024) {
    throw ConfigError(id_ + ": max_in_flight must be in 1..1024");
  }
  if (endpoint_.max_attempts < 1) throw ConfigError(id_ + ": max_attempts must be >= 1");
  gate_ = std::make_unique<Gate>(endpoint_.max_in_flight);
}

HttpForecaster::~HttpForecaster() = default;

std::vector<AuditEntry> HttpForecaster::audit() const {
  std::lock_guard lock(audit_mutex_);
  return audit_;
}

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint url lacks a scheme: " + url);
  const auto path_begin = url.find('/', scheme_end + 3);
  if (path_begin == std::string::npos) return {url, "/"};
  return {url.substr(0, path_begin), url.substr(path_begin)};
}

std::string response_text(const std::string& body) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (!j.is_discarded() && j.is_object() && j.contains("text") && j["text"].is_string()) {
    return j["text"].get<std::string>();
  }
  return body;
}

}  // namespace

ForecastResult HttpForecaster::predict(const ForecastRequest& request) const {
  nlohmann::json payload;
  payload["prompt"] = render_prompt(template_, request.history, request.horizon);
  if (modality_ == Modality::kNumericImage && request.image != nullptr) {
    const auto png = encode_png(*request.image);
    payload["image_png_base64"] =
        httplib::detail::base64_encode(std::string(png.begin(), png.end()));
  }
  const std::string body = payload.dump();

  httplib::Headers headers;
  if (!endpoint_.auth_header.empty()) {
    const char* secret = endpoint_.auth_env.empty() ? nullptr : std::getenv(endpoint_.auth_env.c_str());
    if (secret == nullptr) {
      throw ConfigError(id_ + ": environment variable '" + endpoint_.auth_env + "' is not set");
    }
    headers.emplace(endpoint_.auth_header, secret);
  }

  const auto url = split_url(endpoint_.url);
  const auto where = id_ + " " + request.window.window_id + "/" +
                     std::string(to_string(request.perturbation));
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(endpoint_.timeout - secs);

  gate_->slots.acquire();
  struct Release {
    Gate& g;
    ~Release() { g.slots.release(); }
  } release{*gate_};

  auto backoff = endpoint_.backoff;
  std::string last_failure;
  for (int attempt = 1; attempt <= endpoint_.max_attempts; ++attempt) {
    httplib::Client client(url.origin);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    const auto res = client.Post(url.path, headers, body, "application/json");

    AuditEntry entry{request.window.window_id, request.perturbation, attempt, 0, {}};
    if (!res) {
      const auto err = res.error();
      entry.raw = httplib::to_string(err);
      {
        std::lock_guard lock(audit_mutex_);
        audit_.push_back(entry);
      }
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
        throw Error(where + ": request timed out or the connection was dropped (" + entry.raw + ")");
      }
      last_failure = "transport error: " + entry.raw;
    } else {
      entry.status = res->status;
      entry.raw = res->body;
      {
        std::lock_guard lock(audit_mutex_);
        audit_.push_back(entry);
      }
      if (res->status >= 200 && res->status < 300) {
        if (auto values = parse_numeric_list(response_text(res->body), request.horizon)) {
          return {std::move(*values), {}};
        }
        last_failure = "could not find " + std::to_string(request.horizon) +
                       " numbers in response: " + res->body;
      } else if (res->status == 429 || res->status >= 500) {
        last_failure = "HTTP " + std::to_string(res->status) + ": " + res->body;
      } else {
        throw Error(where + ": HTTP " + std::to_string(res->status) + ": " + res->body);
      }
    }
    if (attempt < endpoint_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw Error(where + ": giving up after " + std::to_string(endpoint_.max_attempts) +
              " attempts; last failure: " + last_failure);
}

}  // namespace tsrate
