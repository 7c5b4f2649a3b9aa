// Copyright 2026 The cote Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cote/refiner.h"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "cote/error.h"
#include "httplib.h"
#include "json_util.h"

namespace cote {
namespace {

struct Endpoint {
  std::string scheme_host_port;
  std::string path;
};

Endpoint split_url(const std::string& url) {
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ValidationError("endpoint_url \"" + url + "\" lacks a scheme");
  }
  std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string_view trim(std::string_view s) {
  auto space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

bool is_retryable_status(int status) {
  return status == 429 || status == 408 || status == 504;
}

std::string completion_text(const std::string& body) {
  ordered_json j;
  try {
    j = ordered_json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    throw NetworkError("completion response is not JSON");
  }
  if (!j.is_object() || !j.contains("choices") || !j["choices"].is_array() ||
      j["choices"].empty()) {
    throw NetworkError("completion response has no choices");
  }
  const ordered_json& choice = j["choices"][0];
  if (choice.contains("text") && choice["text"].is_string()) {
    return choice["text"].get<std::string>();
  }
  if (choice.contains("message") && choice["message"].is_object() &&
      choice["message"].contains("content") &&
      choice["message"]["content"].is_string()) {
    return choice["message"]["content"].get<std::string>();
  }
  throw NetworkError("completion response choice carries no text");
}

std::string request_completion(const std::string& prompt,
                               const RefineConfig& config) {
  const char* key = std::getenv(config.api_key_env_var.c_str());
  if (key == nullptr || *key == '\0') {
    throw AuthError("environment variable " + config.api_key_env_var +
                    " is not set");
  }
  const Endpoint endpoint = split_url(config.endpoint_url);

  ordered_json body;
  body["model"] = config.model_name;
  body["prompt"] = prompt;
  body["temperature"] = config.temperature;
  body["max_tokens"] = config.max_tokens;
  const std::string payload = body.dump();
  const httplib::Headers headers = {
      {"Authorization", std::string("Bearer ") + key}};

  const auto timeout = config.request_timeout;
  std::string last_error;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(config.backoff_base * (1LL << std::min(attempt - 1, 20)));
    }
    httplib::Client client(endpoint.scheme_host_port);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto response =
        client.Post(endpoint.path, headers, payload, "application/json");
    if (!response) {
      last_error = "transport error: " + httplib::to_string(response.error());
      continue;
    }
    const int status = response->status;
    if (status == 401 || status == 403) {
      throw AuthError("endpoint rejected the API key (HTTP " +
                      std::to_string(status) + ")");
    }
    if (is_retryable_status(status)) {
      last_error = "HTTP " + std::to_string(status);
      continue;
    }
    if (status != 200) {
      throw NetworkError("completion request failed with HTTP " +
                         std::to_string(status));
    }
    std::string text(trim(completion_text(response->body)));
    if (text.empty()) {
      throw EmptyCompletionError("endpoint returned an empty completion");
    }
    return text;
  }
  throw NetworkError("completion request failed after " +
                     std::to_string(config.max_retries + 1) +
                     " attempts: " + last_error);
}

std::optional<std::string> read_cache(const std::filesystem::path& file) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(file, ec)) return std::nullopt;
  std::string text = read_file(file);
  if (trim(text).empty()) return std::nullopt;
  return text;
}

}  // namespace

void validate_config(const RefineConfig& config) {
  if (!config.offline && config.demonstrations.empty()) {
    throw ValidationError("refiner needs at least one demonstration");
  }
  if (!(config.temperature >= 0.0)) {
    throw ValidationError("temperature must be non-negative");
  }
  if (config.max_parallel < 1) {
    throw ValidationError("max_parallel must be at least 1");
  }
  if (config.max_retries < 0) {
    throw ValidationError("max_retries must be non-negative");
  }
  if (config.max_tokens < 1) {
    throw ValidationError("max_tokens must be positive");
  }
  if (!config.offline) split_url(config.endpoint_url);
}

RefineConfig parse_refine_config(std::string_view json_text,
                                 std::string_view origin) {
  ordered_json j = parse_json(json_text, origin);
  JsonPath root(origin);
  require_object(j, root);
  RefineConfig config;
  for (const auto& [key, value] : j.items()) {
    JsonPath field = root.field(key);
    if (key == "endpoint_url") {
      config.endpoint_url = get_string(value, field);
    } else if (key == "model_name") {
      config.model_name = get_string(value, field);
    } else if (key == "api_key_env_var") {
      config.api_key_env_var = get_string(value, field);
    } else if (key == "instruction") {
      config.instruction = get_string(value, field);
    } else if (key == "demonstrations") {
      require_array(value, field);
      config.demonstrations.clear();
      for (std::size_t i = 0; i < value.size(); ++i) {
        JsonPath dp = field.index(i);
        require_object(value[i], dp);
        config.demonstrations.push_back(
            {get_string(require_field(value[i], "coarse", dp),
                        dp.field("coarse")),
             get_string(require_field(value[i], "refined", dp),
                        dp.field("refined"))});
      }
    } else if (key == "temperature") {
      config.temperature = get_number(value, field);
    } else if (key == "max_tokens") {
      config.max_tokens = static_cast<int>(get_int(value, field));
    } else if (key == "max_retries") {
      config.max_retries = static_cast<int>(get_int(value, field));
    } else if (key == "backoff_base_ms") {
      config.backoff_base = std::chrono::milliseconds(get_int(value, field));
    } else if (key == "request_timeout_ms") {
      config.request_timeout = std::chrono::milliseconds(get_int(value, field));
    } else if (key == "max_parallel") {
      config.max_parallel = static_cast<int>(get_int(value, field));
    } else if (key == "cache_dir") {
      config.cache_dir = get_string(value, field);
    } else if (key == "offline") {
      config.offline = get_bool(value, field);
    } else if (!key.starts_with("_")) {
      throw FormatError(field.str() + ": unknown refiner config field");
    }
  }
  validate_config(config);
  return config;
}

RefineConfig load_refine_config(const std::filesystem::path& path) {
  return parse_refine_config(read_file(path), path.string());
}

std::string_view refine_source_name(RefineSource source) {
  switch (source) {
    case RefineSource::kApi:
      return "api";
    case RefineSource::kCache:
      return "cache";
    case RefineSource::kOfflinePassthrough:
      return "offline_passthrough";
  }
  return "api";
}

std::string request_fingerprint(std::string_view coarse,
                                const RefineConfig& config) {
  // Length-prefixed fields so that shifting text between fields changes the
  // digest.
  std::string material;
  auto add = [&](std::string_view field) {
    material += std::to_string(field.size());
    material += ':';
    material += field;
    material += ';';
  };
  add(config.model_name);
  add(config.instruction);
  add(std::to_string(config.demonstrations.size()));
  for (const auto& demo : config.demonstrations) {
    add(demo.coarse);
    add(demo.refined);
  }
  add(coarse);

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(material.data(), material.size(), digest, &length,
                 EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

std::string build_refine_prompt(std::string_view coarse,
                                const RefineConfig& config) {
  std::string prompt = config.instruction;
  prompt += "\n\n";
  for (const auto& demo : config.demonstrations) {
    prompt += "Dialogue: " + demo.coarse + "\nNarration: " + demo.refined +
              "\n\n";
  }
  prompt += "Dialogue: ";
  prompt += coarse;
  prompt += "\nNarration:";
  return prompt;
}

std::string strip_speaker_tags(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string token;
  std::string out;
  while (in >> token) {
    if (token == "system:" || token == "user:") continue;
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

RefineResult refine_one(std::string_view coarse, const RefineConfig& config) {
  if (trim(coarse).empty()) {
    throw ValidationError("cannot refine an empty explanation");
  }
  RefineResult result;
  result.coarse = std::string(coarse);
  result.request_fingerprint = request_fingerprint(coarse, config);
  if (config.offline) {
    result.refined = strip_speaker_tags(coarse);
    if (result.refined.empty()) {
      throw EmptyCompletionError("explanation holds only speaker tags");
    }
    result.source = RefineSource::kOfflinePassthrough;
    return result;
  }
  const std::filesystem::path cache_file =
      config.cache_dir / result.request_fingerprint;
  if (auto cached = read_cache(cache_file)) {
    result.refined = std::move(*cached);
    result.source = RefineSource::kCache;
    return result;
  }
  result.refined = request_completion(build_refine_prompt(coarse, config), config);
  result.source = RefineSource::kApi;
  std::error_code ec;
  std::filesystem::create_directories(config.cache_dir, ec);
  if (ec) {
    throw IoError("cannot create cache directory " + config.cache_dir.string() +
                  ": " + ec.message());
  }
  write_file_atomic(cache_file, result.refined);
  return result;
}

BatchOutcome refine_batch(std::vector<CoTExample> examples,
                          const RefineConfig& config,
                          const BatchOptions& options) {
  validate_config(config);
  BatchOutcome outcome;

  // Unique coarse texts, each refined once.
  std::vector<std::string> jobs;
  std::map<std::string, std::size_t, std::less<>> job_of;
  std::vector<std::ptrdiff_t> job_for_example(examples.size(), -1);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const CoTExample& e = examples[i];
    const bool selected =
        !options.splits || options.splits->contains(e.meta.split);
    if (e.explanation_kind != ExplanationKind::kCoarse ||
        e.explanation.empty() || !selected) {
      ++outcome.untouched;
      continue;
    }
    auto [it, inserted] = job_of.try_emplace(e.explanation, jobs.size());
    if (inserted) jobs.push_back(e.explanation);
    job_for_example[i] = static_cast<std::ptrdiff_t>(it->second);
  }

  std::vector<std::optional<RefineResult>> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next.fetch_add(1); k < jobs.size();
         k = next.fetch_add(1)) {
      try {
        results[k] = refine_one(jobs[k], config);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  const std::size_t n_workers =
      config.offline
          ? 1
          : std::min<std::size_t>(static_cast<std::size_t>(config.max_parallel),
                                  jobs.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  for (std::size_t k = 0; k < jobs.size(); ++k) {
    if (!results[k]) continue;
    switch (results[k]->source) {
      case RefineSource::kApi:
        ++outcome.from_api;
        break;
      case RefineSource::kCache:
        ++outcome.from_cache;
        break;
      case RefineSource::kOfflinePassthrough:
        ++outcome.offline;
        break;
    }
  }
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (job_for_example[i] < 0) continue;
    const auto k = static_cast<std::size_t>(job_for_example[i]);
    if (results[k]) {
      examples[i].explanation = results[k]->refined;
      examples[i].explanation_kind = ExplanationKind::kRefined;
    } else {
      outcome.failures.push_back({examples[i].example_id, errors[k]});
    }
  }
  outcome.examples = std::move(examples);
  return outcome;
}

}  // namespace cote
