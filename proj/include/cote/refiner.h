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

#ifndef COTE_REFINER_H_
#define COTE_REFINER_H_

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cote/corpus.h"
#include "cote/cote_builder.h"

namespace cote {

inline constexpr std::string_view kDefaultInstruction =
    "Rewrite the following dialogue snippet as a single third-person "
    "narration, preserving all entities and values.";

struct Demonstration {
  std::string coarse;
  std::string refined;

  friend bool operator==(const Demonstration&, const Demonstration&) = default;
};

struct RefineConfig {
  // Completion endpoint: POST {model, prompt, temperature, max_tokens}.
  std::string endpoint_url = "https://api.openai.com/v1/completions";
  std::string model_name = "gpt-3.5-turbo-instruct";
  std::string api_key_env_var = "COTE_API_KEY";
  std::string instruction = std::string(kDefaultInstruction);
  std::vector<Demonstration> demonstrations;
  double temperature = 0.0;
  int max_tokens = 256;
  int max_retries = 5;
  std::chrono::milliseconds backoff_base{500};
  std::chrono::milliseconds request_timeout{60000};
  int max_parallel = 4;
  std::filesystem::path cache_dir = ".cote_cache";
  bool offline = false;
};

// Throws ValidationError.
void validate_config(const RefineConfig& config);

// JSON object with the RefineConfig field names; durations as
// backoff_base_ms / request_timeout_ms. Missing fields keep defaults.
RefineConfig load_refine_config(const std::filesystem::path& path);
RefineConfig parse_refine_config(std::string_view json_text,
                                 std::string_view origin);

enum class RefineSource { kApi, kCache, kOfflinePassthrough };

std::string_view refine_source_name(RefineSource source);

struct RefineResult {
  std::string coarse;
  std::string refined;
  RefineSource source = RefineSource::kApi;
  std::string request_fingerprint;
};

// Hex SHA-256 over model name, instruction, demonstrations and the coarse
// text. Names the cache file.
std::string request_fingerprint(std::string_view coarse,
                                const RefineConfig& config);

// Instruction, demonstrations, then the coarse text awaiting its narration.
std::string build_refine_prompt(std::string_view coarse,
                                const RefineConfig& config);

// Drops "system:" / "user:" speaker tokens and rejoins with single spaces.
std::string strip_speaker_tags(std::string_view text);

// Cache hit, else one completion request with retries; offline mode strips
// speaker tags instead. Throws NetworkError, AuthError,
// EmptyCompletionError.
RefineResult refine_one(std::string_view coarse, const RefineConfig& config);

struct RefineFailure {
  std::string example_id;
  std::string error;
};

struct BatchOutcome {
  std::vector<CoTExample> examples;  // same order as the input
  std::vector<RefineFailure> failures;
  std::size_t from_api = 0;
  std::size_t from_cache = 0;
  std::size_t offline = 0;
  std::size_t untouched = 0;

  bool partial_failure() const { return !failures.empty(); }
};

struct BatchOptions {
  // Splits whose examples are refined; every split when absent.
  std::optional<std::set<Split>> splits;
};

// Replaces coarse explanations with refined ones, at most max_parallel
// requests in flight. Identical coarse texts are refined once. Examples that
// are not coarse, have no explanation or fall outside the selected splits
// pass through unchanged, as do examples whose refinement failed (those also
// get a failure record).
BatchOutcome refine_batch(std::vector<CoTExample> examples,
                          const RefineConfig& config,
                          const BatchOptions& options = {});

}  // namespace cote

#endif  // COTE_REFINER_H_
