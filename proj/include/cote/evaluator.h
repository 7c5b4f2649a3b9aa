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

#ifndef COTE_EVALUATOR_H_
#define COTE_EVALUATOR_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cote/corpus.h"
#include "cote/normalize.h"

namespace cote {

// One generated answer for one (dialogue, turn, slot).
struct PredictionRecord {
  std::string dialogue_id;
  int query_turn = 0;
  std::string slot_id;
  std::string generated_text;

  friend bool operator==(const PredictionRecord&,
                         const PredictionRecord&) = default;
};

// JSONL, one {dialogue_id, turn, slot_id, text} per line. Errors name the
// 1-based line number.
std::vector<PredictionRecord> parse_predictions(std::string_view text,
                                                std::string_view origin);
std::vector<PredictionRecord> load_predictions(
    const std::filesystem::path& path);

enum class BucketAxis { kStep, kTurn, kLen };

std::string_view axis_name(BucketAxis axis);
BucketAxis parse_axis(std::string_view text);

// Half-open [lo, hi); hi absent means open-ended.
struct BucketRange {
  double lo = 0.0;
  std::optional<double> hi;
  std::string label;

  bool contains(double value) const {
    return value >= lo && (!hi || value < *hi);
  }

  friend bool operator==(const BucketRange&, const BucketRange&) = default;
};

// Label for integer edges: "3" for [3,4), "10-14" for [10,15), "20+" for
// [20, open). Other edges render as "[lo,hi)".
std::string default_bucket_label(double lo, std::optional<double> hi);

struct BucketSpec {
  BucketAxis axis = BucketAxis::kStep;
  std::vector<BucketRange> ranges;

  friend bool operator==(const BucketSpec&, const BucketSpec&) = default;
};

// Ranges must start at 0, be contiguous and ascending, and end open.
// Throws ValidationError.
void validate_bucket_spec(const BucketSpec& spec);

// Either one {axis, edges: [[lo, hi], ...], labels?} object or an array of
// them; `hi` null marks the open-ended range.
std::vector<BucketSpec> parse_bucket_specs(std::string_view json_text,
                                           std::string_view origin);
std::vector<BucketSpec> load_bucket_specs(const std::filesystem::path& path);
std::string bucket_specs_to_json(const std::vector<BucketSpec>& specs);

// Bundled defaults: "multiwoz22", "m2m", "woz2".
std::vector<BucketSpec> bucket_preset(std::string_view dataset);

using TurnKey = std::pair<std::string, int>;  // (dialogue_id, turn)

// Bucket value of a turn on an axis: the maximum reasoning-step count over
// slots (step), the dialogue's turn count (turn), or its mean utterance
// length in whitespace tokens (len).
double axis_value(const Dialogue& dialogue, int turn, BucketAxis axis,
                  const NormalizationPolicy& policy = {});

// Maps every turn of the corpus to the index of its range in `spec`.
std::map<TurnKey, std::size_t> bucketize(const Corpus& corpus,
                                         const BucketSpec& spec,
                                         const NormalizationPolicy& policy = {});

struct BucketResult {
  BucketRange range;
  std::size_t n_turns = 0;
  std::size_t n_correct = 0;
  // Absent for an empty bucket.
  std::optional<double> jga;

  friend bool operator==(const BucketResult&, const BucketResult&) = default;
};

struct AxisReport {
  BucketAxis axis = BucketAxis::kStep;
  std::vector<BucketResult> buckets;

  friend bool operator==(const AxisReport&, const AxisReport&) = default;
};

struct EvalReport {
  double overall_jga = 0.0;
  std::size_t n_dialogues = 0;
  std::size_t n_turns = 0;
  std::size_t n_correct = 0;
  // (turn, slot) pairs with no prediction, scored as "none".
  std::size_t n_missing_predictions = 0;
  std::vector<AxisReport> per_bucket;
  NormalizationPolicy policy;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Per dialogue (corpus order), per turn: whether every schema slot matched.
// Throws DuplicatePredictionError, UnknownDialogueError, UnknownSlotError,
// TurnOutOfRangeError.
std::vector<std::vector<bool>> score_turns(
    const Corpus& corpus, const std::vector<PredictionRecord>& predictions,
    const NormalizationPolicy& policy, std::size_t* missing = nullptr);

EvalReport compute_jga(const Corpus& corpus,
                       const std::vector<PredictionRecord>& predictions,
                       const NormalizationPolicy& policy = {});

EvalReport fine_grained_report(const Corpus& corpus,
                               const std::vector<PredictionRecord>& predictions,
                               const NormalizationPolicy& policy,
                               const std::vector<BucketSpec>& specs);

// ceil(fraction * n) clamped to [1, n].
std::size_t low_resource_count(double fraction, std::size_t n);

// Keeps a seeded random subset of whole train dialogues; dev and test are
// untouched. Throws InvalidFractionError for a fraction outside (0, 1] and
// ValidationError for an empty train split.
Corpus low_resource_sample(const Corpus& corpus, double fraction,
                           std::uint64_t seed);

enum class ReportFormat { kJson, kMarkdown, kCsv };

ReportFormat parse_report_format(std::string_view text);
std::string render_report(const EvalReport& report, ReportFormat format);
void emit_report(const EvalReport& report, ReportFormat format,
                 const std::filesystem::path& path);
EvalReport parse_report(std::string_view json_text, std::string_view origin);

}  // namespace cote

#endif  // COTE_EVALUATOR_H_
