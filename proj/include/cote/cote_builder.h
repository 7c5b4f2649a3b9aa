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

#ifndef COTE_COTE_BUILDER_H_
#define COTE_COTE_BUILDER_H_

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cote/chains.h"
#include "cote/corpus.h"
#include "cote/normalize.h"

namespace cote {

// Separates the slot value from its explanation in a training target.
inline constexpr std::string_view kTargetSeparator = " | ";

inline constexpr std::string_view kDefaultTemplateText =
    "Dialogue: [History] Domain: [Domain] Question: [Question] [Choices]";

// Prompt text with [History], [Domain], [Question] and [Choices]
// placeholders. [History] and [Question] must appear exactly once,
// [Choices] at most once.
class PromptTemplate {
 public:
  PromptTemplate() : PromptTemplate(std::string(kDefaultTemplateText)) {}
  // Throws ValidationError.
  explicit PromptTemplate(std::string template_text,
                          std::string choices_section_marker = "Choices");

  const std::string& text() const { return text_; }
  const std::string& choices_marker() const { return choices_marker_; }

 private:
  std::string text_;
  std::string choices_marker_;
};

// A plain-text template file, or a JSON object
// {template_text, choices_section_marker?}.
PromptTemplate load_template(const std::filesystem::path& path);

// slot_id -> hand-written question.
using QuestionOverrides = std::map<std::string, std::string, std::less<>>;

// JSON object slot_id -> question; keys must resolve in `schema`.
QuestionOverrides load_overrides(const std::filesystem::path& path,
                                 const Schema& schema);

enum class ExplanationKind { kCoarse, kRefined, kNone };

std::string_view explanation_kind_name(ExplanationKind kind);
ExplanationKind parse_explanation_kind(std::string_view text);

struct ExampleMeta {
  std::string dialogue_id;
  Split split = Split::kTrain;
  int query_turn = 0;
  std::string slot_id;
  int step_count = 0;
  int dialogue_turns = 0;
  double avg_utterance_len = 0.0;  // whitespace tokens

  friend bool operator==(const ExampleMeta&, const ExampleMeta&) = default;
};

struct CoTExample {
  std::string example_id;
  std::string input_text;
  std::string target_value;
  std::string explanation;
  ExplanationKind explanation_kind = ExplanationKind::kNone;
  ExampleMeta meta;

  friend bool operator==(const CoTExample&, const CoTExample&) = default;
};

// "What's <description>?" unless the slot has an override. One trailing
// period is dropped from the description first.
std::string build_question(const SlotSchema& slot,
                           const QuestionOverrides& overrides);

// "system: <a_1> user: <u_1> ... system: <a_t> user: <u_t>".
std::string render_history(const Dialogue& dialogue, int query_turn);

// "Choices: v1, v2, ..., none" for categorical slots, empty otherwise.
std::string render_choices(const SlotSchema& slot,
                           const PromptTemplate& prompt_template);

// Throws TurnOutOfRangeError.
std::string render_prompt(const Dialogue& dialogue, int query_turn,
                          const SlotSchema& slot,
                          const PromptTemplate& prompt_template,
                          const QuestionOverrides& overrides);

// Utterance pairs of the chain's change turns in chronological order.
// Throws EmptyChainError.
std::string build_coarse_explanation(const SlotChain& chain,
                                     const Dialogue& dialogue);

std::string render_target(std::string_view value, std::string_view explanation);

// True when parse_generation(render_target(value, e)) gives back `value`:
// no surrounding whitespace and no separator starting inside the value
// ("a |" fails, since "a | | e" splits after "a").
bool is_unambiguous_value(std::string_view value);

struct Generation {
  std::string value;
  std::string explanation;

  friend bool operator==(const Generation&, const Generation&) = default;
};

// Splits at the first separator; both halves trimmed. Throws
// EmptyGenerationError on whitespace-only input.
Generation parse_generation(std::string_view text);

struct BuildOptions {
  bool include_explanations = true;
  bool include_inactive = false;
  // Restrict to one split; all splits when absent.
  std::optional<Split> split;
  NormalizationPolicy policy;
};

// Emits examples ordered by (dialogue_id, turn, slot_id).
void for_each_example(const Corpus& corpus,
                      const PromptTemplate& prompt_template,
                      const QuestionOverrides& overrides,
                      const BuildOptions& options,
                      const std::function<void(CoTExample&&)>& sink);

std::vector<CoTExample> build_dataset(const Corpus& corpus,
                                      const PromptTemplate& prompt_template,
                                      const QuestionOverrides& overrides,
                                      const BuildOptions& options);

// Value followed by explanation, as the trainer consumes it.
inline std::string target_text(const CoTExample& example) {
  return render_target(example.target_value, example.explanation);
}

// One JSON object per line, no trailing newline.
std::string example_to_json(const CoTExample& example);
// Throws FormatError prefixed with `where`.
CoTExample example_from_json(std::string_view line, std::string_view where);

std::vector<CoTExample> read_examples(const std::filesystem::path& path);
std::string examples_to_jsonl(const std::vector<CoTExample>& examples);
void write_examples(const std::vector<CoTExample>& examples,
                    const std::filesystem::path& path);

}  // namespace cote

#endif  // COTE_COTE_BUILDER_H_
