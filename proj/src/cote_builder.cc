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

#include "cote/cote_builder.h"

#include <algorithm>
#include <array>
#include <sstream>

#include "cote/error.h"
#include "json_util.h"

namespace cote {
namespace {

constexpr std::string_view kHistory = "[History]";
constexpr std::string_view kDomain = "[Domain]";
constexpr std::string_view kQuestion = "[Question]";
constexpr std::string_view kChoices = "[Choices]";

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
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

void append_pair(std::string& out, const TurnPair& turn) {
  if (!out.empty()) out += ' ';
  out += "system:";
  if (!turn.system_utterance.empty()) {
    out += ' ';
    out += turn.system_utterance;
  }
  out += " user: ";
  out += turn.user_utterance;
}

}  // namespace

PromptTemplate::PromptTemplate(std::string template_text,
                               std::string choices_section_marker)
    : text_(std::move(template_text)),
      choices_marker_(std::move(choices_section_marker)) {
  if (count_occurrences(text_, kHistory) != 1) {
    throw ValidationError("template must contain [History] exactly once");
  }
  if (count_occurrences(text_, kQuestion) != 1) {
    throw ValidationError("template must contain [Question] exactly once");
  }
  if (count_occurrences(text_, kChoices) > 1) {
    throw ValidationError("template may contain [Choices] at most once");
  }
  if (choices_marker_.empty()) {
    throw ValidationError("choices section marker must not be empty");
  }
}

PromptTemplate load_template(const std::filesystem::path& path) {
  std::string text = read_file(path);
  std::string_view body = trim(text);
  if (!body.empty() && body.front() == '{') {
    ordered_json j = parse_json(text, path.string());
    JsonPath root(path.string());
    require_object(j, root);
    std::string template_text =
        get_string(require_field(j, "template_text", root),
                   root.field("template_text"));
    std::string marker = "Choices";
    if (auto it = j.find("choices_section_marker"); it != j.end()) {
      marker = get_string(*it, root.field("choices_section_marker"));
    }
    return PromptTemplate(std::move(template_text), std::move(marker));
  }
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
    text.pop_back();
  }
  return PromptTemplate(std::move(text));
}

QuestionOverrides load_overrides(const std::filesystem::path& path,
                                 const Schema& schema) {
  ordered_json j = parse_json(read_file(path), path.string());
  JsonPath root(path.string());
  require_object(j, root);
  QuestionOverrides overrides;
  for (const auto& [slot_id, question] : j.items()) {
    JsonPath field = root.field(slot_id);
    if (!schema.contains(slot_id)) {
      throw ValidationError(field.str() + ": override for unknown slot");
    }
    overrides[slot_id] = get_string(question, field);
  }
  return overrides;
}

std::string_view explanation_kind_name(ExplanationKind kind) {
  switch (kind) {
    case ExplanationKind::kCoarse:
      return "coarse";
    case ExplanationKind::kRefined:
      return "refined";
    case ExplanationKind::kNone:
      return "none";
  }
  return "none";
}

ExplanationKind parse_explanation_kind(std::string_view text) {
  if (text == "coarse") return ExplanationKind::kCoarse;
  if (text == "refined") return ExplanationKind::kRefined;
  if (text == "none") return ExplanationKind::kNone;
  throw FormatError("unknown explanation kind \"" + std::string(text) + "\"");
}

std::string build_question(const SlotSchema& slot,
                           const QuestionOverrides& overrides) {
  if (auto it = overrides.find(slot.slot_id); it != overrides.end()) {
    return it->second;
  }
  std::string_view description = trim(slot.description);
  if (description.empty()) description = slot.name;
  if (description.back() == '.') {
    description.remove_suffix(1);
    description = trim(description);
  }
  std::string question = "What's " + std::string(description);
  if (question.back() != '?') question += '?';
  return question;
}

std::string render_history(const Dialogue& dialogue, int query_turn) {
  dialogue.turn(query_turn);
  std::string out;
  for (int t = 1; t <= query_turn; ++t) append_pair(out, dialogue.turn(t));
  return out;
}

std::string render_choices(const SlotSchema& slot,
                           const PromptTemplate& prompt_template) {
  if (!slot.is_categorical()) return "";
  std::string out = prompt_template.choices_marker() + ": ";
  bool has_none = false;
  for (std::size_t i = 0; i < slot.possible_values->size(); ++i) {
    const std::string& value = (*slot.possible_values)[i];
    if (i > 0) out += ", ";
    out += value;
    has_none = has_none || normalize_value(value) == kNoneValue;
  }
  if (!has_none) {
    out += ", ";
    out += kNoneValue;
  }
  return out;
}

std::string render_prompt(const Dialogue& dialogue, int query_turn,
                          const SlotSchema& slot,
                          const PromptTemplate& prompt_template,
                          const QuestionOverrides& overrides) {
  const std::string history = render_history(dialogue, query_turn);
  const std::string question = build_question(slot, overrides);
  const std::string choices = render_choices(slot, prompt_template);
  const std::string& text = prompt_template.text();

  std::string out;
  out.reserve(text.size() + history.size() + question.size() + choices.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == '[') {
      std::string_view rest(text.data() + pos, text.size() - pos);
      if (rest.starts_with(kHistory)) {
        out += history;
        pos += kHistory.size();
        continue;
      }
      if (rest.starts_with(kDomain)) {
        out += slot.domain;
        pos += kDomain.size();
        continue;
      }
      if (rest.starts_with(kQuestion)) {
        out += question;
        pos += kQuestion.size();
        continue;
      }
      if (rest.starts_with(kChoices)) {
        // An absent block takes one separating space with it.
        if (choices.empty() && !out.empty() && out.back() == ' ') {
          out.pop_back();
        }
        out += choices;
        pos += kChoices.size();
        continue;
      }
    }
    out += text[pos++];
  }
  return out;
}

std::string build_coarse_explanation(const SlotChain& chain,
                                     const Dialogue& dialogue) {
  if (chain.empty()) {
    throw EmptyChainError("slot \"" + chain.slot_id + "\" has no changes in \"" +
                          chain.dialogue_id + "\" up to turn " +
                          std::to_string(chain.query_turn));
  }
  if (chain.dialogue_id != dialogue.dialogue_id) {
    throw ValidationError("chain of \"" + chain.dialogue_id +
                          "\" applied to dialogue \"" + dialogue.dialogue_id +
                          "\"");
  }
  std::string out;
  for (int t : chain.change_turns) append_pair(out, dialogue.turn(t));
  return out;
}

std::string render_target(std::string_view value,
                          std::string_view explanation) {
  std::string out(value);
  if (!explanation.empty()) {
    out += kTargetSeparator;
    out += explanation;
  }
  return out;
}

bool is_unambiguous_value(std::string_view value) {
  if (value.empty() || trim(value) != value) return false;
  std::string joined(value);
  joined += kTargetSeparator;
  return joined.find(kTargetSeparator) == value.size();
}

Generation parse_generation(std::string_view text) {
  if (trim(text).empty()) {
    throw EmptyGenerationError("generation is empty or whitespace-only");
  }
  std::size_t pos = text.find(kTargetSeparator);
  if (pos == std::string_view::npos) return {std::string(trim(text)), ""};
  return {std::string(trim(text.substr(0, pos))),
          std::string(trim(text.substr(pos + kTargetSeparator.size())))};
}

void for_each_example(const Corpus& corpus,
                      const PromptTemplate& prompt_template,
                      const QuestionOverrides& overrides,
                      const BuildOptions& options,
                      const std::function<void(CoTExample&&)>& sink) {
  std::vector<const Dialogue*> dialogues;
  for (const auto& d : corpus.dialogues) {
    if (!options.split || d.split == *options.split) dialogues.push_back(&d);
  }
  std::sort(dialogues.begin(), dialogues.end(),
            [](const Dialogue* a, const Dialogue* b) {
              return a->dialogue_id < b->dialogue_id;
            });
  std::vector<const SlotSchema*> slots;
  for (const auto& slot : corpus.schema.slots()) slots.push_back(&slot);
  std::sort(slots.begin(), slots.end(),
            [](const SlotSchema* a, const SlotSchema* b) {
              return a->slot_id < b->slot_id;
            });

  for (const Dialogue* dialogue : dialogues) {
    const double avg_len = average_utterance_length(*dialogue);
    for (int t = 1; t <= dialogue->num_turns(); ++t) {
      const TurnPair& turn = dialogue->turn(t);
      for (const SlotSchema* slot : slots) {
        auto gold = turn.gold_state.find(slot->slot_id);
        const bool active = gold != turn.gold_state.end() &&
                            !is_none_value(gold->second, options.policy);
        if (!active && !options.include_inactive) continue;
        SlotChain chain = extract_chain(*dialogue, corpus.schema,
                                        slot->slot_id, t, options.policy);
        CoTExample example;
        example.example_id =
            dialogue->dialogue_id + ":" + std::to_string(t) + ":" +
            slot->slot_id;
        example.input_text =
            render_prompt(*dialogue, t, *slot, prompt_template, overrides);
        example.target_value =
            active ? gold->second : std::string(kNoneValue);
        if (active && options.include_explanations) {
          example.explanation = build_coarse_explanation(chain, *dialogue);
          example.explanation_kind = ExplanationKind::kCoarse;
        }
        example.meta.dialogue_id = dialogue->dialogue_id;
        example.meta.split = dialogue->split;
        example.meta.query_turn = t;
        example.meta.slot_id = slot->slot_id;
        example.meta.step_count = reasoning_steps(chain);
        example.meta.dialogue_turns = dialogue->num_turns();
        example.meta.avg_utterance_len = avg_len;
        sink(std::move(example));
      }
    }
  }
}

std::vector<CoTExample> build_dataset(const Corpus& corpus,
                                      const PromptTemplate& prompt_template,
                                      const QuestionOverrides& overrides,
                                      const BuildOptions& options) {
  std::vector<CoTExample> out;
  for_each_example(corpus, prompt_template, overrides, options,
                   [&](CoTExample&& e) { out.push_back(std::move(e)); });
  return out;
}

std::string example_to_json(const CoTExample& example) {
  ordered_json j;
  j["example_id"] = example.example_id;
  j["input_text"] = example.input_text;
  j["target_value"] = example.target_value;
  j["explanation"] = example.explanation;
  j["explanation_kind"] = std::string(explanation_kind_name(example.explanation_kind));
  j["target_text"] = target_text(example);
  ordered_json meta;
  meta["dialogue_id"] = example.meta.dialogue_id;
  meta["split"] = std::string(split_name(example.meta.split));
  meta["query_turn"] = example.meta.query_turn;
  meta["slot_id"] = example.meta.slot_id;
  meta["step_count"] = example.meta.step_count;
  meta["dialogue_turns"] = example.meta.dialogue_turns;
  meta["avg_utterance_len"] = example.meta.avg_utterance_len;
  j["meta"] = std::move(meta);
  return j.dump();
}

CoTExample example_from_json(std::string_view line, std::string_view where) {
  ordered_json j = parse_json(line, where);
  JsonPath root(where);
  require_object(j, root);
  auto str = [&](const ordered_json& obj, std::string_view key,
                 const JsonPath& path) {
    return get_string(require_field(obj, key, path), path.field(key));
  };
  CoTExample e;
  e.example_id = str(j, "example_id", root);
  e.input_text = str(j, "input_text", root);
  e.target_value = str(j, "target_value", root);
  e.explanation = str(j, "explanation", root);
  try {
    e.explanation_kind =
        parse_explanation_kind(str(j, "explanation_kind", root));
  } catch (const FormatError& err) {
    throw FormatError(root.field("explanation_kind").str() + ": " + err.what());
  }
  JsonPath mp = root.field("meta");
  const ordered_json& meta = require_field(j, "meta", root);
  require_object(meta, mp);
  e.meta.dialogue_id = str(meta, "dialogue_id", mp);
  try {
    e.meta.split = parse_split(str(meta, "split", mp));
  } catch (const FormatError& err) {
    throw FormatError(mp.field("split").str() + ": " + err.what());
  }
  e.meta.query_turn = static_cast<int>(
      get_int(require_field(meta, "query_turn", mp), mp.field("query_turn")));
  e.meta.slot_id = str(meta, "slot_id", mp);
  e.meta.step_count = static_cast<int>(
      get_int(require_field(meta, "step_count", mp), mp.field("step_count")));
  e.meta.dialogue_turns = static_cast<int>(get_int(
      require_field(meta, "dialogue_turns", mp), mp.field("dialogue_turns")));
  e.meta.avg_utterance_len =
      get_number(require_field(meta, "avg_utterance_len", mp),
                 mp.field("avg_utterance_len"));
  if (e.target_value.empty()) {
    throw ValidationError(root.str() + ": empty target_value");
  }
  return e;
}

std::vector<CoTExample> read_examples(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<CoTExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    out.push_back(example_from_json(
        line, path.string() + ":" + std::to_string(line_no)));
  }
  return out;
}

std::string examples_to_jsonl(const std::vector<CoTExample>& examples) {
  std::string out;
  for (const auto& e : examples) {
    out += example_to_json(e);
    out += '\n';
  }
  return out;
}

void write_examples(const std::vector<CoTExample>& examples,
                    const std::filesystem::path& path) {
  write_file_atomic(path, examples_to_jsonl(examples));
}

}  // namespace cote
