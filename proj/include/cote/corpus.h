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

#ifndef COTE_CORPUS_H_
#define COTE_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cote {

enum class Split { kTrain, kDev, kTest };

std::string_view split_name(Split split);

// Accepts "train", "dev" and the common aliases "valid", "validate",
// "validation". Throws FormatError otherwise.
Split parse_split(std::string_view text);

// One trackable slot: domain, name, natural-language description and, for
// categorical slots, the closed set of values in schema order.
struct SlotSchema {
  std::string slot_id;  // "<domain>-<name>"
  std::string domain;
  std::string name;
  std::string description;
  std::optional<std::vector<std::string>> possible_values;

  bool is_categorical() const {
    return possible_values.has_value() && !possible_values->empty();
  }

  friend bool operator==(const SlotSchema&, const SlotSchema&) = default;
};

// Ordered slot list with a lookup index. Construction validates every
// invariant and throws ValidationError on the first violation.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<SlotSchema> slots);

  const std::vector<SlotSchema>& slots() const { return slots_; }
  const std::set<std::string>& domains() const { return domains_; }
  std::size_t size() const { return slots_.size(); }

  const SlotSchema* find(std::string_view slot_id) const;
  // Throws UnknownSlotError.
  const SlotSchema& at(std::string_view slot_id) const;
  bool contains(std::string_view slot_id) const {
    return find(slot_id) != nullptr;
  }

  Schema without_domains(const std::set<std::string>& excluded) const;

  friend bool operator==(const Schema& a, const Schema& b) {
    return a.slots_ == b.slots_;
  }

 private:
  std::vector<SlotSchema> slots_;
  std::set<std::string> domains_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Cumulative dialogue state after a turn. Ordered so that serialization is
// byte-stable.
using DialogueState = std::map<std::string, std::string, std::less<>>;

struct TurnPair {
  int index = 0;  // 1-based
  std::string system_utterance;  // may be empty on the first turn
  std::string user_utterance;
  DialogueState gold_state;

  friend bool operator==(const TurnPair&, const TurnPair&) = default;
};

struct Dialogue {
  std::string dialogue_id;
  Split split = Split::kTrain;
  std::vector<TurnPair> turns;

  int num_turns() const { return static_cast<int>(turns.size()); }
  // 1-based access; throws TurnOutOfRangeError.
  const TurnPair& turn(int index) const;

  friend bool operator==(const Dialogue&, const Dialogue&) = default;
};

struct SplitCounts {
  std::size_t train = 0;
  std::size_t dev = 0;
  std::size_t test = 0;

  std::size_t total() const { return train + dev + test; }
  std::size_t& operator[](Split split);
  std::size_t operator[](Split split) const;

  friend bool operator==(const SplitCounts&, const SplitCounts&) = default;
};

struct Corpus {
  Schema schema;
  std::vector<Dialogue> dialogues;
  std::string name;

  SplitCounts split_counts() const;
  const Dialogue* find(std::string_view dialogue_id) const;
  std::vector<const Dialogue*> dialogues_in(Split split) const;

  // Structural equality over schema and dialogues. The name is a label and
  // does not participate.
  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.schema == b.schema && a.dialogues == b.dialogues;
  }
};

// Mean whitespace-token count over all 2N utterances of the dialogue
// (system and user, empty system openers count as zero tokens).
double average_utterance_length(const Dialogue& dialogue);

// Throws ValidationError naming the first violated invariant: turn numbering,
// non-empty user utterances, state referential integrity, unique ids.
void validate_dialogue(const Dialogue& dialogue, const Schema& schema);
void validate_corpus(const Corpus& corpus);

// Canonical schema file: JSON array of
// {slot_id, domain, name, description, possible_values?}. A service-list
// schema (the layout shipped with MultiWOZ 2.2 and SGD) is also recognised
// and converted on load.
Schema load_schema(const std::filesystem::path& path);
Schema parse_schema(std::string_view json_text, std::string_view origin);
std::string serialize_schema(const Schema& schema);
void save_schema(const Schema& schema, const std::filesystem::path& path);

// Loads canonical dialogue files, drops excluded domains from the schema and
// from every gold state, and drops dialogues whose annotations all belonged
// to excluded domains. The returned corpus carries the reduced schema.
Corpus load_corpus(const std::vector<std::filesystem::path>& dialogue_paths,
                   const Schema& schema,
                   const std::set<std::string>& exclude_domains = {});

std::vector<Dialogue> parse_dialogues(std::string_view json_text,
                                      std::string_view origin);

// Applies the domain exclusion rule to an already-built corpus.
Corpus exclude_domains(Corpus corpus, const std::set<std::string>& excluded);

// Concatenates corpora sharing one schema; throws ValidationError on a
// schema mismatch or a dialogue_id collision.
Corpus merge_corpora(std::vector<Corpus> parts, std::string name);

std::string serialize_dialogues(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Reads a whole file; throws IoError.
std::string read_file(const std::filesystem::path& path);
// Writes through a temporary sibling and renames it into place; throws
// IoError.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace cote

#endif  // COTE_CORPUS_H_
