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

#include "cote/corpus.h"

#include <unistd.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <system_error>

#include "cote/error.h"
#include "cote/normalize.h"
#include "json_util.h"

namespace cote {

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kDev:
      return "dev";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "dev" || text == "valid" || text == "validate" ||
      text == "validation") {
    return Split::kDev;
  }
  if (text == "test") return Split::kTest;
  throw FormatError("unknown split \"" + std::string(text) + "\"");
}

// ---------------------------------------------------------------------------
// Schema

Schema::Schema(std::vector<SlotSchema> slots) : slots_(std::move(slots)) {
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    const SlotSchema& slot = slots_[i];
    if (slot.domain.empty() || slot.name.empty()) {
      throw ValidationError("slot #" + std::to_string(i) +
                            " has an empty domain or name");
    }
    if (slot.slot_id != slot.domain + "-" + slot.name) {
      throw ValidationError("slot_id \"" + slot.slot_id +
                            "\" does not equal domain-name \"" + slot.domain +
                            "-" + slot.name + "\"");
    }
    if (!index_.emplace(slot.slot_id, i).second) {
      throw ValidationError("duplicate slot_id \"" + slot.slot_id + "\"");
    }
    if (slot.possible_values) {
      std::set<std::string> seen;
      for (const auto& value : *slot.possible_values) {
        if (!seen.insert(normalize_value(value)).second) {
          throw ValidationError("slot \"" + slot.slot_id +
                                "\" lists possible value \"" + value +
                                "\" twice after normalization");
        }
      }
    }
    domains_.insert(slot.domain);
  }
}

const SlotSchema* Schema::find(std::string_view slot_id) const {
  auto it = index_.find(slot_id);
  return it == index_.end() ? nullptr : &slots_[it->second];
}

const SlotSchema& Schema::at(std::string_view slot_id) const {
  const SlotSchema* slot = find(slot_id);
  if (slot == nullptr) {
    throw UnknownSlotError("unknown slot \"" + std::string(slot_id) + "\"");
  }
  return *slot;
}

Schema Schema::without_domains(const std::set<std::string>& excluded) const {
  std::vector<SlotSchema> kept;
  for (const auto& slot : slots_) {
    if (!excluded.contains(slot.domain)) kept.push_back(slot);
  }
  return Schema(std::move(kept));
}

// ---------------------------------------------------------------------------
// Dialogue / Corpus

const TurnPair& Dialogue::turn(int index) const {
  if (index < 1 || index > num_turns()) {
    throw TurnOutOfRangeError("turn " + std::to_string(index) +
                              " outside 1.." + std::to_string(num_turns()) +
                              " in dialogue \"" + dialogue_id + "\"");
  }
  return turns[static_cast<std::size_t>(index - 1)];
}

std::size_t& SplitCounts::operator[](Split split) {
  switch (split) {
    case Split::kTrain:
      return train;
    case Split::kDev:
      return dev;
    case Split::kTest:
      return test;
  }
  return train;
}

std::size_t SplitCounts::operator[](Split split) const {
  return const_cast<SplitCounts&>(*this)[split];
}

SplitCounts Corpus::split_counts() const {
  SplitCounts counts;
  for (const auto& d : dialogues) ++counts[d.split];
  return counts;
}

const Dialogue* Corpus::find(std::string_view dialogue_id) const {
  for (const auto& d : dialogues) {
    if (d.dialogue_id == dialogue_id) return &d;
  }
  return nullptr;
}

std::vector<const Dialogue*> Corpus::dialogues_in(Split split) const {
  std::vector<const Dialogue*> out;
  for (const auto& d : dialogues) {
    if (d.split == split) out.push_back(&d);
  }
  return out;
}

double average_utterance_length(const Dialogue& dialogue) {
  if (dialogue.turns.empty()) return 0.0;
  auto count_tokens = [](const std::string& text) {
    std::istringstream in(text);
    std::size_t n = 0;
    std::string token;
    while (in >> token) ++n;
    return n;
  };
  std::size_t tokens = 0;
  for (const auto& turn : dialogue.turns) {
    tokens += count_tokens(turn.system_utterance);
    tokens += count_tokens(turn.user_utterance);
  }
  return static_cast<double>(tokens) /
         static_cast<double>(2 * dialogue.turns.size());
}

void validate_dialogue(const Dialogue& dialogue, const Schema& schema) {
  const std::string where = "dialogue \"" + dialogue.dialogue_id + "\"";
  if (dialogue.dialogue_id.empty()) {
    throw ValidationError("dialogue with empty dialogue_id");
  }
  if (dialogue.turns.empty()) throw ValidationError(where + " has no turns");
  for (std::size_t i = 0; i < dialogue.turns.size(); ++i) {
    const TurnPair& turn = dialogue.turns[i];
    const std::string at = where + " turn " + std::to_string(i + 1);
    if (turn.index != static_cast<int>(i) + 1) {
      throw ValidationError(at + ": index " + std::to_string(turn.index) +
                            " breaks the 1..N numbering");
    }
    if (turn.user_utterance.empty()) {
      throw ValidationError(at + ": empty user utterance");
    }
    for (const auto& [slot_id, value] : turn.gold_state) {
      if (!schema.contains(slot_id)) {
        throw ValidationError(at + ": state references unknown slot \"" +
                              slot_id + "\"");
      }
      if (value.empty()) {
        throw ValidationError(at + ": empty value for slot \"" + slot_id +
                              "\"");
      }
    }
  }
}

void validate_corpus(const Corpus& corpus) {
  std::set<std::string_view> ids;
  for (const auto& d : corpus.dialogues) {
    validate_dialogue(d, corpus.schema);
    if (!ids.insert(d.dialogue_id).second) {
      throw ValidationError("duplicate dialogue_id \"" + d.dialogue_id + "\"");
    }
  }
}

// ---------------------------------------------------------------------------
// I/O helpers

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path.string());
  return buffer.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents) {
  static std::atomic<unsigned> counter{0};
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("error while writing " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot move " + tmp.string() + " to " + path.string() +
                  ": " + ec.message());
  }
}

namespace {

std::string dump(const ordered_json& j) {
  try {
    return j.dump(2) + "\n";
  } catch (const nlohmann::json::type_error& e) {
    throw FormatError(std::string("cannot serialize: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Schema parsing

SlotSchema parse_canonical_slot(const ordered_json& j, const JsonPath& path) {
  require_object(j, path);
  SlotSchema slot;
  for (const auto& [key, value] : j.items()) {
    JsonPath field = path.field(key);
    if (key == "slot_id") {
      slot.slot_id = get_string(value, field);
    } else if (key == "domain") {
      slot.domain = get_string(value, field);
    } else if (key == "name") {
      slot.name = get_string(value, field);
    } else if (key == "description") {
      slot.description = get_string(value, field);
    } else if (key == "possible_values") {
      if (!value.is_null()) slot.possible_values = get_string_array(value, field);
    } else if (key != "is_categorical") {
      throw FormatError(field.str() + ": unknown schema field");
    }
  }
  require_field(j, "slot_id", path);
  require_field(j, "domain", path);
  require_field(j, "name", path);
  require_field(j, "description", path);
  if (j.contains("is_categorical")) {
    bool declared = get_bool(j["is_categorical"], path.field("is_categorical"));
    if (declared != slot.is_categorical()) {
      throw ValidationError(path.str() +
                            ": is_categorical disagrees with possible_values");
    }
  }
  return slot;
}

// Service-list layout: [{service_name, slots: [{name, description,
// is_categorical, possible_values}]}]. Slot names may carry the service as
// a prefix ("hotel-pricerange").
std::vector<SlotSchema> parse_service_schema(const ordered_json& j,
                                             const JsonPath& path) {
  std::vector<SlotSchema> slots;
  for (std::size_t s = 0; s < j.size(); ++s) {
    JsonPath service_path = path.index(s);
    const ordered_json& service = j[s];
    require_object(service, service_path);
    std::string domain = get_string(
        require_field(service, "service_name", service_path),
        service_path.field("service_name"));
    const ordered_json& raw_slots =
        require_field(service, "slots", service_path);
    JsonPath slots_path = service_path.field("slots");
    require_array(raw_slots, slots_path);
    for (std::size_t i = 0; i < raw_slots.size(); ++i) {
      JsonPath slot_path = slots_path.index(i);
      const ordered_json& raw = raw_slots[i];
      require_object(raw, slot_path);
      std::string name = get_string(require_field(raw, "name", slot_path),
                                    slot_path.field("name"));
      const std::string prefix = domain + "-";
      if (name.rfind(prefix, 0) == 0) name = name.substr(prefix.size());
      SlotSchema slot;
      slot.domain = domain;
      slot.name = name;
      slot.slot_id = domain + "-" + name;
      if (auto it = raw.find("description"); it != raw.end()) {
        slot.description = get_string(*it, slot_path.field("description"));
      }
      bool categorical = false;
      if (auto it = raw.find("is_categorical"); it != raw.end()) {
        categorical = get_bool(*it, slot_path.field("is_categorical"));
      }
      if (categorical) {
        std::vector<std::string> values;
        std::set<std::string> seen;
        if (auto it = raw.find("possible_values"); it != raw.end()) {
          for (auto& v :
               get_string_array(*it, slot_path.field("possible_values"))) {
            if (seen.insert(normalize_value(v)).second) values.push_back(v);
          }
        }
        if (!values.empty()) slot.possible_values = std::move(values);
      }
      slots.push_back(std::move(slot));
    }
  }
  return slots;
}

// ---------------------------------------------------------------------------
// Dialogue parsing

Dialogue parse_dialogue(const ordered_json& j, const JsonPath& path) {
  require_object(j, path);
  Dialogue d;
  d.dialogue_id = get_string(require_field(j, "dialogue_id", path),
                             path.field("dialogue_id"));
  {
    JsonPath split_path = path.field("split");
    std::string split = get_string(require_field(j, "split", path), split_path);
    try {
      d.split = parse_split(split);
    } catch (const FormatError& e) {
      throw FormatError(split_path.str() + ": " + e.what());
    }
  }
  JsonPath turns_path = path.field("turns");
  const ordered_json& turns = require_field(j, "turns", path);
  require_array(turns, turns_path);
  for (std::size_t i = 0; i < turns.size(); ++i) {
    JsonPath turn_path = turns_path.index(i);
    const ordered_json& t = turns[i];
    require_object(t, turn_path);
    TurnPair turn;
    turn.index = static_cast<int>(get_int(require_field(t, "index", turn_path),
                                          turn_path.field("index")));
    turn.system_utterance = get_string(require_field(t, "system", turn_path),
                                       turn_path.field("system"));
    turn.user_utterance = get_string(require_field(t, "user", turn_path),
                                     turn_path.field("user"));
    JsonPath state_path = turn_path.field("state");
    const ordered_json& state = require_field(t, "state", turn_path);
    require_object(state, state_path);
    for (const auto& [slot_id, value] : state.items()) {
      turn.gold_state[slot_id] = get_string(value, state_path.field(slot_id));
    }
    d.turns.push_back(std::move(turn));
  }
  return d;
}

}  // namespace

Schema parse_schema(std::string_view json_text, std::string_view origin) {
  ordered_json j = parse_json(json_text, origin);
  JsonPath path(origin);
  require_array(j, path);
  if (!j.empty() && j[0].is_object() && j[0].contains("service_name")) {
    return Schema(parse_service_schema(j, path));
  }
  std::vector<SlotSchema> slots;
  slots.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    slots.push_back(parse_canonical_slot(j[i], path.index(i)));
  }
  return Schema(std::move(slots));
}

Schema load_schema(const std::filesystem::path& path) {
  return parse_schema(read_file(path), path.string());
}

std::string serialize_schema(const Schema& schema) {
  ordered_json out = ordered_json::array();
  for (const auto& slot : schema.slots()) {
    ordered_json j;
    j["slot_id"] = slot.slot_id;
    j["domain"] = slot.domain;
    j["name"] = slot.name;
    j["description"] = slot.description;
    if (slot.possible_values) j["possible_values"] = *slot.possible_values;
    out.push_back(std::move(j));
  }
  return dump(out);
}

void save_schema(const Schema& schema, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_schema(schema));
}

std::vector<Dialogue> parse_dialogues(std::string_view json_text,
                                      std::string_view origin) {
  ordered_json j = parse_json(json_text, origin);
  JsonPath path(origin);
  require_array(j, path);
  std::vector<Dialogue> dialogues;
  dialogues.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    dialogues.push_back(parse_dialogue(j[i], path.index(i)));
  }
  return dialogues;
}

Corpus exclude_domains(Corpus corpus, const std::set<std::string>& excluded) {
  if (excluded.empty()) return corpus;
  Schema reduced = corpus.schema.without_domains(excluded);
  std::vector<Dialogue> kept;
  kept.reserve(corpus.dialogues.size());
  for (auto& d : corpus.dialogues) {
    bool annotated = false;
    bool retained_annotation = false;
    for (auto& turn : d.turns) {
      for (auto it = turn.gold_state.begin(); it != turn.gold_state.end();) {
        annotated = true;
        if (reduced.contains(it->first)) {
          retained_annotation = true;
          ++it;
        } else {
          it = turn.gold_state.erase(it);
        }
      }
    }
    if (annotated && !retained_annotation) continue;
    kept.push_back(std::move(d));
  }
  corpus.schema = std::move(reduced);
  corpus.dialogues = std::move(kept);
  validate_corpus(corpus);
  return corpus;
}

Corpus load_corpus(const std::vector<std::filesystem::path>& dialogue_paths,
                   const Schema& schema,
                   const std::set<std::string>& exclude) {
  Corpus corpus;
  corpus.schema = schema;
  if (!dialogue_paths.empty()) {
    corpus.name = dialogue_paths.front().stem().string();
  }
  for (const auto& path : dialogue_paths) {
    auto parsed = parse_dialogues(read_file(path), path.string());
    for (auto& d : parsed) corpus.dialogues.push_back(std::move(d));
  }
  validate_corpus(corpus);
  return exclude_domains(std::move(corpus), exclude);
}

Corpus merge_corpora(std::vector<Corpus> parts, std::string name) {
  Corpus merged;
  merged.name = std::move(name);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i == 0) {
      merged.schema = parts[i].schema;
    } else if (!(parts[i].schema == merged.schema)) {
      throw ValidationError("cannot merge corpus \"" + parts[i].name +
                            "\": schema differs");
    }
    for (auto& d : parts[i].dialogues) merged.dialogues.push_back(std::move(d));
  }
  validate_corpus(merged);
  return merged;
}

std::string serialize_dialogues(const Corpus& corpus) {
  ordered_json out = ordered_json::array();
  for (const auto& d : corpus.dialogues) {
    ordered_json jd;
    jd["dialogue_id"] = d.dialogue_id;
    jd["split"] = std::string(split_name(d.split));
    ordered_json turns = ordered_json::array();
    for (const auto& turn : d.turns) {
      ordered_json jt;
      jt["index"] = turn.index;
      jt["system"] = turn.system_utterance;
      jt["user"] = turn.user_utterance;
      ordered_json state = ordered_json::object();
      for (const auto& [slot_id, value] : turn.gold_state) {
        state[slot_id] = value;
      }
      jt["state"] = std::move(state);
      turns.push_back(std::move(jt));
    }
    jd["turns"] = std::move(turns);
    out.push_back(std::move(jd));
  }
  return dump(out);
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_dialogues(corpus));
}

}  // namespace cote
