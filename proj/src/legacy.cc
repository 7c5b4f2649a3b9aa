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

#include "cote/legacy.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <utility>
#include <vector>

#include "cote/error.h"
#include "cote/normalize.h"
#include "json_util.h"

namespace cote {
namespace {

// "price range", "price_range" and "pricerange" share one key.
std::string slot_key(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c == ' ' || c == '_' || c == '-') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return key;
}

class SlotResolver {
 public:
  SlotResolver(const Schema& schema, std::string domain_hint)
      : schema_(schema), domain_hint_(std::move(domain_hint)) {
    for (const auto& slot : schema.slots()) {
      by_key_[slot_key(slot.name)].push_back(&slot);
    }
  }

  // Throws FormatError prefixed with `where`.
  const std::string& resolve(std::string_view raw,
                             const std::string& where) const {
    if (const SlotSchema* slot = schema_.find(raw)) return slot->slot_id;
    auto it = by_key_.find(slot_key(raw));
    if (it == by_key_.end()) {
      throw FormatError(where + ": slot \"" + std::string(raw) +
                        "\" is not in the schema");
    }
    const auto& candidates = it->second;
    if (!domain_hint_.empty()) {
      for (const SlotSchema* slot : candidates) {
        if (slot->domain == domain_hint_) return slot->slot_id;
      }
      throw FormatError(where + ": slot \"" + std::string(raw) +
                        "\" is not defined for domain \"" + domain_hint_ +
                        "\"");
    }
    if (candidates.size() > 1) {
      throw FormatError(where + ": slot \"" + std::string(raw) +
                        "\" is ambiguous across domains; pass a domain hint");
    }
    return candidates.front()->slot_id;
  }

 private:
  const Schema& schema_;
  std::string domain_hint_;
  std::map<std::string, std::vector<const SlotSchema*>> by_key_;
};

std::string id_string(const ordered_json& j, const JsonPath& path) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw FormatError(path.str() + ": expected string or integer id");
}

Split resolve_split(const std::filesystem::path& path,
                    const LegacyOptions& options) {
  if (options.split) return *options.split;
  if (auto split = infer_split(path)) return *split;
  throw FormatError(path.string() +
                    ": cannot infer split from file name; pass it explicitly");
}

void put_state(DialogueState& state, const std::string& slot_id,
               const std::string& value) {
  if (is_none_value(value)) {
    state.erase(slot_id);
  } else {
    state[slot_id] = value;
  }
}

Dialogue convert_woz(const ordered_json& raw, const JsonPath& path,
                     const SlotResolver& resolver, Split split) {
  require_object(raw, path);
  Dialogue d;
  d.split = split;
  d.dialogue_id = std::string(split_name(split)) + "-" +
                  id_string(require_field(raw, "dialogue_idx", path),
                            path.field("dialogue_idx"));
  JsonPath turns_path = path.field("dialogue");
  const ordered_json& turns = require_field(raw, "dialogue", path);
  require_array(turns, turns_path);
  DialogueState running;
  for (std::size_t i = 0; i < turns.size(); ++i) {
    JsonPath tp = turns_path.index(i);
    const ordered_json& t = turns[i];
    require_object(t, tp);
    TurnPair turn;
    turn.index = static_cast<int>(i) + 1;
    if (auto it = t.find("system_transcript"); it != t.end()) {
      turn.system_utterance = get_string(*it, tp.field("system_transcript"));
    }
    turn.user_utterance =
        get_string(require_field(t, "transcript", tp), tp.field("transcript"));
    if (auto it = t.find("belief_state"); it != t.end()) {
      // Already cumulative in the release; rebuild from scratch each turn.
      running.clear();
      JsonPath bp = tp.field("belief_state");
      require_array(*it, bp);
      for (std::size_t b = 0; b < it->size(); ++b) {
        JsonPath ep = bp.index(b);
        const ordered_json& entry = (*it)[b];
        require_object(entry, ep);
        if (auto act = entry.find("act");
            act != entry.end() && get_string(*act, ep.field("act")) != "inform") {
          continue;
        }
        const ordered_json& slots = require_field(entry, "slots", ep);
        require_array(slots, ep.field("slots"));
        for (std::size_t s = 0; s < slots.size(); ++s) {
          JsonPath sp = ep.field("slots").index(s);
          if (!slots[s].is_array() || slots[s].size() != 2) {
            throw FormatError(sp.str() + ": expected [slot, value] pair");
          }
          std::string name = get_string(slots[s][0], sp.index(0));
          std::string value = get_string(slots[s][1], sp.index(1));
          put_state(running, resolver.resolve(name, sp.str()), value);
        }
      }
    } else if (auto label = t.find("turn_label"); label != t.end()) {
      JsonPath lp = tp.field("turn_label");
      require_array(*label, lp);
      for (std::size_t s = 0; s < label->size(); ++s) {
        JsonPath sp = lp.index(s);
        const ordered_json& pair = (*label)[s];
        if (!pair.is_array() || pair.size() != 2) {
          throw FormatError(sp.str() + ": expected [slot, value] pair");
        }
        std::string name = get_string(pair[0], sp.index(0));
        if (name == "request") continue;
        std::string value = get_string(pair[1], sp.index(1));
        put_state(running, resolver.resolve(name, sp.str()), value);
      }
    }
    turn.gold_state = running;
    d.turns.push_back(std::move(turn));
  }
  return d;
}

std::string utterance_text(const ordered_json& t, std::string_view key,
                           const JsonPath& tp) {
  auto it = t.find(key);
  if (it == t.end() || it->is_null()) return "";
  JsonPath up = tp.field(key);
  if (it->is_string()) return it->get<std::string>();
  require_object(*it, up);
  return get_string(require_field(*it, "text", up), up.field("text"));
}

Dialogue convert_m2m(const ordered_json& raw, const JsonPath& path,
                     const SlotResolver& resolver, Split split) {
  require_object(raw, path);
  Dialogue d;
  d.split = split;
  d.dialogue_id = id_string(require_field(raw, "dialogue_id", path),
                            path.field("dialogue_id"));
  JsonPath turns_path = path.field("turns");
  const ordered_json& turns = require_field(raw, "turns", path);
  require_array(turns, turns_path);
  for (std::size_t i = 0; i < turns.size(); ++i) {
    JsonPath tp = turns_path.index(i);
    const ordered_json& t = turns[i];
    require_object(t, tp);
    TurnPair turn;
    turn.index = static_cast<int>(i) + 1;
    turn.system_utterance = utterance_text(t, "system_utterance", tp);
    turn.user_utterance = utterance_text(t, "user_utterance", tp);
    JsonPath sp = tp.field("dialogue_state");
    const ordered_json& state = require_field(t, "dialogue_state", tp);
    require_array(state, sp);
    for (std::size_t s = 0; s < state.size(); ++s) {
      JsonPath ep = sp.index(s);
      require_object(state[s], ep);
      std::string name =
          get_string(require_field(state[s], "slot", ep), ep.field("slot"));
      std::string value =
          get_string(require_field(state[s], "value", ep), ep.field("value"));
      put_state(turn.gold_state, resolver.resolve(name, ep.str()), value);
    }
    d.turns.push_back(std::move(turn));
  }
  return d;
}

}  // namespace

LegacyStyle parse_legacy_style(std::string_view text) {
  if (text == "woz_belief") return LegacyStyle::kWozBelief;
  if (text == "m2m_flat") return LegacyStyle::kM2mFlat;
  throw FormatError("unknown legacy style \"" + std::string(text) + "\"");
}

std::optional<Split> infer_split(const std::filesystem::path& path) {
  std::string stem = path.filename().string();
  std::transform(stem.begin(), stem.end(), stem.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  if (stem.find("train") != std::string::npos) return Split::kTrain;
  if (stem.find("valid") != std::string::npos ||
      stem.find("dev") != std::string::npos) {
    return Split::kDev;
  }
  if (stem.find("test") != std::string::npos) return Split::kTest;
  return std::nullopt;
}

Corpus ingest_legacy(const std::filesystem::path& path, LegacyStyle style,
                     const Schema& schema, const LegacyOptions& options) {
  const Split split = resolve_split(path, options);
  ordered_json raw = parse_json(read_file(path), path.string());
  JsonPath root(path.string());
  require_array(raw, root);
  SlotResolver resolver(schema, options.domain_hint);
  Corpus corpus;
  corpus.schema = schema;
  corpus.name = path.stem().string();
  corpus.dialogues.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    switch (style) {
      case LegacyStyle::kWozBelief:
        corpus.dialogues.push_back(
            convert_woz(raw[i], root.index(i), resolver, split));
        break;
      case LegacyStyle::kM2mFlat:
        corpus.dialogues.push_back(
            convert_m2m(raw[i], root.index(i), resolver, split));
        break;
    }
  }
  validate_corpus(corpus);
  return corpus;
}

Corpus ingest_multiwoz22(const std::filesystem::path& root,
                         const std::set<std::string>& exclude) {
  Corpus corpus;
  corpus.schema = load_schema(root / "schema.json");
  corpus.name = root.filename().string();
  for (Split split : {Split::kTrain, Split::kDev, Split::kTest}) {
    std::filesystem::path dir = root / std::string(split_name(split));
    if (!std::filesystem::is_directory(dir)) {
      throw IoError("missing split directory " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.rfind("dialogues_", 0) == 0 &&
          entry.path().extension() == ".json") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      ordered_json raw = parse_json(read_file(file), file.string());
      JsonPath fp(file.string());
      require_array(raw, fp);
      for (std::size_t i = 0; i < raw.size(); ++i) {
        JsonPath dp = fp.index(i);
        const ordered_json& rd = raw[i];
        require_object(rd, dp);
        Dialogue d;
        d.split = split;
        d.dialogue_id = id_string(require_field(rd, "dialogue_id", dp),
                                  dp.field("dialogue_id"));
        JsonPath tsp = dp.field("turns");
        const ordered_json& turns = require_field(rd, "turns", dp);
        require_array(turns, tsp);
        std::string pending_system;
        for (std::size_t k = 0; k < turns.size(); ++k) {
          JsonPath tp = tsp.index(k);
          const ordered_json& t = turns[k];
          require_object(t, tp);
          std::string speaker =
              get_string(require_field(t, "speaker", tp), tp.field("speaker"));
          std::string utterance = get_string(require_field(t, "utterance", tp),
                                             tp.field("utterance"));
          if (speaker == "SYSTEM") {
            pending_system = std::move(utterance);
            continue;
          }
          if (speaker != "USER") {
            throw FormatError(tp.field("speaker").str() +
                              ": expected USER or SYSTEM");
          }
          TurnPair turn;
          turn.index = d.num_turns() + 1;
          turn.system_utterance = std::exchange(pending_system, "");
          turn.user_utterance = std::move(utterance);
          if (auto frames = t.find("frames"); frames != t.end()) {
            JsonPath fsp = tp.field("frames");
            require_array(*frames, fsp);
            for (std::size_t f = 0; f < frames->size(); ++f) {
              JsonPath frp = fsp.index(f);
              const ordered_json& frame = (*frames)[f];
              auto state = frame.find("state");
              if (state == frame.end()) continue;
              auto values = state->find("slot_values");
              if (values == state->end()) continue;
              JsonPath vp = frp.field("state").field("slot_values");
              require_object(*values, vp);
              for (const auto& [slot_id, list] : values->items()) {
                if (!corpus.schema.contains(slot_id)) {
                  throw FormatError(vp.field(slot_id).str() +
                                    ": slot is not in the schema");
                }
                auto options = get_string_array(list, vp.field(slot_id));
                if (options.empty()) continue;
                put_state(turn.gold_state, slot_id, options.front());
              }
            }
          }
          d.turns.push_back(std::move(turn));
        }
        corpus.dialogues.push_back(std::move(d));
      }
    }
  }
  validate_corpus(corpus);
  return exclude_domains(std::move(corpus), exclude);
}

}  // namespace cote
