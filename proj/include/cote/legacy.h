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

#ifndef COTE_LEGACY_H_
#define COTE_LEGACY_H_

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "cote/corpus.h"

namespace cote {

// Source layouts that can be converted into the canonical corpus.
//   kWozBelief: WOZ 2.0 release files; a list of
//     {dialogue_idx, dialogue: [{turn_idx, system_transcript, transcript,
//      belief_state: [{act, slots: [[name, value]]}], turn_label}]}.
//   kM2mFlat: M2M (sim-R / sim-M) files; a list of
//     {dialogue_id, turns: [{system_utterance: {text}, user_utterance:
//      {text}, dialogue_state: [{slot, value}]}]}.
enum class LegacyStyle { kWozBelief, kM2mFlat };

LegacyStyle parse_legacy_style(std::string_view text);

struct LegacyOptions {
  // When absent the split is inferred from the file name
  // ("woz_train_en.json" -> train, "dev.json" -> dev, ...).
  std::optional<Split> split;
  // Domain used to resolve slot names that exist in several domains
  // ("date" in both restaurant and movie).
  std::string domain_hint;
};

// Converts one legacy file. Per-turn belief annotations become cumulative
// gold states keyed by schema slot_ids. Throws FormatError with the turn
// location when a record is malformed or names a slot the schema lacks.
Corpus ingest_legacy(const std::filesystem::path& path, LegacyStyle style,
                     const Schema& schema, const LegacyOptions& options = {});

// Reads an unpacked MultiWOZ 2.2 release: schema.json plus train/, dev/ and
// test/ directories of dialogues_*.json. The schema is taken from the
// release and the domain exclusion is applied.
Corpus ingest_multiwoz22(const std::filesystem::path& root,
                         const std::set<std::string>& exclude_domains);

std::optional<Split> infer_split(const std::filesystem::path& path);

}  // namespace cote

#endif  // COTE_LEGACY_H_
