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

#ifndef COTE_CHAINS_H_
#define COTE_CHAINS_H_

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cote/corpus.h"
#include "cote/normalize.h"

namespace cote {

// Value a deleted slot takes in a chain.
inline constexpr std::string_view kDeletedValue = kNoneValue;

// The turns, up to and including query_turn, at which one slot's normalized
// value changed. values[k] is the raw gold value set at change_turns[k], or
// "none" when the slot was removed at that turn.
struct SlotChain {
  std::string dialogue_id;
  std::string slot_id;
  int query_turn = 0;
  std::vector<int> change_turns;
  std::vector<std::string> values;

  bool empty() const { return change_turns.empty(); }
  // True when the slot holds a value at query_turn.
  bool active() const { return !values.empty() && values.back() != kDeletedValue; }

  friend bool operator==(const SlotChain&, const SlotChain&) = default;
};

// Throws UnknownSlotError, TurnOutOfRangeError.
SlotChain extract_chain(const Dialogue& dialogue, const Schema& schema,
                        std::string_view slot_id, int query_turn,
                        const NormalizationPolicy& policy = {});

inline int reasoning_steps(const SlotChain& chain) {
  return static_cast<int>(chain.change_turns.size());
}

struct StepHistogram {
  std::map<int, std::size_t> counts;  // steps -> samples
  std::size_t total_active = 0;

  // Share of samples with at least `steps` reasoning steps; 0 when empty.
  double fraction_at_least(int steps) const;
  void merge(const StepHistogram& other);

  friend bool operator==(const StepHistogram&, const StepHistogram&) = default;
};

// One sample per (dialogue, slot, turn) where the slot holds a value,
// counted under its reasoning-step count.
StepHistogram step_histogram(const Corpus& corpus, Split split,
                             const NormalizationPolicy& policy = {});

// For every turn t (index t-1), the maximum reasoning_steps over all schema
// slots of extract_chain(dialogue, slot, t). Turns before any annotation
// map to 0.
std::vector<int> max_steps_per_turn(const Dialogue& dialogue,
                                    const NormalizationPolicy& policy = {});

std::string histogram_to_json(const StepHistogram& histogram);
// Fixed-width table with one row per step count and a multi-step summary.
std::string histogram_to_table(const StepHistogram& histogram);

}  // namespace cote

#endif  // COTE_CHAINS_H_
