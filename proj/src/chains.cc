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

#include "cote/chains.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "cote/error.h"
#include "json_util.h"

namespace cote {
namespace {

// Normalized value of a slot at one turn, or "none" when absent.
std::string value_at(const TurnPair& turn, std::string_view slot_id,
                     const NormalizationPolicy& policy) {
  auto it = turn.gold_state.find(slot_id);
  if (it == turn.gold_state.end()) return std::string(kNoneValue);
  return normalize_value(it->second, policy);
}

std::set<std::string_view> annotated_slots(const Dialogue& dialogue) {
  std::set<std::string_view> slots;
  for (const auto& turn : dialogue.turns) {
    for (const auto& [slot_id, value] : turn.gold_state) slots.insert(slot_id);
  }
  return slots;
}

std::string percent(std::size_t part, std::size_t whole) {
  char buffer[32];
  double p = whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) /
                                    static_cast<double>(whole);
  std::snprintf(buffer, sizeof(buffer), "%.2f%%", p);
  return buffer;
}

}  // namespace

SlotChain extract_chain(const Dialogue& dialogue, const Schema& schema,
                        std::string_view slot_id, int query_turn,
                        const NormalizationPolicy& policy) {
  schema.at(slot_id);
  dialogue.turn(query_turn);
  SlotChain chain;
  chain.dialogue_id = dialogue.dialogue_id;
  chain.slot_id = std::string(slot_id);
  chain.query_turn = query_turn;
  std::string previous(kNoneValue);
  for (int t = 1; t <= query_turn; ++t) {
    const TurnPair& turn = dialogue.turn(t);
    std::string current = value_at(turn, slot_id, policy);
    if (current == previous) continue;
    chain.change_turns.push_back(t);
    if (current == kNoneValue) {
      chain.values.emplace_back(kDeletedValue);
    } else {
      chain.values.push_back(turn.gold_state.find(slot_id)->second);
    }
    previous = std::move(current);
  }
  return chain;
}

double StepHistogram::fraction_at_least(int steps) const {
  if (total_active == 0) return 0.0;
  std::size_t n = 0;
  for (auto it = counts.lower_bound(steps); it != counts.end(); ++it) {
    n += it->second;
  }
  return static_cast<double>(n) / static_cast<double>(total_active);
}

void StepHistogram::merge(const StepHistogram& other) {
  for (const auto& [steps, n] : other.counts) counts[steps] += n;
  total_active += other.total_active;
}

StepHistogram step_histogram(const Corpus& corpus, Split split,
                             const NormalizationPolicy& policy) {
  StepHistogram histogram;
  for (const Dialogue* dialogue : corpus.dialogues_in(split)) {
    for (std::string_view slot_id : annotated_slots(*dialogue)) {
      std::string previous(kNoneValue);
      int changes = 0;
      for (const auto& turn : dialogue->turns) {
        std::string current = value_at(turn, slot_id, policy);
        if (current != previous) ++changes;
        if (current != kNoneValue) {
          ++histogram.counts[changes];
          ++histogram.total_active;
        }
        previous = std::move(current);
      }
    }
  }
  return histogram;
}

std::vector<int> max_steps_per_turn(const Dialogue& dialogue,
                                    const NormalizationPolicy& policy) {
  std::vector<int> steps(dialogue.turns.size(), 0);
  for (std::string_view slot_id : annotated_slots(dialogue)) {
    std::string previous(kNoneValue);
    int changes = 0;
    for (std::size_t t = 0; t < dialogue.turns.size(); ++t) {
      std::string current = value_at(dialogue.turns[t], slot_id, policy);
      if (current != previous) ++changes;
      steps[t] = std::max(steps[t], changes);
      previous = std::move(current);
    }
  }
  return steps;
}

std::string histogram_to_json(const StepHistogram& histogram) {
  ordered_json j;
  ordered_json counts = ordered_json::object();
  for (const auto& [steps, n] : histogram.counts) {
    counts[std::to_string(steps)] = n;
  }
  j["counts"] = std::move(counts);
  j["total_active"] = histogram.total_active;
  j["multi_step_fraction"] = histogram.fraction_at_least(2);
  return j.dump(2) + "\n";
}

std::string histogram_to_table(const StepHistogram& histogram) {
  std::ostringstream out;
  char line[96];
  std::snprintf(line, sizeof(line), "%-12s %12s %10s\n", "steps", "samples",
                "share");
  out << line;
  for (const auto& [steps, n] : histogram.counts) {
    std::snprintf(line, sizeof(line), "%-12d %12zu %10s\n", steps, n,
                  percent(n, histogram.total_active).c_str());
    out << line;
  }
  std::size_t multi = 0;
  for (auto it = histogram.counts.lower_bound(2); it != histogram.counts.end();
       ++it) {
    multi += it->second;
  }
  std::snprintf(line, sizeof(line), "%-12s %12zu %10s\n", "total",
                histogram.total_active,
                percent(histogram.total_active, histogram.total_active).c_str());
  out << line;
  std::snprintf(line, sizeof(line), "%-12s %12zu %10s\n", "step>=2", multi,
                percent(multi, histogram.total_active).c_str());
  out << line;
  return out.str();
}

}  // namespace cote
