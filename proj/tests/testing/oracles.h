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


// Random small corpora and brute-force recounts used by the property suites.
// Nothing here calls into the library's normalization, chain or metric code.

#ifndef COTE_TESTS_TESTING_ORACLES_H_
#define COTE_TESTS_TESTING_ORACLES_H_

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cote/corpus.h"
#include "cote/evaluator.h"

namespace cote_test {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  int uniform(int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  bool coin(double p = 0.5) {
    return std::bernoulli_distribution(p)(engine_);
  }
  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[static_cast<std::size_t>(
        uniform(0, static_cast<int>(items.size()) - 1))];
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Surface forms that collapse onto a handful of canonical values under the
// default policy, so that random states revisit the same value under a
// different spelling.
inline const std::vector<std::string>& value_pool() {
  static const std::vector<std::string> pool = {
      "cheap",  "Cheap",    " cheap ", "cheap.",   "moderate", "MODERATE",
      "north",  "north!",   "5",       "5 ",       "dontcare", "don't care",
      "Don't Care", "city  centre", "city centre", "York Hotel",
      "york hotel", "pizza hut"};
  return pool;
}

// Values a model might emit: the pool plus empty and explicit none forms.
inline const std::vector<std::string>& prediction_pool() {
  static const std::vector<std::string> pool = [] {
    std::vector<std::string> p = value_pool();
    p.insert(p.end(), {"none", "None", "", "  ", "expensive", "south"});
    return p;
  }();
  return pool;
}

inline const std::vector<std::string>& word_pool() {
  static const std::vector<std::string> pool = {
      "i",  "need", "a",     "hotel", "in",   "the",  "north", "please",
      "ok", "book", "table", "for",   "two",  "yes",  "no",    "cheap"};
  return pool;
}

inline std::string random_utterance(Rng& rng, int min_words) {
  const int n = rng.uniform(min_words, 18);
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i > 0) out += rng.coin(0.1) ? "  " : " ";
    out += rng.pick(word_pool());
  }
  return out;
}

// <= 5 dialogues, <= 6 turns, <= 4 slots. Each turn mutates the previous
// state: keep, add, overwrite, re-spell or delete.
inline cote::Corpus random_corpus(Rng& rng) {
  static const std::vector<std::pair<std::string, std::string>> kSlots = {
      {"hotel", "area"}, {"hotel", "stars"}, {"restaurant", "food"},
      {"train", "day"}};
  std::vector<cote::SlotSchema> slots;
  const int n_slots = rng.uniform(1, 4);
  for (int i = 0; i < n_slots; ++i) {
    cote::SlotSchema s;
    s.domain = kSlots[i].first;
    s.name = kSlots[i].second;
    s.slot_id = s.domain + "-" + s.name;
    s.description = "the " + s.name + " of the " + s.domain;
    if (rng.coin(0.3)) s.possible_values = {"cheap", "moderate", "north"};
    slots.push_back(std::move(s));
  }
  cote::Corpus corpus;
  corpus.schema = cote::Schema(slots);
  const int n_dialogues = rng.uniform(1, 5);
  for (int d = 0; d < n_dialogues; ++d) {
    cote::Dialogue dialogue;
    dialogue.dialogue_id = "d" + std::to_string(d);
    dialogue.split = static_cast<cote::Split>(rng.uniform(0, 2));
    cote::DialogueState state;
    const int n_turns = rng.uniform(1, 6);
    for (int t = 1; t <= n_turns; ++t) {
      for (const auto& slot : slots) {
        const double r = std::uniform_real_distribution<double>(0, 1)(
            rng.engine());
        if (r < 0.35) {
          state[slot.slot_id] = rng.pick(value_pool());
        } else if (r < 0.45) {
          state.erase(slot.slot_id);
        }
      }
      cote::TurnPair turn;
      turn.index = t;
      turn.system_utterance = t == 1 && rng.coin() ? "" : random_utterance(rng, 1);
      turn.user_utterance = random_utterance(rng, 1);
      turn.gold_state = state;
      dialogue.turns.push_back(std::move(turn));
    }
    corpus.dialogues.push_back(std::move(dialogue));
  }
  return corpus;
}

// Predictions for a random subset of (turn, slot) pairs: copies of gold,
// random values, with or without an appended explanation.
inline std::vector<cote::PredictionRecord> random_predictions(
    Rng& rng, const cote::Corpus& corpus) {
  std::vector<cote::PredictionRecord> out;
  for (const auto& d : corpus.dialogues) {
    for (const auto& turn : d.turns) {
      for (const auto& slot : corpus.schema.slots()) {
        if (rng.coin(0.15)) continue;  // missing
        std::string value;
        auto g = turn.gold_state.find(slot.slot_id);
        if (rng.coin(0.7)) {
          value = g == turn.gold_state.end() ? "none" : g->second;
        } else {
          value = rng.pick(prediction_pool());
        }
        std::string text = value;
        if (rng.coin(0.4) && !value.empty()) {
          text += " | system: because user: " + rng.pick(word_pool());
        }
        out.push_back({d.dialogue_id, turn.index, slot.slot_id, text});
      }
    }
  }
  std::shuffle(out.begin(), out.end(), rng.engine());
  return out;
}

// ---------------------------------------------------------------------------
// Independent recounts.

// Canonical form under the default policy, written out longhand.
inline std::string oracle_canonical(const std::string& raw) {
  std::string lowered;
  for (char c : raw) {
    lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  std::size_t b = 0;
  std::size_t e = lowered.size();
  auto edge = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) ||
           std::ispunct(static_cast<unsigned char>(c));
  };
  while (b < e && edge(lowered[b])) ++b;
  while (e > b && edge(lowered[e - 1])) --e;
  std::string collapsed;
  bool in_space = false;
  for (std::size_t i = b; i < e; ++i) {
    if (std::isspace(static_cast<unsigned char>(lowered[i]))) {
      in_space = true;
      continue;
    }
    if (in_space && !collapsed.empty()) collapsed += ' ';
    in_space = false;
    collapsed += lowered[i];
  }
  if (collapsed.empty() || collapsed == "none") return "none";
  if (collapsed == "dontcare" || collapsed == "dont care" ||
      collapsed == "don't care") {
    return "dontcare";
  }
  return collapsed;
}

inline std::string oracle_value_at(const cote::TurnPair& turn,
                                   const std::string& slot_id) {
  auto it = turn.gold_state.find(slot_id);
  return it == turn.gold_state.end() ? "none" : oracle_canonical(it->second);
}

// Turns in 1..query_turn whose canonical value differs from the previous
// turn (turn 0 holds "none").
inline std::vector<int> oracle_change_turns(const cote::Dialogue& d,
                                            const std::string& slot_id,
                                            int query_turn) {
  std::vector<std::string> states = {"none"};
  for (int t = 1; t <= query_turn; ++t) {
    states.push_back(oracle_value_at(d.turns[t - 1], slot_id));
  }
  std::vector<int> out;
  for (int t = 1; t <= query_turn; ++t) {
    if (states[t] != states[t - 1]) out.push_back(t);
  }
  return out;
}

inline std::set<std::string> oracle_annotated(const cote::Dialogue& d) {
  std::set<std::string> out;
  for (const auto& turn : d.turns) {
    for (const auto& kv : turn.gold_state) out.insert(kv.first);
  }
  return out;
}

// steps -> count over (dialogue, slot, turn) with the slot holding a value.
inline std::map<int, std::size_t> oracle_histogram(const cote::Corpus& c,
                                                   cote::Split split) {
  std::map<int, std::size_t> out;
  for (const auto& d : c.dialogues) {
    if (d.split != split) continue;
    for (const auto& slot : oracle_annotated(d)) {
      for (int t = 1; t <= d.num_turns(); ++t) {
        if (oracle_value_at(d.turns[t - 1], slot) == "none") continue;
        ++out[static_cast<int>(oracle_change_turns(d, slot, t).size())];
      }
    }
  }
  return out;
}

inline int oracle_turn_steps(const cote::Dialogue& d, int turn) {
  int best = 0;
  for (const auto& slot : oracle_annotated(d)) {
    best = std::max(best,
                    static_cast<int>(oracle_change_turns(d, slot, turn).size()));
  }
  return best;
}

inline double oracle_avg_len(const cote::Dialogue& d) {
  std::size_t tokens = 0;
  auto count = [](const std::string& s) {
    std::size_t n = 0;
    bool in_word = false;
    for (char c : s) {
      const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
      if (!space && !in_word) ++n;
      in_word = !space;
    }
    return n;
  };
  for (const auto& turn : d.turns) {
    tokens += count(turn.system_utterance) + count(turn.user_utterance);
  }
  return static_cast<double>(tokens) / (2.0 * d.turns.size());
}

inline double oracle_axis_value(const cote::Dialogue& d, int turn,
                                cote::BucketAxis axis) {
  switch (axis) {
    case cote::BucketAxis::kStep:
      return oracle_turn_steps(d, turn);
    case cote::BucketAxis::kTurn:
      return d.num_turns();
    case cote::BucketAxis::kLen:
      return oracle_avg_len(d);
  }
  return 0;
}

inline std::string oracle_value_of_text(const std::string& text) {
  const std::size_t bar = text.find(" | ");
  return oracle_canonical(bar == std::string::npos ? text
                                                   : text.substr(0, bar));
}

// Exact-match correctness for every turn, keyed by (dialogue, turn).
inline std::map<cote::TurnKey, bool> oracle_turn_correct(
    const cote::Corpus& c, const std::vector<cote::PredictionRecord>& preds) {
  std::map<std::pair<cote::TurnKey, std::string>, std::string> predicted;
  for (const auto& p : preds) {
    predicted[{{p.dialogue_id, p.query_turn}, p.slot_id}] =
        oracle_value_of_text(p.generated_text);
  }
  std::map<cote::TurnKey, bool> out;
  for (const auto& d : c.dialogues) {
    for (const auto& turn : d.turns) {
      bool ok = true;
      for (const auto& slot : c.schema.slots()) {
        auto it = predicted.find({{d.dialogue_id, turn.index}, slot.slot_id});
        const std::string pred = it == predicted.end() ? "none" : it->second;
        if (pred != oracle_value_at(turn, slot.slot_id)) ok = false;
      }
      out[{d.dialogue_id, turn.index}] = ok;
    }
  }
  return out;
}

struct OracleCount {
  std::size_t correct = 0;
  std::size_t total = 0;
};

inline OracleCount oracle_jga(const cote::Corpus& c,
                              const std::vector<cote::PredictionRecord>& p) {
  OracleCount n;
  for (const auto& [key, ok] : oracle_turn_correct(c, p)) {
    ++n.total;
    n.correct += ok ? 1 : 0;
  }
  return n;
}

// Per-range counts for one axis, found by scanning the ranges directly.
inline std::vector<OracleCount> oracle_buckets(
    const cote::Corpus& c, const std::vector<cote::PredictionRecord>& p,
    const cote::BucketSpec& spec) {
  std::vector<OracleCount> out(spec.ranges.size());
  const auto correct = oracle_turn_correct(c, p);
  for (const auto& d : c.dialogues) {
    for (int t = 1; t <= d.num_turns(); ++t) {
      const double v = oracle_axis_value(d, t, spec.axis);
      for (std::size_t i = 0; i < spec.ranges.size(); ++i) {
        const auto& r = spec.ranges[i];
        if (v >= r.lo && (!r.hi.has_value() || v < *r.hi)) {
          ++out[i].total;
          out[i].correct += correct.at({d.dialogue_id, t}) ? 1 : 0;
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace cote_test

#endif  // COTE_TESTS_TESTING_ORACLES_H_
