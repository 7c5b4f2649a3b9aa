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

#include "cote/evaluator.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_map>

#include "cote/chains.h"
#include "cote/cote_builder.h"
#include "cote/error.h"
#include "json_util.h"

namespace cote {
namespace {

std::string prediction_key(std::string_view dialogue_id, int turn,
                           std::string_view slot_id) {
  std::string key(dialogue_id);
  key += '\x1f';
  key += std::to_string(turn);
  key += '\x1f';
  key += slot_id;
  return key;
}

bool values_match(const std::string& predicted, const std::string& gold,
                  const SlotSchema& slot, const NormalizationPolicy& policy) {
  if (predicted == gold) return true;
  if (!policy.fuzzy_ratio_threshold || slot.is_categorical()) return false;
  auto special = [](const std::string& v) {
    return v == kNoneValue || v == kDontcareValue;
  };
  if (special(predicted) || special(gold)) return false;
  return edit_similarity(predicted, gold) >= *policy.fuzzy_ratio_threshold;
}

bool is_integral(double v) { return std::floor(v) == v; }

std::string format_number(double v) {
  if (is_integral(v) && std::fabs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Predictions

std::vector<PredictionRecord> parse_predictions(std::string_view text,
                                                std::string_view origin) {
  std::vector<PredictionRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    const std::string where =
        std::string(origin) + ":" + std::to_string(line_no);
    ordered_json j = parse_json(line, where);
    JsonPath path(where);
    require_object(j, path);
    PredictionRecord record;
    record.dialogue_id = get_string(require_field(j, "dialogue_id", path),
                                    path.field("dialogue_id"));
    record.query_turn = static_cast<int>(
        get_int(require_field(j, "turn", path), path.field("turn")));
    record.slot_id =
        get_string(require_field(j, "slot_id", path), path.field("slot_id"));
    record.generated_text =
        get_string(require_field(j, "text", path), path.field("text"));
    out.push_back(std::move(record));
    if (end == text.size()) break;
  }
  return out;
}

std::vector<PredictionRecord> load_predictions(
    const std::filesystem::path& path) {
  return parse_predictions(read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Buckets

std::string_view axis_name(BucketAxis axis) {
  switch (axis) {
    case BucketAxis::kStep:
      return "step";
    case BucketAxis::kTurn:
      return "turn";
    case BucketAxis::kLen:
      return "len";
  }
  return "step";
}

BucketAxis parse_axis(std::string_view text) {
  if (text == "step") return BucketAxis::kStep;
  if (text == "turn") return BucketAxis::kTurn;
  if (text == "len") return BucketAxis::kLen;
  throw FormatError("unknown bucket axis \"" + std::string(text) + "\"");
}

std::string default_bucket_label(double lo, std::optional<double> hi) {
  if (!hi) return format_number(lo) + "+";
  if (is_integral(lo) && is_integral(*hi)) {
    if (*hi - lo == 1.0) return format_number(lo);
    return format_number(lo) + "-" + format_number(*hi - 1.0);
  }
  return "[" + format_number(lo) + "," + format_number(*hi) + ")";
}

void validate_bucket_spec(const BucketSpec& spec) {
  const std::string axis(axis_name(spec.axis));
  if (spec.ranges.empty()) {
    throw ValidationError("bucket spec for " + axis + " has no ranges");
  }
  if (spec.ranges.front().lo != 0.0) {
    throw ValidationError("bucket spec for " + axis + " must start at 0");
  }
  for (std::size_t i = 0; i < spec.ranges.size(); ++i) {
    const BucketRange& r = spec.ranges[i];
    const bool last = i + 1 == spec.ranges.size();
    if (!last && !r.hi) {
      throw ValidationError("bucket spec for " + axis +
                            ": only the last range may be open-ended");
    }
    if (last && r.hi) {
      throw ValidationError("bucket spec for " + axis +
                            ": the last range must be open-ended");
    }
    if (r.hi && !(*r.hi > r.lo)) {
      throw ValidationError("bucket spec for " + axis + ": empty range " +
                            default_bucket_label(r.lo, r.hi));
    }
    if (!last && spec.ranges[i + 1].lo != *r.hi) {
      throw ValidationError("bucket spec for " + axis +
                            ": ranges must be contiguous, gap or overlap at " +
                            format_number(*r.hi));
    }
  }
}

std::vector<BucketSpec> parse_bucket_specs(std::string_view json_text,
                                           std::string_view origin) {
  ordered_json j = parse_json(json_text, origin);
  JsonPath root(origin);
  auto parse_one = [](const ordered_json& obj, const JsonPath& path) {
    require_object(obj, path);
    BucketSpec spec;
    try {
      spec.axis = parse_axis(get_string(require_field(obj, "axis", path),
                                        path.field("axis")));
    } catch (const FormatError& e) {
      throw FormatError(path.field("axis").str() + ": " + e.what());
    }
    JsonPath ep = path.field("edges");
    const ordered_json& edges = require_field(obj, "edges", path);
    require_array(edges, ep);
    std::vector<std::string> labels;
    if (auto it = obj.find("labels"); it != obj.end()) {
      labels = get_string_array(*it, path.field("labels"));
      if (labels.size() != edges.size()) {
        throw FormatError(path.field("labels").str() +
                          ": one label per range expected");
      }
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
      JsonPath rp = ep.index(i);
      if (!edges[i].is_array() || edges[i].size() != 2) {
        throw FormatError(rp.str() + ": expected [lo, hi]");
      }
      BucketRange range;
      range.lo = get_number(edges[i][0], rp.index(0));
      if (!edges[i][1].is_null()) range.hi = get_number(edges[i][1], rp.index(1));
      range.label =
          labels.empty() ? default_bucket_label(range.lo, range.hi) : labels[i];
      spec.ranges.push_back(std::move(range));
    }
    validate_bucket_spec(spec);
    return spec;
  };
  std::vector<BucketSpec> specs;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      specs.push_back(parse_one(j[i], root.index(i)));
    }
  } else {
    specs.push_back(parse_one(j, root));
  }
  return specs;
}

std::vector<BucketSpec> load_bucket_specs(const std::filesystem::path& path) {
  return parse_bucket_specs(read_file(path), path.string());
}

std::string bucket_specs_to_json(const std::vector<BucketSpec>& specs) {
  ordered_json out = ordered_json::array();
  for (const auto& spec : specs) {
    ordered_json j;
    j["axis"] = std::string(axis_name(spec.axis));
    ordered_json edges = ordered_json::array();
    ordered_json labels = ordered_json::array();
    for (const auto& r : spec.ranges) {
      ordered_json pair = ordered_json::array();
      pair.push_back(r.lo);
      if (r.hi) {
        pair.push_back(*r.hi);
      } else {
        pair.push_back(nullptr);
      }
      edges.push_back(std::move(pair));
      labels.push_back(r.label);
    }
    j["edges"] = std::move(edges);
    j["labels"] = std::move(labels);
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

namespace {

BucketSpec make_spec(BucketAxis axis,
                     std::initializer_list<std::pair<double, double>> closed,
                     double open_from) {
  BucketSpec spec;
  spec.axis = axis;
  for (const auto& [lo, hi] : closed) {
    spec.ranges.push_back({lo, hi, default_bucket_label(lo, hi)});
  }
  spec.ranges.push_back(
      {open_from, std::nullopt, default_bucket_label(open_from, std::nullopt)});
  validate_bucket_spec(spec);
  return spec;
}

}  // namespace

std::vector<BucketSpec> bucket_preset(std::string_view dataset) {
  // Turns with no annotated slot have zero steps and get their own bucket.
  const BucketSpec steps =
      make_spec(BucketAxis::kStep, {{0, 1}, {1, 2}, {2, 3}}, 3);
  if (dataset == "multiwoz22") {
    return {steps,
            make_spec(BucketAxis::kTurn, {{0, 10}, {10, 15}, {15, 20}}, 20),
            make_spec(BucketAxis::kLen, {{0, 12}, {12, 15}}, 15)};
  }
  if (dataset == "m2m") {
    return {steps,
            make_spec(BucketAxis::kTurn, {{0, 10}, {10, 15}, {15, 20}}, 20),
            make_spec(BucketAxis::kLen, {{0, 8}, {8, 10}}, 10)};
  }
  if (dataset == "woz2") {
    return {steps, make_spec(BucketAxis::kTurn, {{0, 6}, {6, 8}, {8, 10}}, 10),
            make_spec(BucketAxis::kLen, {{0, 6}, {6, 8}}, 8)};
  }
  throw ValidationError("unknown bucket preset \"" + std::string(dataset) +
                        "\" (expected multiwoz22, m2m or woz2)");
}

double axis_value(const Dialogue& dialogue, int turn, BucketAxis axis,
                  const NormalizationPolicy& policy) {
  dialogue.turn(turn);
  switch (axis) {
    case BucketAxis::kStep:
      return max_steps_per_turn(dialogue, policy)[static_cast<std::size_t>(turn - 1)];
    case BucketAxis::kTurn:
      return dialogue.num_turns();
    case BucketAxis::kLen:
      return average_utterance_length(dialogue);
  }
  return 0.0;
}

namespace {

std::size_t range_index(const BucketSpec& spec, double value) {
  for (std::size_t i = 0; i < spec.ranges.size(); ++i) {
    if (spec.ranges[i].contains(value)) return i;
  }
  // Negative values cannot occur for any axis.
  throw ValidationError("value " + format_number(value) +
                        " falls outside the bucket spec");
}

// Range index per dialogue (corpus order) per turn.
std::vector<std::vector<std::size_t>> assign_buckets(
    const Corpus& corpus, const BucketSpec& spec,
    const NormalizationPolicy& policy) {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(corpus.dialogues.size());
  for (const auto& d : corpus.dialogues) {
    std::vector<std::size_t> row(d.turns.size());
    switch (spec.axis) {
      case BucketAxis::kStep: {
        auto steps = max_steps_per_turn(d, policy);
        for (std::size_t t = 0; t < row.size(); ++t) {
          row[t] = range_index(spec, steps[t]);
        }
        break;
      }
      case BucketAxis::kTurn:
        std::fill(row.begin(), row.end(), range_index(spec, d.num_turns()));
        break;
      case BucketAxis::kLen:
        std::fill(row.begin(), row.end(),
                  range_index(spec, average_utterance_length(d)));
        break;
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

std::map<TurnKey, std::size_t> bucketize(const Corpus& corpus,
                                         const BucketSpec& spec,
                                         const NormalizationPolicy& policy) {
  validate_bucket_spec(spec);
  auto assigned = assign_buckets(corpus, spec, policy);
  std::map<TurnKey, std::size_t> out;
  for (std::size_t i = 0; i < corpus.dialogues.size(); ++i) {
    for (std::size_t t = 0; t < assigned[i].size(); ++t) {
      out.emplace(TurnKey{corpus.dialogues[i].dialogue_id,
                          static_cast<int>(t) + 1},
                  assigned[i][t]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Joint goal accuracy

std::vector<std::vector<bool>> score_turns(
    const Corpus& corpus, const std::vector<PredictionRecord>& predictions,
    const NormalizationPolicy& policy, std::size_t* missing) {
  validate_policy(policy);
  std::unordered_map<std::string_view, const Dialogue*> dialogues;
  for (const auto& d : corpus.dialogues) dialogues.emplace(d.dialogue_id, &d);

  std::unordered_map<std::string, std::string> predicted;
  predicted.reserve(predictions.size());
  for (const auto& p : predictions) {
    auto it = dialogues.find(p.dialogue_id);
    if (it == dialogues.end()) {
      throw UnknownDialogueError("prediction for unknown dialogue \"" +
                                 p.dialogue_id + "\"");
    }
    corpus.schema.at(p.slot_id);
    it->second->turn(p.query_turn);
    std::string value;
    if (p.generated_text.find_first_not_of(" \t\r\n\f\v") != std::string::npos) {
      value = parse_generation(p.generated_text).value;
    }
    auto [_, inserted] = predicted.emplace(
        prediction_key(p.dialogue_id, p.query_turn, p.slot_id),
        normalize_value(value, policy));
    if (!inserted) {
      throw DuplicatePredictionError(
          "duplicate prediction for (" + p.dialogue_id + ", " +
          std::to_string(p.query_turn) + ", " + p.slot_id + ")");
    }
  }

  std::size_t n_missing = 0;
  const std::string none(kNoneValue);
  std::vector<std::vector<bool>> scores;
  scores.reserve(corpus.dialogues.size());
  for (const auto& d : corpus.dialogues) {
    std::vector<bool> row;
    row.reserve(d.turns.size());
    for (const auto& turn : d.turns) {
      bool all_match = true;
      for (const auto& slot : corpus.schema.slots()) {
        auto g = turn.gold_state.find(slot.slot_id);
        const std::string gold =
            g == turn.gold_state.end() ? none : normalize_value(g->second, policy);
        auto p = predicted.find(
            prediction_key(d.dialogue_id, turn.index, slot.slot_id));
        if (p == predicted.end()) ++n_missing;
        const std::string& value = p == predicted.end() ? none : p->second;
        if (!values_match(value, gold, slot, policy)) all_match = false;
      }
      row.push_back(all_match);
    }
    scores.push_back(std::move(row));
  }
  if (missing != nullptr) *missing = n_missing;
  return scores;
}

EvalReport compute_jga(const Corpus& corpus,
                       const std::vector<PredictionRecord>& predictions,
                       const NormalizationPolicy& policy) {
  return fine_grained_report(corpus, predictions, policy, {});
}

EvalReport fine_grained_report(const Corpus& corpus,
                               const std::vector<PredictionRecord>& predictions,
                               const NormalizationPolicy& policy,
                               const std::vector<BucketSpec>& specs) {
  EvalReport report;
  report.policy = policy;
  const auto scores =
      score_turns(corpus, predictions, policy, &report.n_missing_predictions);
  report.n_dialogues = corpus.dialogues.size();
  for (const auto& row : scores) {
    report.n_turns += row.size();
    report.n_correct += static_cast<std::size_t>(std::count(row.begin(), row.end(), true));
  }
  report.overall_jga =
      report.n_turns == 0 ? 0.0
                          : static_cast<double>(report.n_correct) /
                                static_cast<double>(report.n_turns);

  for (const auto& spec : specs) {
    validate_bucket_spec(spec);
    AxisReport axis;
    axis.axis = spec.axis;
    for (const auto& range : spec.ranges) axis.buckets.push_back({range, 0, 0, {}});
    const auto assigned = assign_buckets(corpus, spec, policy);
    for (std::size_t i = 0; i < scores.size(); ++i) {
      for (std::size_t t = 0; t < scores[i].size(); ++t) {
        BucketResult& bucket = axis.buckets[assigned[i][t]];
        ++bucket.n_turns;
        if (scores[i][t]) ++bucket.n_correct;
      }
    }
    for (auto& bucket : axis.buckets) {
      if (bucket.n_turns > 0) {
        bucket.jga = static_cast<double>(bucket.n_correct) /
                     static_cast<double>(bucket.n_turns);
      }
    }
    report.per_bucket.push_back(std::move(axis));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Low-resource sampling

std::size_t low_resource_count(double fraction, std::size_t n) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw InvalidFractionError("fraction must lie in (0, 1], got " +
                               std::to_string(fraction));
  }
  // The epsilon keeps products such as 0.07 * 100 = 7.000000000000001 from
  // rounding up.
  const double scaled = fraction * static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(scaled - 1e-9));
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(n, 1));
}

Corpus low_resource_sample(const Corpus& corpus, double fraction,
                           std::uint64_t seed) {
  std::vector<std::string> ids;
  for (const auto& d : corpus.dialogues) {
    if (d.split == Split::kTrain) ids.push_back(d.dialogue_id);
  }
  const std::size_t k = low_resource_count(fraction, ids.size());
  if (ids.empty()) throw ValidationError("train split is empty");
  std::sort(ids.begin(), ids.end());

  // Fisher-Yates with rejection sampling; std::shuffle and the standard
  // distributions are not specified bit-for-bit across library vendors.
  std::mt19937_64 rng(seed);
  auto uniform_below = [&rng](std::uint64_t bound) {
    const std::uint64_t limit =
        std::mt19937_64::max() - std::mt19937_64::max() % bound;
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    return r % bound;
  };
  for (std::size_t i = ids.size() - 1; i > 0; --i) {
    std::swap(ids[i], ids[uniform_below(i + 1)]);
  }
  ids.resize(k);
  std::sort(ids.begin(), ids.end());

  Corpus sampled;
  sampled.schema = corpus.schema;
  sampled.name = corpus.name;
  for (const auto& d : corpus.dialogues) {
    if (d.split != Split::kTrain ||
        std::binary_search(ids.begin(), ids.end(), d.dialogue_id)) {
      sampled.dialogues.push_back(d);
    }
  }
  return sampled;
}

}  // namespace cote
