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

#ifndef COTE_NORMALIZE_H_
#define COTE_NORMALIZE_H_

#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace cote {

inline constexpr std::string_view kNoneValue = "none";
inline constexpr std::string_view kDontcareValue = "dontcare";

// How slot values are canonicalised before comparison.
struct NormalizationPolicy {
  bool lowercase = true;
  bool collapse_whitespace = true;
  bool strip_punctuation_edges = true;
  std::set<std::string, std::less<>> none_aliases = {"none", ""};
  std::set<std::string, std::less<>> dontcare_aliases = {
      "dontcare", "dont care", "don't care"};
  // Similarity threshold in (0, 1] for non-categorical slots. Absent means
  // exact match after normalization.
  std::optional<double> fuzzy_ratio_threshold;

  friend bool operator==(const NormalizationPolicy&,
                         const NormalizationPolicy&) = default;
};

// Throws ValidationError if an alias is not a fixed point of the policy's
// text transforms, if the alias tables overlap, or if the threshold is out
// of range.
void validate_policy(const NormalizationPolicy& policy);

// Canonical form of a value: case folding, whitespace collapsing and edge
// punctuation stripping (each per policy), then alias mapping to "none" or
// "dontcare". Idempotent.
std::string normalize_value(std::string_view raw,
                            const NormalizationPolicy& policy = {});

// True when the normalized value denotes an absent slot.
bool is_none_value(std::string_view raw,
                   const NormalizationPolicy& policy = {});

// 1 - levenshtein(a, b) / max(|a|, |b|), computed over bytes. Two empty
// strings have similarity 1.
double edit_similarity(std::string_view a, std::string_view b);

std::string policy_to_json(const NormalizationPolicy& policy);
// Missing fields keep their defaults. Throws FormatError / ValidationError.
NormalizationPolicy policy_from_json(std::string_view json_text,
                                     std::string_view origin);

}  // namespace cote

#endif  // COTE_NORMALIZE_H_
