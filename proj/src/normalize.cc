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

#include "cote/normalize.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <vector>

#include "cote/error.h"
#include "json_util.h"

namespace cote {
namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }
bool is_punct(unsigned char c) { return c < 0x80 && std::ispunct(c) != 0; }

// Everything but alias mapping.
std::string transform_text(std::string_view raw,
                           const NormalizationPolicy& policy) {
  std::string text(raw);
  if (policy.lowercase) {
    for (char& c : text) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  auto strippable = [&](unsigned char c) {
    return is_space(c) || (policy.strip_punctuation_edges && is_punct(c));
  };
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && strippable(text[begin])) ++begin;
  while (end > begin && strippable(text[end - 1])) --end;
  text = text.substr(begin, end - begin);
  if (policy.collapse_whitespace) {
    std::string collapsed;
    collapsed.reserve(text.size());
    bool in_space = false;
    for (char c : text) {
      if (is_space(c)) {
        in_space = true;
        continue;
      }
      if (in_space && !collapsed.empty()) collapsed.push_back(' ');
      in_space = false;
      collapsed.push_back(c);
    }
    text = std::move(collapsed);
  }
  return text;
}

}  // namespace

void validate_policy(const NormalizationPolicy& policy) {
  if (policy.fuzzy_ratio_threshold.has_value()) {
    double t = *policy.fuzzy_ratio_threshold;
    if (!(t > 0.0 && t <= 1.0)) {
      throw ValidationError("fuzzy_ratio_threshold must lie in (0, 1], got " +
                            std::to_string(t));
    }
  }
  auto check_fixed = [&](const std::string& alias) {
    if (transform_text(alias, policy) != alias) {
      throw ValidationError("alias \"" + alias +
                            "\" is not a normalization fixed point");
    }
  };
  for (const auto& alias : policy.none_aliases) check_fixed(alias);
  for (const auto& alias : policy.dontcare_aliases) {
    check_fixed(alias);
    if (policy.none_aliases.contains(alias)) {
      throw ValidationError("alias \"" + alias +
                            "\" is both a none and a dontcare alias");
    }
  }
  if (policy.dontcare_aliases.contains(kNoneValue)) {
    throw ValidationError("\"none\" cannot be a dontcare alias");
  }
  if (policy.none_aliases.contains(kDontcareValue)) {
    throw ValidationError("\"dontcare\" cannot be a none alias");
  }
}

std::string normalize_value(std::string_view raw,
                            const NormalizationPolicy& policy) {
  std::string text = transform_text(raw, policy);
  if (policy.none_aliases.contains(text)) return std::string(kNoneValue);
  if (policy.dontcare_aliases.contains(text)) {
    return std::string(kDontcareValue);
  }
  return text;
}

bool is_none_value(std::string_view raw, const NormalizationPolicy& policy) {
  return normalize_value(raw, policy) == kNoneValue;
}

double edit_similarity(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t above = row[j];
      std::size_t substitution = diagonal + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({above + 1, row[j - 1] + 1, substitution});
      diagonal = above;
    }
  }
  double longest = static_cast<double>(std::max(a.size(), b.size()));
  return 1.0 - static_cast<double>(row[b.size()]) / longest;
}

std::string policy_to_json(const NormalizationPolicy& policy) {
  ordered_json j;
  j["lowercase"] = policy.lowercase;
  j["collapse_whitespace"] = policy.collapse_whitespace;
  j["strip_punctuation_edges"] = policy.strip_punctuation_edges;
  j["none_aliases"] = std::vector<std::string>(policy.none_aliases.begin(),
                                               policy.none_aliases.end());
  j["dontcare_aliases"] = std::vector<std::string>(
      policy.dontcare_aliases.begin(), policy.dontcare_aliases.end());
  if (policy.fuzzy_ratio_threshold) {
    j["fuzzy_ratio_threshold"] = *policy.fuzzy_ratio_threshold;
  } else {
    j["fuzzy_ratio_threshold"] = nullptr;
  }
  return j.dump(2) + "\n";
}

NormalizationPolicy policy_from_json(std::string_view json_text,
                                     std::string_view origin) {
  ordered_json j = parse_json(json_text, origin);
  JsonPath path(origin);
  require_object(j, path);
  NormalizationPolicy policy;
  for (const auto& [key, value] : j.items()) {
    JsonPath field = path.field(key);
    if (key == "lowercase") {
      policy.lowercase = get_bool(value, field);
    } else if (key == "collapse_whitespace") {
      policy.collapse_whitespace = get_bool(value, field);
    } else if (key == "strip_punctuation_edges") {
      policy.strip_punctuation_edges = get_bool(value, field);
    } else if (key == "none_aliases" || key == "dontcare_aliases") {
      auto& target = key == "none_aliases" ? policy.none_aliases
                                           : policy.dontcare_aliases;
      target.clear();
      for (auto& s : get_string_array(value, field)) target.insert(s);
    } else if (key == "fuzzy_ratio_threshold") {
      if (value.is_null()) {
        policy.fuzzy_ratio_threshold.reset();
      } else if (value.is_number()) {
        policy.fuzzy_ratio_threshold = value.get<double>();
      } else {
        throw FormatError(field.str() + ": expected number or null");
      }
    } else {
      throw FormatError(field.str() + ": unknown policy field");
    }
  }
  validate_policy(policy);
  return policy;
}

}  // namespace cote
