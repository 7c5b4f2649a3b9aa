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

#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "cote/corpus.h"
#include "cote/error.h"
#include "testing/oracles.h"

namespace cote {
namespace {

TEST(NormalizeTest, LowercaseAndTrim) {
  EXPECT_EQ(normalize_value("  5-Star "), "5-star");
  EXPECT_EQ(normalize_value("City   Centre."), "city centre");
  EXPECT_EQ(normalize_value("\"York Hotel\"!"), "york hotel");
}

TEST(NormalizeTest, AliasTables) {
  EXPECT_EQ(normalize_value("Don't Care"), "dontcare");
  EXPECT_EQ(normalize_value("dont  care"), "dontcare");
  EXPECT_EQ(normalize_value(""), "none");
  EXPECT_EQ(normalize_value(" NONE "), "none");
  EXPECT_TRUE(is_none_value("   "));
  EXPECT_FALSE(is_none_value("no"));
}

TEST(NormalizeTest, PolicySwitches) {
  NormalizationPolicy p;
  p.lowercase = false;
  p.strip_punctuation_edges = false;
  EXPECT_EQ(normalize_value(" Cheap. ", p), "Cheap.");
  p.collapse_whitespace = false;
  EXPECT_EQ(normalize_value("a  b", p), "a  b");
}

TEST(NormalizeTest, IdempotentOnRandomStrings) {
  cote_test::Rng rng(7);
  const std::string alphabet = "aAbBzZ09 .,!'-\t";
  for (int i = 0; i < 1000; ++i) {
    std::string s;
    const int n = rng.uniform(0, 14);
    for (int k = 0; k < n; ++k) {
      s += alphabet[static_cast<std::size_t>(
          rng.uniform(0, static_cast<int>(alphabet.size()) - 1))];
    }
    if (rng.coin(0.1)) s = rng.pick(cote_test::prediction_pool());
    const std::string once = normalize_value(s);
    EXPECT_EQ(normalize_value(once), once) << "input \"" << s << "\"";
  }
}

TEST(NormalizeTest, MatchesLonghandOracleOnPools) {
  for (const auto& v : cote_test::prediction_pool()) {
    EXPECT_EQ(normalize_value(v), cote_test::oracle_canonical(v)) << v;
  }
}

TEST(NormalizeTest, PolicyValidation) {
  NormalizationPolicy p;
  EXPECT_NO_THROW(validate_policy(p));
  p.fuzzy_ratio_threshold = 0.0;
  EXPECT_THROW(validate_policy(p), ValidationError);
  p.fuzzy_ratio_threshold = 1.5;
  EXPECT_THROW(validate_policy(p), ValidationError);
  p.fuzzy_ratio_threshold = 1.0;
  EXPECT_NO_THROW(validate_policy(p));

  NormalizationPolicy overlap;
  overlap.dontcare_aliases.insert("none");
  EXPECT_THROW(validate_policy(overlap), ValidationError);

  NormalizationPolicy unfixed;
  unfixed.none_aliases.insert("N/A ");
  EXPECT_THROW(validate_policy(unfixed), ValidationError);
}

TEST(NormalizeTest, EditSimilarity) {
  EXPECT_DOUBLE_EQ(edit_similarity("", ""), 1.0);
  EXPECT_DOUBLE_EQ(edit_similarity("abc", "abc"), 1.0);
  EXPECT_DOUBLE_EQ(edit_similarity("kitten", "sitting"), 1.0 - 3.0 / 7.0);
  EXPECT_DOUBLE_EQ(edit_similarity("abc", ""), 0.0);
}

TEST(NormalizeTest, PolicyJsonRoundTrip) {
  NormalizationPolicy p;
  p.fuzzy_ratio_threshold = 0.9;
  p.none_aliases.insert("n/a");
  EXPECT_EQ(policy_from_json(policy_to_json(p), "mem"), p);
  EXPECT_EQ(policy_from_json(policy_to_json(NormalizationPolicy{}), "mem"),
            NormalizationPolicy{});
  EXPECT_THROW(policy_from_json(R"({"lowercase": true, "stem": true})", "mem"),
               FormatError);
}

TEST(NormalizeTest, ShippedDefaultPolicyFileMatchesDefaults) {
  const std::string text = read_file(std::filesystem::path(COTE_TEST_DATA_DIR) /
                                     "policy" / "default.json");
  EXPECT_EQ(policy_from_json(text, "default.json"), NormalizationPolicy{});
}

}  // namespace
}  // namespace cote
