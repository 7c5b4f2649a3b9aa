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


#include "cote/cote_builder.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cote/error.h"
#include "testing/fixtures.h"
#include "testing/oracles.h"

namespace cote {
namespace {

using cote_test::make_dialogue;
using cote_test::make_slot;

TEST(QuestionTest, PrefixesDescription) {
  SlotSchema s = make_slot("hotel", "stars", "the star rating of the hotel");
  EXPECT_EQ(build_question(s, {}), "What's the star rating of the hotel?");
}

TEST(QuestionTest, OverrideIsVerbatim) {
  SlotSchema s = make_slot("hotel", "stars", "the star rating of the hotel");
  QuestionOverrides overrides = {{"hotel-stars", "How many stars should it have"}};
  EXPECT_EQ(build_question(s, overrides), "How many stars should it have");
}

TEST(QuestionTest, TerminalPunctuationTable) {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"the area of the hotel", "What's the area of the hotel?"},
      {"the area of the hotel.", "What's the area of the hotel?"},
      {"the area of the hotel. ", "What's the area of the hotel?"},
      {" the area of the hotel .", "What's the area of the hotel?"},
      {"price budget for the restaurant.", "What's price budget for the restaurant?"},
      {"day of the train", "What's day of the train?"},
      {"day of the train?", "What's day of the train?"},
      {"number of people for the booking.", "What's number of people for the booking?"},
      {"name of the attraction", "What's name of the attraction?"},
      {"type of the hotel.", "What's type of the hotel?"},
      {"the leaving time (24h).", "What's the leaving time (24h)?"},
      {"departure location of the train.", "What's departure location of the train?"},
      {"stay length in days", "What's stay length in days?"},
      {"has free wifi", "What's has free wifi?"},
      {"the u.s. state.", "What's the u.s. state?"},
      {"the food type e.g. italian.", "What's the food type e.g. italian?"},
      {"time of arrival", "What's time of arrival?"},
      {"taxi destination.", "What's taxi destination?"},
      {"book day", "What's book day?"},
      {"area to search for attractions.", "What's area to search for attractions?"},
  };
  ASSERT_EQ(cases.size(), 20u);
  for (const auto& [description, expected] : cases) {
    SlotSchema s = make_slot("x", "y", description);
    const std::string q = build_question(s, {});
    EXPECT_EQ(q, expected) << "description \"" << description << "\"";
    EXPECT_EQ(std::count(q.begin(), q.end(), '?'), 1);
  }
}

class PromptTest : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus_ = exclude_domains(cote_test::load_fixture(), {"police"});
  }
  Corpus corpus_;
};

TEST_F(PromptTest, CategoricalSlotGetsChoices) {
  const Dialogue& d = *corpus_.find("fx01");
  const SlotSchema& stars = corpus_.schema.at("hotel-stars");
  const std::string prompt = render_prompt(d, 2, stars, PromptTemplate(), {});
  EXPECT_EQ(prompt,
            "Dialogue: system: user: I want a 4-star hotel, or the York hotel "
            "which is 5-star. system: The York hotel offers a discount this "
            "week. user: A discounted hotel sounds nice, but show me 3-star "
            "ones as well. Domain: hotel Question: What's the star rating of "
            "the hotel? Choices: 1, 2, 3, 4, 5, none");
  EXPECT_EQ(prompt, render_prompt(d, 2, stars, PromptTemplate(), {}));
}

TEST_F(PromptTest, NonCategoricalSlotHasNoChoicesBlock) {
  const Dialogue& d = *corpus_.find("fx01");
  const std::string prompt = render_prompt(
      d, 1, corpus_.schema.at("hotel-name"), PromptTemplate(), {});
  EXPECT_EQ(prompt.find("Choices"), std::string::npos);
  EXPECT_EQ(prompt,
            "Dialogue: system: user: I want a 4-star hotel, or the York hotel "
            "which is 5-star. Domain: hotel Question: What's name of the hotel?");
}

TEST_F(PromptTest, CustomTemplateAndMarker) {
  PromptTemplate t("[Domain] | [Question] [Choices] | [History]", "Options");
  const std::string prompt = render_prompt(
      *corpus_.find("fx05"), 1, corpus_.schema.at("restaurant-area"), t, {});
  EXPECT_EQ(prompt,
            "restaurant | What's area or place of the restaurant? Options: "
            "centre, east, north, south, west, none | system: user: Can you "
            "find me a chinese restaurant in the south?");
}

TEST(TemplateTest, Validation) {
  EXPECT_THROW(PromptTemplate("Question: [Question]"), ValidationError);
  EXPECT_THROW(PromptTemplate("[History] [Question] [Question]"), ValidationError);
  EXPECT_THROW(PromptTemplate("[History] [Question] [Choices] [Choices]"),
               ValidationError);
  EXPECT_NO_THROW(PromptTemplate("[History] [Question]"));
}

TEST(TemplateTest, LoadsPlainAndJsonFiles) {
  cote_test::TempDir dir;
  write_file_atomic(dir / "t.txt", "[History] Q: [Question] [Choices]\n");
  EXPECT_EQ(load_template(dir / "t.txt").text(), "[History] Q: [Question] [Choices]");
  write_file_atomic(dir / "t.json",
                    R"({"template_text": "[History] [Question] [Choices]",
                        "choices_section_marker": "Options"})");
  PromptTemplate t = load_template(dir / "t.json");
  EXPECT_EQ(t.choices_marker(), "Options");
}

TEST(TemplateTest, OverridesMustNameKnownSlots) {
  cote_test::TempDir dir;
  Schema schema({make_slot("hotel", "stars", "stars")});
  write_file_atomic(dir / "o.json", R"({"hotel-stars": "How many stars?"})");
  EXPECT_EQ(load_overrides(dir / "o.json", schema).at("hotel-stars"),
            "How many stars?");
  write_file_atomic(dir / "bad.json", R"({"hotel-area": "Where?"})");
  EXPECT_THROW(load_overrides(dir / "bad.json", schema), ValidationError);
}

// Reference joiner: pairs sorted by turn, rendered with speaker tags.
std::string oracle_explanation(const Dialogue& d, std::vector<int> turns) {
  std::sort(turns.begin(), turns.end());
  std::string out;
  for (int t : turns) {
    const TurnPair& p = d.turns[static_cast<std::size_t>(t - 1)];
    if (!out.empty()) out += " ";
    out += p.system_utterance.empty() ? "system:" : "system: " + p.system_utterance;
    out += " user: " + p.user_utterance;
  }
  return out;
}

TEST(CoarseExplanationTest, NonConsecutivePairs) {
  Dialogue d = make_dialogue("d", Split::kTrain,
                             {{"a1", "u1", {}}, {"a2", "u2", {}}, {"a3", "u3", {}},
                              {"a4", "u4", {}}, {"a5", "u5", {}}});
  SlotChain chain{"d", "hotel-stars", 5, {2, 4}, {"4", "5"}};
  EXPECT_EQ(build_coarse_explanation(chain, d),
            "system: a2 user: u2 system: a4 user: u4");
}

TEST(CoarseExplanationTest, SingleChangeIsOnePair) {
  Dialogue d = make_dialogue("d", Split::kTrain, {{"", "u1", {}}, {"a2", "u2", {}}});
  SlotChain chain{"d", "x-y", 2, {1}, {"v"}};
  EXPECT_EQ(build_coarse_explanation(chain, d), "system: user: u1");
}

TEST(CoarseExplanationTest, FixtureChainOrderMatchesSortOracle) {
  Corpus c = exclude_domains(cote_test::load_fixture(), {"police"});
  const Dialogue& d = *c.find("fx01");
  SlotChain chain = extract_chain(d, c.schema, "hotel-stars", 3);
  ASSERT_EQ(chain.change_turns.size(), 3u);
  EXPECT_EQ(build_coarse_explanation(chain, d),
            oracle_explanation(d, {3, 1, 2}));
}

TEST(CoarseExplanationTest, Errors) {
  Dialogue d = make_dialogue("d", Split::kTrain, {{"", "u1", {}}});
  EXPECT_THROW(build_coarse_explanation(SlotChain{"d", "x-y", 1, {}, {}}, d),
               EmptyChainError);
  EXPECT_THROW(build_coarse_explanation(SlotChain{"e", "x-y", 1, {1}, {"v"}}, d),
               ValidationError);
}

TEST(TargetTest, RenderRules) {
  EXPECT_EQ(render_target("5-star", ""), "5-star");
  EXPECT_EQ(render_target("5-star", "system: ... user: ..."),
            "5-star | system: ... user: ...");
}

TEST(TargetTest, ParseRules) {
  EXPECT_EQ(parse_generation("5-star | system: ..."),
            (Generation{"5-star", "system: ..."}));
  EXPECT_EQ(parse_generation("5-star"), (Generation{"5-star", ""}));
  EXPECT_EQ(parse_generation("a | b | c"), (Generation{"a", "b | c"}));
  EXPECT_EQ(parse_generation("  cheap  "), (Generation{"cheap", ""}));
  EXPECT_THROW(parse_generation(""), EmptyGenerationError);
  EXPECT_THROW(parse_generation(" \t\n"), EmptyGenerationError);
}

TEST(TargetTest, FirstSeparatorAgreesWithScanOracle) {
  cote_test::Rng rng(3);
  const std::vector<std::string> parts = {"a", "b", " | ", "|", " ", "x y"};
  for (int i = 0; i < 300; ++i) {
    std::string text = "v";
    const int n = rng.uniform(0, 6);
    for (int k = 0; k < n; ++k) text += rng.pick(parts);
    text += "w";
    // Scan oracle: leftmost index i with text[i..i+3) == " | ".
    std::size_t cut = std::string::npos;
    for (std::size_t p = 0; p + 3 <= text.size(); ++p) {
      if (text[p] == ' ' && text[p + 1] == '|' && text[p + 2] == ' ') {
        cut = p;
        break;
      }
    }
    auto trim = [](std::string v) {
      while (!v.empty() && v.front() == ' ') v.erase(v.begin());
      while (!v.empty() && v.back() == ' ') v.pop_back();
      return v;
    };
    const Generation expected =
        cut == std::string::npos
            ? Generation{trim(text), ""}
            : Generation{trim(text.substr(0, cut)), trim(text.substr(cut + 3))};
    EXPECT_EQ(parse_generation(text), expected) << text;
  }
}

std::string random_text(cote_test::Rng& rng, bool allow_separator) {
  static const std::vector<std::string> pieces = {
      "cheap", "5-star", "york", "system:", "user:", "the", "a|b", "|", "-", "42"};
  std::string out;
  const int n = rng.uniform(1, 8);
  for (int i = 0; i < n; ++i) {
    if (i > 0) out += allow_separator && rng.coin(0.2) ? " | " : " ";
    out += rng.pick(pieces);
  }
  return out;
}

TEST(TargetTest, RoundTripOnRandomPairs) {
  cote_test::Rng rng(500);
  for (int i = 0; i < 500; ++i) {
    std::string value = random_text(rng, false);
    while (!is_unambiguous_value(value)) value = random_text(rng, false);
    const std::string explanation = rng.coin(0.2) ? "" : random_text(rng, true);
    ASSERT_EQ(parse_generation(render_target(value, explanation)),
              (Generation{value, explanation}))
        << "value \"" << value << "\" explanation \"" << explanation << "\"";
  }
}

TEST(TargetTest, AmbiguousValues) {
  EXPECT_TRUE(is_unambiguous_value("cheap"));
  EXPECT_TRUE(is_unambiguous_value("a|b"));
  EXPECT_TRUE(is_unambiguous_value("|"));
  EXPECT_FALSE(is_unambiguous_value("cheap |"));
  EXPECT_FALSE(is_unambiguous_value("a | b"));
  EXPECT_FALSE(is_unambiguous_value(" cheap"));
  EXPECT_FALSE(is_unambiguous_value(""));
  EXPECT_EQ(parse_generation(render_target("cheap |", "x")).value, "cheap");
}

TEST(BuildDatasetTest, CartesianCountWithInactive) {
  Corpus c;
  c.schema = Schema({make_slot("hotel", "area", "area of the hotel", {"east", "west"}),
                     make_slot("hotel", "name", "name of the hotel"),
                     make_slot("hotel", "stars", "star rating of the hotel")});
  c.dialogues = {make_dialogue("d", Split::kTrain,
                               {{"", "east please", {{"hotel-area", "east"}}},
                                {"ok", "the acorn", {{"hotel-area", "east"},
                                                     {"hotel-name", "acorn"}}}})};
  BuildOptions options;
  options.include_inactive = true;
  auto all = build_dataset(c, PromptTemplate(), {}, options);
  ASSERT_EQ(all.size(), 6u);
  EXPECT_EQ(all[0].example_id, "d:1:hotel-area");
  EXPECT_EQ(all[1].target_value, "none");
  EXPECT_EQ(all[1].explanation_kind, ExplanationKind::kNone);
  EXPECT_EQ(all[1].explanation, "");
  options.include_inactive = false;
  EXPECT_EQ(build_dataset(c, PromptTemplate(), {}, options).size(), 3u);
}

TEST(BuildDatasetTest, NoExplanationsFlag) {
  Corpus c = exclude_domains(cote_test::load_fixture(), {"police"});
  BuildOptions options;
  options.include_explanations = false;
  for (const auto& e : build_dataset(c, PromptTemplate(), {}, options)) {
    EXPECT_EQ(e.explanation_kind, ExplanationKind::kNone);
    EXPECT_EQ(e.explanation, "");
    EXPECT_EQ(target_text(e), e.target_value);
  }
}

TEST(BuildDatasetTest, FixtureExamplesMatchReconstruction) {
  Corpus c = exclude_domains(cote_test::load_fixture(), {"police"});
  auto examples = build_dataset(c, PromptTemplate(), {}, BuildOptions{});
  std::size_t expected = 0;
  std::map<std::string, const CoTExample*> by_id;
  for (const auto& e : examples) by_id[e.example_id] = &e;
  for (const auto& d : c.dialogues) {
    for (const auto& turn : d.turns) {
      for (const auto& slot : c.schema.slots()) {
        if (cote_test::oracle_value_at(turn, slot.slot_id) == "none") continue;
        ++expected;
        const std::string id = d.dialogue_id + ":" + std::to_string(turn.index) +
                               ":" + slot.slot_id;
        ASSERT_TRUE(by_id.contains(id)) << id;
        const CoTExample& e = *by_id.at(id);
        auto turns = cote_test::oracle_change_turns(d, slot.slot_id, turn.index);
        EXPECT_EQ(e.target_value, turn.gold_state.at(slot.slot_id)) << id;
        EXPECT_EQ(e.explanation, oracle_explanation(d, turns)) << id;
        EXPECT_EQ(e.explanation_kind, ExplanationKind::kCoarse);
        EXPECT_EQ(e.meta.step_count, static_cast<int>(turns.size())) << id;
        EXPECT_EQ(e.meta.split, d.split);
        EXPECT_EQ(e.meta.dialogue_turns, d.num_turns());
        EXPECT_DOUBLE_EQ(e.meta.avg_utterance_len, cote_test::oracle_avg_len(d));
        EXPECT_EQ(e.input_text.rfind("Dialogue: ", 0), 0u);
        EXPECT_NE(e.input_text.find(" Domain: " + slot.domain + " Question: "),
                  std::string::npos);
      }
    }
  }
  EXPECT_EQ(examples.size(), expected);
  EXPECT_TRUE(std::is_sorted(examples.begin(), examples.end(),
                             [](const CoTExample& a, const CoTExample& b) {
                               return std::tie(a.meta.dialogue_id,
                                               a.meta.query_turn, a.meta.slot_id) <
                                      std::tie(b.meta.dialogue_id,
                                               b.meta.query_turn, b.meta.slot_id);
                             }));
}

TEST(BuildDatasetTest, SplitFilter) {
  Corpus c = exclude_domains(cote_test::load_fixture(), {"police"});
  BuildOptions options;
  options.split = Split::kTest;
  for (const auto& e : build_dataset(c, PromptTemplate(), {}, options)) {
    EXPECT_EQ(e.meta.split, Split::kTest);
  }
}

TEST(ExampleJsonTest, RoundTripAndLineErrors) {
  Corpus c = exclude_domains(cote_test::load_fixture(), {"police"});
  BuildOptions options;
  options.include_inactive = true;
  auto examples = build_dataset(c, PromptTemplate(), {}, options);
  for (const auto& e : examples) {
    ASSERT_EQ(example_from_json(example_to_json(e), "mem"), e);
  }
  cote_test::TempDir dir;
  write_examples(examples, dir / "x.jsonl");
  EXPECT_EQ(read_examples(dir / "x.jsonl"), examples);

  std::string text = examples_to_jsonl({examples[0], examples[1]});
  text += "{\"example_id\": 3}\n";
  write_file_atomic(dir / "bad.jsonl", text);
  try {
    read_examples(dir / "bad.jsonl");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.jsonl:3"), std::string::npos)
        << e.what();
  }
}

}  // namespace
}  // namespace cote
