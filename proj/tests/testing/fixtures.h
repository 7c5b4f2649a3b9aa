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


#ifndef COTE_TESTS_TESTING_FIXTURES_H_
#define COTE_TESTS_TESTING_FIXTURES_H_

#include <atomic>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cote/corpus.h"

namespace cote_test {

namespace fs = std::filesystem;

inline fs::path data_dir() { return fs::path(COTE_TEST_DATA_DIR); }
inline fs::path fixture_dir() { return data_dir() / "fixture"; }
inline fs::path test_data_dir() { return fs::path(COTE_TEST_FILES_DIR); }
inline fs::path golden_dir() { return fs::path(COTE_TEST_GOLDEN_DIR); }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("cote_test_" + std::to_string(rd()) + "_" +
             std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

struct TurnSpec {
  std::string system;
  std::string user;
  cote::DialogueState state;
};

inline cote::Dialogue make_dialogue(std::string id, cote::Split split,
                                    std::vector<TurnSpec> turns) {
  cote::Dialogue d;
  d.dialogue_id = std::move(id);
  d.split = split;
  int index = 0;
  for (auto& t : turns) {
    d.turns.push_back({++index, std::move(t.system), std::move(t.user),
                       std::move(t.state)});
  }
  return d;
}

inline cote::SlotSchema make_slot(const std::string& domain,
                                  const std::string& name,
                                  std::string description,
                                  std::vector<std::string> values = {}) {
  cote::SlotSchema s;
  s.slot_id = domain + "-" + name;
  s.domain = domain;
  s.name = name;
  s.description = std::move(description);
  if (!values.empty()) s.possible_values = std::move(values);
  return s;
}

// The bundled fixture as shipped (police slots and dialogue included).
inline cote::Corpus load_fixture() {
  cote::Corpus c = cote::load_corpus({fixture_dir() / "dialogues.json"},
                                     cote::load_schema(fixture_dir() / "schema.json"));
  c.name = "fixture";
  return c;
}

}  // namespace cote_test

#endif  // COTE_TESTS_TESTING_FIXTURES_H_
