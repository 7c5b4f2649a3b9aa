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

// Path-aware accessors over nlohmann::json. Every failure throws FormatError
// whose message starts with the location of the offending value, e.g.
// "dialogues.json: [3].turns[1].state.hotel-area: expected string".

#ifndef COTE_SRC_JSON_UTIL_H_
#define COTE_SRC_JSON_UTIL_H_

#include <string>
#include <string_view>
#include <vector>

#include "cote/error.h"
#include "json.hpp"

namespace cote {

using ordered_json = nlohmann::ordered_json;

class JsonPath {
 public:
  explicit JsonPath(std::string_view origin) : origin_(origin) {}

  JsonPath field(std::string_view key) const {
    JsonPath p = *this;
    if (!p.suffix_.empty()) p.suffix_ += '.';
    p.suffix_ += key;
    return p;
  }
  JsonPath index(std::size_t i) const {
    JsonPath p = *this;
    p.suffix_ += "[" + std::to_string(i) + "]";
    return p;
  }
  std::string str() const {
    return suffix_.empty() ? origin_ : origin_ + ": " + suffix_;
  }

 private:
  std::string origin_;
  std::string suffix_;
};

inline ordered_json parse_json(std::string_view text,
                               std::string_view origin) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string(origin) + ": invalid JSON (byte " +
                      std::to_string(e.byte) + ")");
  }
}

inline void require_object(const ordered_json& j, const JsonPath& path) {
  if (!j.is_object()) throw FormatError(path.str() + ": expected object");
}

inline void require_array(const ordered_json& j, const JsonPath& path) {
  if (!j.is_array()) throw FormatError(path.str() + ": expected array");
}

inline const ordered_json& require_field(const ordered_json& j,
                                         std::string_view key,
                                         const JsonPath& path) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw FormatError(path.field(key).str() + ": missing field");
  }
  return *it;
}

inline std::string get_string(const ordered_json& j, const JsonPath& path) {
  if (!j.is_string()) throw FormatError(path.str() + ": expected string");
  return j.get<std::string>();
}

inline bool get_bool(const ordered_json& j, const JsonPath& path) {
  if (!j.is_boolean()) throw FormatError(path.str() + ": expected boolean");
  return j.get<bool>();
}

inline long long get_int(const ordered_json& j, const JsonPath& path) {
  if (j.is_number_integer()) return j.get<long long>();
  // Some upstream releases store integers as strings ("turn_id": "4").
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    try {
      std::size_t used = 0;
      long long v = std::stoll(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  throw FormatError(path.str() + ": expected integer");
}

inline double get_number(const ordered_json& j, const JsonPath& path) {
  if (!j.is_number()) throw FormatError(path.str() + ": expected number");
  return j.get<double>();
}

inline std::vector<std::string> get_string_array(const ordered_json& j,
                                                 const JsonPath& path) {
  require_array(j, path);
  std::vector<std::string> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get_string(j[i], path.index(i)));
  }
  return out;
}

}  // namespace cote

#endif  // COTE_SRC_JSON_UTIL_H_
