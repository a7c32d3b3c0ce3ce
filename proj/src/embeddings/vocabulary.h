// Copyright 2026 The Chrononer Authors.
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

#ifndef CHRONONER_EMBEDDINGS_VOCABULARY_H_
#define CHRONONER_EMBEDDINGS_VOCABULARY_H_

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "common/checkpoint.h"

namespace chrononer {

// Character inventory with four reserved ids. Regular characters follow in
// order of descending frequency, ties broken by ascending code point.
class Vocabulary {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kPad = 3;
  static constexpr int kNumReserved = 4;

  Vocabulary() = default;

  // Throws DataError when `texts` is empty.
  static Vocabulary Build(const std::vector<std::u32string>& texts, int min_count);

  int Id(char32_t c) const;
  // Code point for a regular id; 0 for reserved ids.
  char32_t Char(int id) const;
  int size() const { return kNumReserved + static_cast<int>(chars_.size()); }
  const std::vector<char32_t>& chars() const { return chars_; }

  std::vector<int> Encode(std::u32string_view text) const;

  void Serialize(PayloadWriter& w) const;
  static Vocabulary Deserialize(PayloadReader& r);

  bool operator==(const Vocabulary& other) const { return chars_ == other.chars_; }

 private:
  std::vector<char32_t> chars_;
  std::unordered_map<char32_t, int> ids_;
};

}  // namespace chrononer

#endif  // CHRONONER_EMBEDDINGS_VOCABULARY_H_
