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

#ifndef CHRONONER_COMMON_CHECKPOINT_H_
#define CHRONONER_COMMON_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace chrononer {

// Binary model container.
//
//   "CNER" | u32 version | u32 section count | sections...
//   section: u32 tag length | tag bytes | u64 payload length | payload
//
// All integers are little-endian. Tensors are stored as u32 rows, u32 cols
// and rows*cols little-endian IEEE-754 binary32 values in column-major order.
// Models keep their parameters in double precision but round them to float
// before use, so a write/read cycle reproduces them bit for bit.
inline constexpr char kCheckpointMagic[4] = {'C', 'N', 'E', 'R'};
inline constexpr uint32_t kCheckpointVersion = 1;

class PayloadWriter {
 public:
  void U32(uint32_t v);
  void U64(uint64_t v);
  void I64(int64_t v) { U64(static_cast<uint64_t>(v)); }
  void F64(double v);
  void String(std::string_view s);
  void Tensor(const Eigen::MatrixXd& m);

  const std::string& bytes() const { return bytes_; }

 private:
  std::string bytes_;
};

class PayloadReader {
 public:
  explicit PayloadReader(std::string_view bytes) : bytes_(bytes) {}

  uint32_t U32();
  uint64_t U64();
  int64_t I64() { return static_cast<int64_t>(U64()); }
  double F64();
  std::string String();
  Eigen::MatrixXd Tensor();

  bool AtEnd() const { return pos_ == bytes_.size(); }
  size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view Take(size_t n);

  std::string_view bytes_;
  size_t pos_ = 0;
};

struct CheckpointSection {
  std::string tag;
  std::string payload;
};

std::string EncodeCheckpoint(const std::vector<CheckpointSection>& sections);
std::vector<CheckpointSection> DecodeCheckpoint(std::string_view bytes);

void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);
std::string ReadFileBytes(const std::filesystem::path& path);

// Rounds every entry to the nearest binary32 value.
void RoundToFloat(Eigen::MatrixXd& m);

}  // namespace chrononer

#endif  // CHRONONER_COMMON_CHECKPOINT_H_
