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

#include "common/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "common/error.h"

namespace chrononer {

void PayloadWriter::U32(uint32_t v) {
  for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void PayloadWriter::U64(uint64_t v) {
  for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void PayloadWriter::F64(double v) { U64(std::bit_cast<uint64_t>(v)); }

void PayloadWriter::String(std::string_view s) {
  U32(static_cast<uint32_t>(s.size()));
  bytes_.append(s);
}

void PayloadWriter::Tensor(const Eigen::MatrixXd& m) {
  U32(static_cast<uint32_t>(m.rows()));
  U32(static_cast<uint32_t>(m.cols()));
  const double* data = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    U32(std::bit_cast<uint32_t>(static_cast<float>(data[i])));
  }
}

std::string_view PayloadReader::Take(size_t n) {
  if (bytes_.size() - pos_ < n) throw DataError("checkpoint truncated");
  auto out = bytes_.substr(pos_, n);
  pos_ += n;
  return out;
}

uint32_t PayloadReader::U32() {
  auto b = Take(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

uint64_t PayloadReader::U64() {
  auto b = Take(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

double PayloadReader::F64() { return std::bit_cast<double>(U64()); }

std::string PayloadReader::String() {
  const uint32_t n = U32();
  return std::string(Take(n));
}

Eigen::MatrixXd PayloadReader::Tensor() {
  const uint32_t rows = U32();
  const uint32_t cols = U32();
  if (static_cast<uint64_t>(rows) * cols * 4 > bytes_.size() - pos_) {
    throw DataError("checkpoint tensor exceeds payload");
  }
  Eigen::MatrixXd m(rows, cols);
  double* data = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    data[i] = static_cast<double>(std::bit_cast<float>(U32()));
  }
  return m;
}

std::string EncodeCheckpoint(const std::vector<CheckpointSection>& sections) {
  PayloadWriter w;
  w.U32(kCheckpointVersion);
  w.U32(static_cast<uint32_t>(sections.size()));
  for (const auto& s : sections) {
    w.String(s.tag);
    w.U64(s.payload.size());
  }
  // Header first, then payloads, so the section table can be read without
  // scanning the tensors.
  std::string out(kCheckpointMagic, 4);
  out += w.bytes();
  for (const auto& s : sections) out += s.payload;
  return out;
}

std::vector<CheckpointSection> DecodeCheckpoint(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) {
    throw DataError("not a CNER checkpoint (bad magic)");
  }
  PayloadReader r(bytes.substr(4));
  const uint32_t version = r.U32();
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  const uint32_t count = r.U32();
  std::vector<CheckpointSection> sections(count);
  std::vector<uint64_t> sizes(count);
  for (uint32_t i = 0; i < count; ++i) {
    sections[i].tag = r.String();
    sizes[i] = r.U64();
  }
  uint64_t total = 0;
  for (auto s : sizes) total += s;
  if (total != r.remaining()) throw DataError("checkpoint size mismatch");
  size_t offset = bytes.size() - total;
  for (uint32_t i = 0; i < count; ++i) {
    sections[i].payload = std::string(bytes.substr(offset, sizes[i]));
    offset += sizes[i];
  }
  return sections;
}

void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void RoundToFloat(Eigen::MatrixXd& m) {
  double* data = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    data[i] = static_cast<double>(static_cast<float>(data[i]));
  }
}

}  // namespace chrononer
