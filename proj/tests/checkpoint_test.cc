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

#include <cmath>
#include <filesystem>
#include <limits>

#include <gtest/gtest.h>

#include "common/digest.h"
#include "common/error.h"

namespace chrononer {
namespace {

TEST(CheckpointTest, SectionsRoundTrip) {
  PayloadWriter w;
  w.U32(7);
  w.I64(-3);
  w.F64(0.1);
  w.String("名前");
  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, 4, 5, 6.5;
  w.Tensor(m);
  const std::string bytes = EncodeCheckpoint({{"A", w.bytes()}, {"EMPTY", ""}});
  EXPECT_EQ(bytes.substr(0, 4), "CNER");
  const auto sections = DecodeCheckpoint(bytes);
  ASSERT_EQ(sections.size(), 2u);
  EXPECT_EQ(sections[0].tag, "A");
  EXPECT_EQ(sections[1].tag, "EMPTY");
  EXPECT_TRUE(sections[1].payload.empty());
  PayloadReader r(sections[0].payload);
  EXPECT_EQ(r.U32(), 7u);
  EXPECT_EQ(r.I64(), -3);
  EXPECT_EQ(r.F64(), 0.1);
  EXPECT_EQ(r.String(), "名前");
  EXPECT_EQ(r.Tensor(), m);
  EXPECT_TRUE(r.AtEnd());
  EXPECT_THROW(r.U32(), DataError);
}

TEST(CheckpointTest, TensorsAreStoredAsFloat) {
  Eigen::MatrixXd m(1, 2);
  m << 0.1, -1e-3;
  PayloadWriter w;
  w.Tensor(m);
  EXPECT_EQ(w.bytes().size(), 8u + 2 * 4);
  PayloadReader r(w.bytes());
  const Eigen::MatrixXd back = r.Tensor();
  EXPECT_EQ(back(0, 0), static_cast<double>(0.1f));
  Eigen::MatrixXd rounded = m;
  RoundToFloat(rounded);
  EXPECT_EQ(back, rounded);
  PayloadWriter again;
  again.Tensor(back);
  EXPECT_EQ(again.bytes(), w.bytes());
}

TEST(CheckpointTest, RejectsCorruptInput) {
  const std::string good = EncodeCheckpoint({{"X", "payload"}});
  EXPECT_THROW(DecodeCheckpoint("JUNKJUNKJUNK"), DataError);
  EXPECT_THROW(DecodeCheckpoint(good.substr(0, good.size() - 1)), DataError);
  EXPECT_THROW(DecodeCheckpoint(good + "x"), DataError);
  std::string bad_version = good;
  bad_version[4] = 9;
  EXPECT_THROW(DecodeCheckpoint(bad_version), DataError);
  PayloadWriter w;
  w.U32(1000);
  w.U32(1000);
  PayloadReader r(w.bytes());
  EXPECT_THROW(r.Tensor(), DataError);
}

TEST(CheckpointTest, FilesAndDigests) {
  EXPECT_EQ(Sha256Hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(Sha256Hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const auto dir = std::filesystem::temp_directory_path() / "chrononer_checkpoint_test";
  std::filesystem::create_directories(dir);
  const auto file = dir / "x.bin";
  const std::string bytes("a\0b", 3);
  WriteFileBytes(file, bytes);
  EXPECT_EQ(ReadFileBytes(file), bytes);
  EXPECT_EQ(Sha256File(file), Sha256Hex(bytes));
  EXPECT_THROW(ReadFileBytes(dir / "missing.bin"), DataError);
  EXPECT_THROW(Sha256File(dir / "missing.bin"), DataError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace chrononer
