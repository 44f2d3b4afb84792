// Copyright 2026 The Artigen Authors
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

#include "artigen/io.hpp"

#include <gtest/gtest.h>

#include "artigen/error.hpp"
#include "test_util.hpp"

namespace artigen {
namespace {

TEST(Io, DatasetRoundTrip) {
  testing::TempDir dir;
  const DatasetSpec spec = {{Family::kHingedLid, 2}, {Family::kFixedHandle, 1}};
  const auto samples = generate_dataset(spec, 5, 16);
  write_dataset(dir.path(), samples, "hinged_lid=2,fixed_handle=1", 5, 16);
  const auto back = load_dataset(dir.path());
  ASSERT_EQ(back.size(), 3u);
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].blueprint, samples[i].blueprint);
    EXPECT_EQ(back[i].grid, samples[i].grid);
  }
  EXPECT_EQ(back[2].id, "0002");
  EXPECT_NE(read_text(dir.path() / "manifest.json").find("\"count\": 3"), std::string::npos);
}

TEST(Io, MissingFiles) {
  testing::TempDir dir;
  EXPECT_THROW(read_text(dir.path() / "nope.txt"), Error);
  EXPECT_THROW(load_dataset(dir.path() / "nope"), Error);
}

TEST(Io, CorpusManifestMatchesRegeneration) {
  const auto entries = testing::corpus();
  const DatasetSpec spec = parse_dataset_spec(
      "cabinet_door=3,drawer_chest=3,hinged_lid=2,rotary_knob=2,fixed_handle=2");
  const auto regen = generate_dataset(spec, 2026, 16);
  ASSERT_EQ(regen.size(), entries.size());
  for (size_t i = 0; i < regen.size(); ++i) {
    EXPECT_EQ(regen[i].blueprint, entries[i].blueprint) << i;
    EXPECT_EQ(regen[i].grid, entries[i].grid) << i;
  }
}

}  // namespace
}  // namespace artigen
