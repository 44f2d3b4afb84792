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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "artigen/blueprint.hpp"
#include "artigen/synthgen.hpp"
#include "artigen/voxelgrid.hpp"

namespace artigen {

// Whole-file helpers. Throw Error(kIo).
std::string read_text(const std::filesystem::path& path);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

struct DatasetEntry {
  std::string id;  // "0000", ...
  Blueprint blueprint;
  VoxelGrid grid;
};

// <dir>/assets/NNNN.blueprint.json, <dir>/assets/NNNN.kvox and
// <dir>/manifest.json {"spec", "seed", "R", "count"}.
void write_dataset(const std::filesystem::path& dir, const std::vector<AssetSample>& samples,
                   std::string_view spec, std::uint64_t seed, int resolution);

// Every NNNN.blueprint.json under <dir>/assets with its NNNN.kvox, in name
// order. Throws Error(kIo) when the directory or a grid file is missing.
std::vector<DatasetEntry> load_dataset(const std::filesystem::path& dir);

}  // namespace artigen
