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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "artigen/blueprint.hpp"
#include "artigen/voxelgrid.hpp"

namespace artigen {

enum class Family { kCabinetDoor, kDrawerChest, kHingedLid, kRotaryKnob, kFixedHandle };

inline constexpr Family kAllFamilies[] = {Family::kCabinetDoor, Family::kDrawerChest,
                                          Family::kHingedLid, Family::kRotaryKnob,
                                          Family::kFixedHandle};

std::string_view to_string(Family f);
std::optional<Family> parse_family(std::string_view s);

struct AssetSample {
  Blueprint blueprint;
  VoxelGrid grid;
  Family family = Family::kCabinetDoor;

  bool operator==(const AssetSample&) const = default;
};

// Deterministic in (family, seed, resolution). Throws Error(kResolution) for R < 8.
AssetSample generate_asset(Family family, std::uint64_t seed, int resolution);

// Ordered (family, count) pairs; asset i uses seed + i.
using DatasetSpec = std::vector<std::pair<Family, int>>;

std::vector<AssetSample> generate_dataset(const DatasetSpec& spec, std::uint64_t seed,
                                          int resolution);

// Parses "cabinet_door=2,drawer_chest=3". Throws Error(kSchema).
DatasetSpec parse_dataset_spec(std::string_view text);

}  // namespace artigen
