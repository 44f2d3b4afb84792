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
#include <span>
#include <string>
#include <vector>

#include "artigen/diffusion/denoiser.hpp"
#include "artigen/diffusion/flow.hpp"

namespace artigen::diffusion {

// "KVIM1" | config block | u64 parameter count | float32 parameters, all
// little endian. Config block: resolution, patch, d_model, n_layers, n_heads,
// mlp_ratio, max_parts (i32 each), lambda_kine (f64), sampler_steps (i32),
// seed (u64), scales origin/axis/limits (f64 each).
std::vector<std::uint8_t> encode_checkpoint(const Denoiser& model);
Denoiser decode_checkpoint(std::span<const std::uint8_t> bytes);  // throws Error(kSyntax)

void save_checkpoint(const std::filesystem::path& path, const Denoiser& model);
Denoiser load_checkpoint(const std::filesystem::path& path);  // throws Error(kIo / kSyntax)

// "step,loss,l_geo,l_kine" header then one row per record.
std::string loss_trace_csv(std::span<const LossRecord> trace);

}  // namespace artigen::diffusion
