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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "artigen/blueprint.hpp"
#include "artigen/boxcodec.hpp"
#include "artigen/kinevoxel.hpp"
#include "artigen/planner.hpp"

namespace artigen::diffusion {

// 64-byte aligned allocation. Eigen picks its vectorized loop peeling from the
// buffer address, so fixed alignment keeps floating-point results identical
// across allocations.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using AlignedBuffer = std::vector<double, AlignedAllocator<double>>;

struct DenoiserConfig {
  int resolution = 16;
  int patch = 4;  // (resolution / patch)^3 geometry tokens
  int d_model = 128;
  int n_layers = 4;
  int n_heads = 4;
  int mlp_ratio = 4;
  int max_parts = 8;
  double lambda_kine = 10.0;
  int sampler_steps = 50;
  std::uint64_t seed = 0;
  KineScales scales;

  bool operator==(const DenoiserConfig&) const = default;

  int patch_volume() const { return patch * patch * patch; }
  int geo_tokens() const {
    const int n = resolution / patch;
    return n * n * n;
  }
  int field_size() const { return resolution * resolution * resolution; }

  // Throws Error(kShapeMismatch) describing the first broken constraint.
  void validate() const;
};

// Plan-derived condition: quantized part boxes and planned joint types.
struct Condition {
  std::vector<QuantBox> boxes;
  std::vector<JointType> types;

  static Condition from_plan(const Plan& plan);
  static Condition from_blueprint(const Blueprint& bp);

  // Indices of parts with non-fixed joints, in part order.
  std::vector<int> movable() const;
};

struct DiffusionState {
  std::vector<double> geo;       // R^3, x-fastest
  std::vector<KineState> kin;    // one per movable part
  double t = 0.0;
};

struct Velocity {
  std::vector<double> geo;
  std::vector<KineState> kin;
};

// Named slice of the flat parameter vector.
struct ParamTensor {
  std::string name;
  std::size_t offset = 0;
  int rows = 0;
  int cols = 0;

  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

// Opaque per-pass activation cache filled by forward() and read by backward().
class Activations {
 public:
  Activations();
  ~Activations();
  Activations(Activations&&) noexcept;
  Activations& operator=(Activations&&) noexcept;

 private:
  friend class Denoiser;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Patch-embed + middle transformer + un-embed denoiser with KineVoxel
// injection: each movable part contributes one token, lifted from its
// 8-vector by a 2-layer MLP and tagged with its joint-type embedding, appended
// to the geometry token sequence after patch embedding.
class Denoiser {
 public:
  explicit Denoiser(const DenoiserConfig& cfg);
  Denoiser(const DenoiserConfig& cfg, std::span<const double> params);

  const DenoiserConfig& config() const { return cfg_; }
  std::span<const double> params() const { return params_; }
  std::span<double> params() { return params_; }
  std::size_t param_count() const { return params_.size(); }
  const std::vector<ParamTensor>& layout() const;

  // Replaces the zero-initialized output layers with small random weights.
  // Used by gradient checks, where zero output layers would mask most paths.
  void randomize_output_layers(double stddev, std::uint64_t seed);

  // Throws Error(kShapeMismatch) or Error(kTooManyParts).
  Velocity denoise(const DiffusionState& state, const Condition& cond) const;

  Velocity forward(const DiffusionState& state, const Condition& cond, Activations& cache) const;

  // Accumulates d(loss)/d(params) into `grad` given d(loss)/d(output).
  // Buffers that are not 64-byte aligned go through an aligned scratch copy.
  void backward(const Activations& cache, const Velocity& grad_out, std::span<double> grad) const;

 private:
  struct Layout;
  void check_inputs(const DiffusionState& state, const Condition& cond) const;
  void backward_aligned(const Activations& cache, const Velocity& grad_out,
                        std::span<double> grad) const;

  DenoiserConfig cfg_;
  std::shared_ptr<const Layout> layout_;
  AlignedBuffer params_;
};

}  // namespace artigen::diffusion
