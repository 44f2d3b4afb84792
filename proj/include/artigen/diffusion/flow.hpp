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
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "artigen/diffusion/denoiser.hpp"
#include "artigen/voxelgrid.hpp"

namespace artigen::diffusion {

// One data endpoint x1 together with its condition.
struct TrainingExample {
  std::string id;
  DiffusionState data;  // t unused
  Condition cond;
};

// Signed occupancy field plus packed joints of the movable parts.
// Throws Error(kInvalidJoint) for a joint that cannot be packed.
TrainingExample make_example(const Blueprint& bp, const VoxelGrid& grid, const KineScales& s,
                             std::string id = {});

struct CfmPair {
  DiffusionState xt;
  Velocity target;
};

// x_t = (1 - t) x0 + t x1, target = x1 - x0. Throws Error(kShapeMismatch).
CfmPair cfm_pair(const DiffusionState& x0, const DiffusionState& x1, double t);

struct LossTerms {
  double total = 0.0;
  double l_geo = 0.0;
  double l_kine = 0.0;
};

inline double composite_loss(double l_geo, double l_kine, double lambda) {
  return l_geo + lambda * l_kine;
}

// MSE terms between prediction and target. When `grad` is given it receives
// d(total)/d(pred), scaled by `weight`.
LossTerms velocity_loss(const Velocity& pred, const Velocity& target, double lambda,
                        Velocity* grad = nullptr, double weight = 1.0);

// Noise draw for an example: geometry then kinematic entries, in order.
DiffusionState draw_noise(const TrainingExample& ex, std::mt19937_64& rng);

// Loss of one example at a fixed (x0, t). Accumulates weight * gradient into
// `grad` when it is non-empty.
LossTerms example_loss(const Denoiser& model, const TrainingExample& ex, const DiffusionState& x0,
                       double t, std::span<double> grad = {}, double weight = 1.0);

// Batch mean of the composite loss; per sample t ~ U(0,1) then x0 ~ N(0, I),
// drawn from `rng` in batch order.
LossTerms batch_loss(const Denoiser& model, std::span<const TrainingExample* const> batch,
                     std::mt19937_64& rng, std::span<double> grad = {});

enum class Optimizer { kSgdMomentum, kAdam };

struct TrainConfig {
  Optimizer optimizer = Optimizer::kSgdMomentum;
  int steps = 1000;
  int batch_size = 8;
  double lr = 0.05;
  double momentum = 0.9;  // SGD momentum, or Adam beta1
  double beta2 = 0.999;   // Adam only
  double eps = 1e-8;      // Adam only
  double grad_clip = 1.0;  // global L2 norm; <= 0 disables
  bool cosine_decay = false;  // lr * 0.5 (1 + cos(pi step / steps))
  double ema_decay = 0.0;     // > 0: the model ends with the weight average
  std::uint64_t seed = 0;
};

struct LossRecord {
  int step = 0;
  LossTerms terms;
};

// SGD with momentum (default) or Adam. Batches walk seeded permutations of
// the dataset. With ema_decay set, the trained parameters are replaced by
// their exponential moving average after the last step.
// Throws Error(kNanLoss) naming the step.
std::vector<LossRecord> train(Denoiser& model, std::span<const TrainingExample> data,
                              const TrainConfig& cfg,
                              const std::function<void(const LossRecord&)>& on_step = {});

using VelocityField = std::function<Velocity(const DiffusionState&)>;

// Forward Euler from t = 0 to t = 1. The state is kept as x0 + t * (running
// mean of velocities), which equals the usual update and is exact for
// constant fields.
DiffusionState integrate_flow(const VelocityField& field, const DiffusionState& x0, int steps);

struct SampleResult {
  std::vector<double> field;       // final geometry state
  VoxelGrid occupancy;             // field > 0, labeled by condition boxes
  std::vector<KineState> kin;      // final kinematic states
  std::vector<int> movable;        // condition part index of each kin entry
  std::vector<std::optional<Joint>> joints;
  std::vector<std::string> joint_errors;  // empty when the joint unpacked
};

// Assigns each occupied voxel the label of the last condition box containing
// its center. Occupied voxels outside every box take the nearest box.
VoxelGrid label_by_boxes(const VoxelGrid& occupancy, std::span<const QuantBox> boxes);

SampleResult sample(const Denoiser& model, const Condition& cond, int steps, std::uint64_t seed);

// Noise draw used by sample(): R^3 geometry entries then 8 per movable part.
DiffusionState sample_noise(const DenoiserConfig& cfg, const Condition& cond, std::uint64_t seed);

}  // namespace artigen::diffusion
