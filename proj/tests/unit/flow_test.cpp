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

#include "artigen/diffusion/flow.hpp"

#include <gtest/gtest.h>

#include "artigen/error.hpp"
#include "artigen/synthgen.hpp"

namespace artigen::diffusion {
namespace {

DenoiserConfig tiny_config() {
  DenoiserConfig c;
  c.resolution = 8;
  c.patch = 4;
  c.d_model = 16;
  c.n_layers = 1;
  c.n_heads = 2;
  return c;
}

std::vector<TrainingExample> tiny_data(const DenoiserConfig& c) {
  std::vector<TrainingExample> out;
  const auto ds = generate_dataset({{Family::kCabinetDoor, 1}, {Family::kRotaryKnob, 1}}, 0, 8);
  for (const auto& a : ds) out.push_back(make_example(a.blueprint, a.grid, c.scales));
  return out;
}

DiffusionState scalar(double x) {
  DiffusionState s;
  s.geo = {x};
  return s;
}

TEST(Flow, CfmPair) {
  const DiffusionState x0 = scalar(0.0), x1 = scalar(2.0);
  EXPECT_EQ(cfm_pair(x0, x1, 0.0).xt.geo[0], 0.0);
  EXPECT_EQ(cfm_pair(x0, x1, 1.0).xt.geo[0], 2.0);
  const CfmPair p = cfm_pair(x0, x1, 0.25);
  EXPECT_EQ(p.xt.geo[0], 0.5);
  EXPECT_EQ(p.target.geo[0], 2.0);
  EXPECT_THROW(cfm_pair(x0, DiffusionState{}, 0.5), Error);
}

TEST(Flow, LossTerms) {
  EXPECT_NEAR(composite_loss(0.2, 0.05, 10.0), 0.7, 1e-15);
  Velocity v;
  v.geo = {1.0, -2.0};
  v.kin = {KineState{1, 2, 3, 4, 5, 6, 7, 8}};
  EXPECT_EQ(velocity_loss(v, v, 10.0).total, 0.0);
  Velocity w = v;
  w.geo[0] += 1.0;
  w.kin[0][0] += 2.0;
  const LossTerms t = velocity_loss(w, v, 10.0);
  EXPECT_NEAR(t.l_geo, 0.5, 1e-15);
  EXPECT_NEAR(t.l_kine, 0.5, 1e-15);
  EXPECT_NEAR(t.total, 5.5, 1e-15);
}

TEST(Flow, ZeroStepsLeavesModelUntouched) {
  const DenoiserConfig c = tiny_config();
  Denoiser m(c);
  const std::vector<double> before(m.params().begin(), m.params().end());
  TrainConfig tc;
  tc.steps = 0;
  EXPECT_TRUE(train(m, tiny_data(c), tc).empty());
  EXPECT_TRUE(std::equal(before.begin(), before.end(), m.params().begin()));
}

TEST(Flow, TrainingIsDeterministic) {
  const DenoiserConfig c = tiny_config();
  const auto data = tiny_data(c);
  for (Optimizer opt : {Optimizer::kSgdMomentum, Optimizer::kAdam}) {
    TrainConfig tc;
    tc.optimizer = opt;
    tc.steps = 5;
    tc.lr = opt == Optimizer::kAdam ? 1e-3 : 0.05;
    tc.seed = 3;
    Denoiser a(c), b(c);
    const auto ta = train(a, data, tc);
    const auto tb = train(b, data, tc);
    ASSERT_EQ(ta.size(), 5u);
    for (size_t i = 0; i < ta.size(); ++i) EXPECT_EQ(ta[i].terms.total, tb[i].terms.total);
    const std::vector<double> pa(a.params().begin(), a.params().end());
    const std::vector<double> pb(b.params().begin(), b.params().end());
    EXPECT_EQ(pa, pb) << "optimizer " << static_cast<int>(opt);
  }
}

// Single-batch losses are noisy, so compare averages over one fixed set of draws.
double held_loss(const Denoiser& m, const std::vector<TrainingExample>& data) {
  std::vector<const TrainingExample*> batch;
  for (const auto& e : data) batch.push_back(&e);
  std::mt19937_64 rng(123);
  double sum = 0.0;
  for (int i = 0; i < 50; ++i) sum += batch_loss(m, batch, rng).total;
  return sum / 50;
}

TEST(Flow, TrainingReducesLoss) {
  const DenoiserConfig c = tiny_config();
  const auto data = tiny_data(c);
  Denoiser m(c);
  const double before = held_loss(m, data);
  TrainConfig tc;
  tc.optimizer = Optimizer::kAdam;
  tc.lr = 3e-3;
  tc.steps = 300;
  train(m, data, tc);
  EXPECT_LT(held_loss(m, data), 0.8 * before);
}

TEST(Flow, DivergenceIsReported) {
  const DenoiserConfig c = tiny_config();
  Denoiser m(c);
  m.randomize_output_layers(0.1, 0);
  TrainConfig tc;
  tc.steps = 50;
  tc.lr = 1e200;
  tc.grad_clip = 0.0;
  try {
    train(m, tiny_data(c), tc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNanLoss);
  }
}

TEST(Flow, ConstantFieldIsIntegratedExactly) {
  DiffusionState x0;
  x0.geo = {0.1, -0.7, 3.0};
  x0.kin = {KineState{1, 2, 3, 4, 5, 6, 7, 8}};
  Velocity c;
  c.geo = {0.3, 1.1, -2.5};
  c.kin = {KineState{-1, 0.5, 0.25, 0.125, 3, 0, 1e-3, 7}};
  for (int steps : {1, 3, 7, 50, 1000}) {
    const DiffusionState x1 = integrate_flow([&](const DiffusionState&) { return c; }, x0, steps);
    for (size_t i = 0; i < 3; ++i) EXPECT_EQ(x1.geo[i], x0.geo[i] + c.geo[i]);
    for (int i = 0; i < kKineDim; ++i) EXPECT_EQ(x1.kin[0][i], x0.kin[0][i] + c.kin[0][i]);
    EXPECT_EQ(x1.t, 1.0);
  }
}

TEST(Flow, ZeroModelReturnsThresholdedNoise) {
  const DenoiserConfig c = tiny_config();
  const Denoiser m(c);
  const AssetSample a = generate_asset(Family::kCabinetDoor, 0, 8);
  const Condition cond = Condition::from_blueprint(a.blueprint);
  const DiffusionState noise = sample_noise(c, cond, 17);
  const SampleResult r = sample(m, cond, 10, 17);
  EXPECT_EQ(r.field, noise.geo);
  EXPECT_EQ(r.kin, noise.kin);
  for (size_t v = 0; v < noise.geo.size(); ++v) {
    EXPECT_EQ(r.occupancy.labels()[v] > 0, noise.geo[v] > 0.0);
  }
}

TEST(Flow, LabelByBoxes) {
  VoxelGrid occ(4);
  occ.set(0, 0, 0, 1);
  occ.set(3, 3, 3, 1);
  const std::vector<QuantBox> boxes = {{{0, 0, 0}, {31, 31, 31}}, {{0, 0, 0}, {15, 15, 15}}};
  const VoxelGrid l = label_by_boxes(occ, boxes);
  EXPECT_EQ(l.at(0, 0, 0), 2);  // last containing box wins
  EXPECT_EQ(l.at(3, 3, 3), 1);  // nearest box
  EXPECT_EQ(l.occupied(), 2u);
}

}  // namespace
}  // namespace artigen::diffusion
