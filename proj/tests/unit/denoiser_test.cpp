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

#include "artigen/diffusion/denoiser.hpp"

#include <random>

#include <gtest/gtest.h>

#include "artigen/diffusion/flow.hpp"
#include "artigen/error.hpp"
#include "artigen/oracles.hpp"
#include "artigen/synthgen.hpp"

namespace artigen::diffusion {
namespace {

DenoiserConfig small_config() {
  DenoiserConfig c;
  c.resolution = 8;
  c.patch = 2;
  c.d_model = 32;
  c.n_layers = 2;
  c.n_heads = 4;
  return c;
}

DiffusionState random_state(const DenoiserConfig& c, int movable, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  DiffusionState s;
  s.geo.resize(c.field_size());
  for (double& x : s.geo) x = n(rng);
  s.kin.resize(movable);
  for (auto& k : s.kin)
    for (double& x : k) x = n(rng);
  s.t = 0.3;
  return s;
}

TEST(Denoiser, FreshModelOutputsZero) {
  DenoiserConfig c;
  const Denoiser m(c);
  const AssetSample a = generate_asset(Family::kCabinetDoor, 1, 16);
  const Condition cond = Condition::from_blueprint(a.blueprint);
  const Velocity v = m.denoise(random_state(c, cond.movable().size(), 2), cond);
  for (double x : v.geo) ASSERT_EQ(x, 0.0);
  for (const auto& k : v.kin)
    for (double x : k) ASSERT_EQ(x, 0.0);
}

TEST(Denoiser, OutputShapes) {
  DenoiserConfig c;
  EXPECT_EQ(c.geo_tokens(), 64);
  Denoiser m(c);
  m.randomize_output_layers(0.1, 4);
  const AssetSample a = generate_asset(Family::kCabinetDoor, 1, 16);
  const Condition cond = Condition::from_blueprint(a.blueprint);
  ASSERT_EQ(cond.movable().size(), 2u);
  const Velocity v = m.denoise(random_state(c, 2, 3), cond);
  EXPECT_EQ(v.geo.size(), 4096u);
  EXPECT_EQ(v.kin.size(), 2u);
  EXPECT_THROW(m.denoise(random_state(c, 1, 3), cond), Error);
}

TEST(Denoiser, ConfigValidation) {
  DenoiserConfig c = small_config();
  c.patch = 3;
  EXPECT_THROW(c.validate(), Error);
  c = small_config();
  c.d_model = 30;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_NO_THROW(small_config().validate());
}

TEST(Denoiser, TooManyParts) {
  DenoiserConfig c = small_config();
  c.max_parts = 2;
  const Denoiser m(c);
  const AssetSample a = generate_asset(Family::kCabinetDoor, 1, 8);
  const Condition cond = Condition::from_blueprint(a.blueprint);
  ASSERT_GT(cond.boxes.size(), 2u);
  try {
    m.denoise(random_state(c, cond.movable().size(), 1), cond);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kTooManyParts);
  }
}

TEST(Denoiser, SwappingMovablePartsSwapsKinematicOutput) {
  DenoiserConfig c = small_config();
  Denoiser m(c);
  m.randomize_output_layers(0.2, 9);
  const AssetSample a = generate_asset(Family::kCabinetDoor, 1, 8);
  Condition cond = Condition::from_blueprint(a.blueprint);
  ASSERT_EQ(cond.movable(), (std::vector<int>{1, 2}));
  DiffusionState s = random_state(c, 2, 5);
  const Velocity v = m.denoise(s, cond);

  std::swap(cond.boxes[1], cond.boxes[2]);
  std::swap(cond.types[1], cond.types[2]);
  std::swap(s.kin[0], s.kin[1]);
  const Velocity w = m.denoise(s, cond);
  for (int i = 0; i < kKineDim; ++i) {
    EXPECT_NEAR(w.kin[0][i], v.kin[1][i], 1e-12);
    EXPECT_NEAR(w.kin[1][i], v.kin[0][i], 1e-12);
  }
  for (size_t i = 0; i < v.geo.size(); ++i) EXPECT_NEAR(w.geo[i], v.geo[i], 1e-12);
}

TEST(Denoiser, GradientMatchesFiniteDifferences) {
  const DenoiserConfig c = small_config();
  for (std::uint64_t seed = 0; seed < 2; ++seed) {
    Denoiser m(c);
    m.randomize_output_layers(0.2, seed);
    const AssetSample a = generate_asset(kAllFamilies[seed], seed, 8);
    const std::vector<TrainingExample> data = {make_example(a.blueprint, a.grid, c.scales)};
    const oracles::GradCheckReport r = oracles::gradient_check(m, data, seed, 60, 1e-4, 1e-6);
    EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_param << " " << r.worst_analytic << " "
                                     << r.worst_numeric;
  }
}

TEST(Denoiser, GradientIndependentOfBufferAlignment) {
  const DenoiserConfig c = small_config();
  Denoiser m(c);
  m.randomize_output_layers(0.2, 3);
  const AssetSample a = generate_asset(Family::kHingedLid, 3, 8);
  const TrainingExample ex = make_example(a.blueprint, a.grid, c.scales);
  std::mt19937_64 rng(4);
  const DiffusionState x0 = draw_noise(ex, rng);
  AlignedBuffer aligned(m.param_count(), 0.0);
  example_loss(m, ex, x0, 0.4, aligned);
  std::vector<double> shifted(m.param_count() + 1, 0.0);
  example_loss(m, ex, x0, 0.4, std::span<double>(shifted).subspan(1));
  for (size_t i = 0; i < aligned.size(); ++i) ASSERT_EQ(aligned[i], shifted[i + 1]) << i;
}

TEST(Denoiser, LayoutCoversEveryParameter) {
  const Denoiser m(small_config());
  std::size_t total = 0;
  for (const ParamTensor& t : m.layout()) {
    EXPECT_EQ(t.offset, total) << t.name;
    total += t.size();
  }
  EXPECT_EQ(total, m.param_count());
}

}  // namespace
}  // namespace artigen::diffusion
