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

#include <Eigen/Core>
#include <cmath>
#include <random>

#include "artigen/error.hpp"

namespace artigen::diffusion {

namespace {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVec = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using CMap = Eigen::Map<const Mat>;
using GMap = Eigen::Map<Mat>;

constexpr double kLayerNormEps = 1e-5;
constexpr double kTimeScale = 100.0;
constexpr double kEmbedStd = 0.2;
constexpr int kBoxSlots = 6;

struct LayerNormCache {
  Mat xhat;
  Eigen::VectorXd rstd;
  Mat out;
};

struct BlockCache {
  LayerNormCache ln1;
  Mat qkv;
  std::vector<Mat> probs;  // per head, T x T
  Mat attn;                // concatenated heads before the output projection
  LayerNormCache ln2;
  Mat hidden;              // MLP pre-activation
  Mat act;                 // MLP post-activation
};

Mat silu(const Mat& x) {
  return x.unaryExpr([](double v) { return v / (1.0 + std::exp(-v)); });
}

// d silu / dx evaluated at the cached pre-activation, times upstream grad.
Mat silu_backward(const Mat& pre, const Mat& grad) {
  Mat out(pre.rows(), pre.cols());
  for (Eigen::Index i = 0; i < pre.size(); ++i) {
    const double x = pre.data()[i];
    const double s = 1.0 / (1.0 + std::exp(-x));
    out.data()[i] = grad.data()[i] * s * (1.0 + x * (1.0 - s));
  }
  return out;
}

void layer_norm(const Mat& x, const CMap& gamma, const CMap& beta, LayerNormCache& c) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  c.xhat.resize(n, d);
  c.rstd.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean = x.row(i).mean();
    const double var = (x.row(i).array() - mean).square().mean();
    c.rstd(i) = 1.0 / std::sqrt(var + kLayerNormEps);
    c.xhat.row(i) = (x.row(i).array() - mean) * c.rstd(i);
  }
  c.out = (c.xhat.array().rowwise() * gamma.row(0).array()).rowwise() + beta.row(0).array();
}

Mat layer_norm_backward(const LayerNormCache& c, const Mat& dy, const CMap& gamma, GMap dgamma,
                        GMap dbeta) {
  dgamma.row(0) += (dy.array() * c.xhat.array()).colwise().sum().matrix();
  dbeta.row(0) += dy.colwise().sum();
  const Mat dxhat = dy.array().rowwise() * gamma.row(0).array();
  Mat dx(dy.rows(), dy.cols());
  const double inv_d = 1.0 / static_cast<double>(dy.cols());
  for (Eigen::Index i = 0; i < dy.rows(); ++i) {
    const double mean_g = dxhat.row(i).sum() * inv_d;
    const double mean_gx = dxhat.row(i).dot(c.xhat.row(i)) * inv_d;
    dx.row(i) = c.rstd(i) * (dxhat.row(i).array() - mean_g - c.xhat.row(i).array() * mean_gx);
  }
  return dx;
}

RowVec time_features(double t, int d) {
  RowVec f(d);
  const int half = d / 2;
  for (int i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(10000.0) * i / half);
    f(i) = std::sin(kTimeScale * t * freq);
    f(half + i) = std::cos(kTimeScale * t * freq);
  }
  return f;
}

}  // namespace

// ---------------------------------------------------------------------------
// Parameter layout

struct Denoiser::Layout {
  struct Block {
    int ln1_g, ln1_b, w_qkv, b_qv, w_o, b_o, ln2_g, ln2_b, w_1, b_1, w_2, b_2;
  };

  std::vector<ParamTensor> tensors;
  std::size_t total = 0;

  int time_w1, time_b1, time_w2, time_b2;
  int box_embed, type_embed, cond_w, cond_b;
  int patch_w, patch_b, geo_pos;
  int kine_w1, kine_b1, kine_w2, kine_b2;
  std::vector<Block> blocks;
  int final_g, final_b;
  int unpatch_w, unpatch_b;
  int dekine_w1, dekine_b1, dekine_w2, dekine_b2;

  int add(const std::string& name, int rows, int cols) {
    tensors.push_back({name, total, rows, cols});
    total += static_cast<std::size_t>(rows) * cols;
    return static_cast<int>(tensors.size()) - 1;
  }

  explicit Layout(const DenoiserConfig& c) {
    const int d = c.d_model;
    const int p3 = c.patch_volume();
    time_w1 = add("time.w1", d, d);
    time_b1 = add("time.b1", 1, d);
    time_w2 = add("time.w2", d, d);
    time_b2 = add("time.b2", 1, d);
    box_embed = add("cond.box_embed", kBoxSlots * kBoxBins, d);
    type_embed = add("cond.type_embed", kNumJointTypes, d);
    cond_w = add("cond.global_w", d, d);
    cond_b = add("cond.global_b", 1, d);
    patch_w = add("geo.patch_w", p3, d);
    patch_b = add("geo.patch_b", 1, d);
    geo_pos = add("geo.pos", c.geo_tokens(), d);
    kine_w1 = add("kine_enc.w1", kKineDim, d);
    kine_b1 = add("kine_enc.b1", 1, d);
    kine_w2 = add("kine_enc.w2", d, d);
    kine_b2 = add("kine_enc.b2", 1, d);
    const int hidden = c.mlp_ratio * d;
    for (int l = 0; l < c.n_layers; ++l) {
      const std::string p = "block" + std::to_string(l) + ".";
      Block b{};
      b.ln1_g = add(p + "ln1_g", 1, d);
      b.ln1_b = add(p + "ln1_b", 1, d);
      b.w_qkv = add(p + "w_qkv", d, 3 * d);
      // No key bias: softmax is invariant to it.
      b.b_qv = add(p + "b_qv", 1, 2 * d);
      b.w_o = add(p + "w_o", d, d);
      b.b_o = add(p + "b_o", 1, d);
      b.ln2_g = add(p + "ln2_g", 1, d);
      b.ln2_b = add(p + "ln2_b", 1, d);
      b.w_1 = add(p + "mlp_w1", d, hidden);
      b.b_1 = add(p + "mlp_b1", 1, hidden);
      b.w_2 = add(p + "mlp_w2", hidden, d);
      b.b_2 = add(p + "mlp_b2", 1, d);
      blocks.push_back(b);
    }
    final_g = add("final_ln_g", 1, d);
    final_b = add("final_ln_b", 1, d);
    unpatch_w = add("geo.unpatch_w", d, p3);
    unpatch_b = add("geo.unpatch_b", 1, p3);
    dekine_w1 = add("kine_dec.w1", d, d);
    dekine_b1 = add("kine_dec.b1", 1, d);
    dekine_w2 = add("kine_dec.w2", d, kKineDim);
    dekine_b2 = add("kine_dec.b2", 1, kKineDim);
  }
};

struct Activations::Impl {
  std::vector<int> movable;
  std::vector<QuantBox> boxes;
  std::vector<int> type_ids;
  RowVec tau, time_hidden, time_act, temb;
  Mat parts;  // per-part condition embeddings
  RowVec pooled;
  Mat patches;
  Mat kine_in, kine_hidden, kine_act;
  std::vector<BlockCache> blocks;
  LayerNormCache final_ln;
  Mat dec_hidden, dec_act;
};

Activations::Activations() = default;
Activations::~Activations() = default;
Activations::Activations(Activations&&) noexcept = default;
Activations& Activations::operator=(Activations&&) noexcept = default;

// ---------------------------------------------------------------------------

void DenoiserConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(Errc::kShapeMismatch, why); };
  if (resolution < 2) fail("resolution must be at least 2");
  if (patch < 1 || resolution % patch != 0) fail("patch must divide resolution");
  if (d_model < 2 || d_model % 2 != 0) fail("d_model must be even");
  if (n_heads < 1 || d_model % n_heads != 0) fail("d_model must be divisible by n_heads");
  if (n_layers < 0) fail("n_layers must be non-negative");
  if (mlp_ratio < 1) fail("mlp_ratio must be positive");
  if (max_parts < 1) fail("max_parts must be positive");
  if (!(lambda_kine >= 0.0)) fail("lambda_kine must be non-negative");
  if (sampler_steps < 1) fail("sampler_steps must be positive");
  if (!(scales.origin > 0 && scales.axis > 0 && scales.limits > 0)) fail("scales must be positive");
}

Condition Condition::from_plan(const Plan& plan) {
  Condition c;
  for (const Aabb& b : plan.boxes) c.boxes.push_back(quantize_box(b));
  c.types = plan.joint_types;
  return c;
}

Condition Condition::from_blueprint(const Blueprint& bp) {
  return from_plan(plan_from_blueprint(bp));
}

std::vector<int> Condition::movable() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (is_movable(types[i])) out.push_back(static_cast<int>(i));
  }
  return out;
}

Denoiser::Denoiser(const DenoiserConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  layout_ = std::make_shared<const Layout>(cfg_);
  params_.assign(layout_->total, 0.0);

  std::mt19937_64 rng(cfg_.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Layout& L = *layout_;
  auto fill = [&](int idx, double stddev) {
    const ParamTensor& t = L.tensors[idx];
    for (std::size_t i = 0; i < t.size(); ++i) params_[t.offset + i] = stddev * normal(rng);
  };
  auto fill_linear = [&](int idx) { fill(idx, 1.0 / std::sqrt(L.tensors[idx].rows)); };
  auto fill_ones = [&](int idx) {
    const ParamTensor& t = L.tensors[idx];
    std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(t.offset), t.size(), 1.0);
  };

  fill_linear(L.time_w1);
  fill_linear(L.time_w2);
  fill(L.box_embed, kEmbedStd);
  fill(L.type_embed, kEmbedStd);
  fill_linear(L.cond_w);
  fill_linear(L.patch_w);
  fill(L.geo_pos, kEmbedStd);
  fill_linear(L.kine_w1);
  fill_linear(L.kine_w2);
  for (const auto& b : L.blocks) {
    fill_ones(b.ln1_g);
    fill_linear(b.w_qkv);
    fill_linear(b.w_o);
    fill_ones(b.ln2_g);
    fill_linear(b.w_1);
    fill_linear(b.w_2);
  }
  fill_ones(L.final_g);
  fill_linear(L.dekine_w1);
  // unpatch_w / unpatch_b and dekine_w2 / dekine_b2 stay zero: an untrained
  // model predicts zero velocity everywhere.
}

Denoiser::Denoiser(const DenoiserConfig& cfg, std::span<const double> params) : cfg_(cfg) {
  cfg_.validate();
  layout_ = std::make_shared<const Layout>(cfg_);
  if (params.size() != layout_->total) {
    throw Error(Errc::kShapeMismatch, "expected " + std::to_string(layout_->total) +
                                          " parameters, got " + std::to_string(params.size()));
  }
  params_.assign(params.begin(), params.end());
}

const std::vector<ParamTensor>& Denoiser::layout() const { return layout_->tensors; }

void Denoiser::randomize_output_layers(double stddev, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, stddev);
  for (int idx : {layout_->unpatch_w, layout_->unpatch_b, layout_->dekine_w2, layout_->dekine_b2}) {
    const ParamTensor& t = layout_->tensors[idx];
    for (std::size_t i = 0; i < t.size(); ++i) params_[t.offset + i] = normal(rng);
  }
}

void Denoiser::check_inputs(const DiffusionState& state, const Condition& cond) const {
  if (cond.boxes.size() != cond.types.size() || cond.boxes.empty()) {
    throw Error(Errc::kShapeMismatch, "condition needs one box and one type per part");
  }
  if (static_cast<int>(cond.boxes.size()) > cfg_.max_parts) {
    throw Error(Errc::kTooManyParts, std::to_string(cond.boxes.size()) + " parts exceed max_parts " +
                                         std::to_string(cfg_.max_parts));
  }
  for (const QuantBox& q : cond.boxes) {
    for (int a = 0; a < 3; ++a) {
      if (q.kmin[a] < 0 || q.kmax[a] >= kBoxBins || q.kmin[a] > q.kmax[a]) {
        throw Error(Errc::kShapeMismatch, "condition box out of range");
      }
    }
  }
  if (static_cast<int>(state.geo.size()) != cfg_.field_size()) {
    throw Error(Errc::kShapeMismatch, "geometry field has " + std::to_string(state.geo.size()) +
                                          " cells, expected " + std::to_string(cfg_.field_size()));
  }
  if (state.kin.size() != cond.movable().size()) {
    throw Error(Errc::kShapeMismatch, std::to_string(state.kin.size()) +
                                          " kinematic vectors for " +
                                          std::to_string(cond.movable().size()) + " movable parts");
  }
  if (!(state.t >= 0.0 && state.t <= 1.0)) throw Error(Errc::kShapeMismatch, "t outside [0, 1]");
}

Velocity Denoiser::denoise(const DiffusionState& state, const Condition& cond) const {
  Activations cache;
  return forward(state, cond, cache);
}

Velocity Denoiser::forward(const DiffusionState& state, const Condition& cond,
                           Activations& cache) const {
  check_inputs(state, cond);
  if (!cache.impl_) cache.impl_ = std::make_unique<Activations::Impl>();
  Activations::Impl& A = *cache.impl_;
  const Layout& L = *layout_;
  auto P = [&](int idx) {
    const ParamTensor& t = L.tensors[idx];
    return CMap(params_.data() + t.offset, t.rows, t.cols);
  };

  const int d = cfg_.d_model;
  const int r = cfg_.resolution;
  const int p = cfg_.patch;
  const int nb = r / p;
  const int tg = cfg_.geo_tokens();
  const int p3 = cfg_.patch_volume();
  A.movable = cond.movable();
  A.boxes = cond.boxes;
  A.type_ids.clear();
  for (JointType t : cond.types) A.type_ids.push_back(type_embedding_id(t));
  const int m = static_cast<int>(A.movable.size());
  const int n_parts = static_cast<int>(cond.boxes.size());
  const int T = tg + m;

  // Time embedding.
  A.tau = time_features(state.t, d);
  A.time_hidden = A.tau * P(L.time_w1) + P(L.time_b1);
  A.time_act = silu(A.time_hidden);
  A.temb = A.time_act * P(L.time_w2) + P(L.time_b2);

  // Per-part condition: six box-token embeddings plus the joint-type embedding.
  const CMap box_embed = P(L.box_embed);
  const CMap type_embed = P(L.type_embed);
  A.parts.setZero(n_parts, d);
  for (int q = 0; q < n_parts; ++q) {
    for (int s = 0; s < kBoxSlots; ++s) {
      const int k = s < 3 ? A.boxes[q].kmin[s] : A.boxes[q].kmax[s - 3];
      A.parts.row(q) += box_embed.row(s * kBoxBins + k);
    }
    A.parts.row(q) += type_embed.row(A.type_ids[q]);
  }
  A.pooled = A.parts.colwise().mean();
  const RowVec global = A.pooled * P(L.cond_w) + P(L.cond_b);

  // Patch embedding (down-sampling).
  A.patches.resize(tg, p3);
  for (int bz = 0; bz < nb; ++bz) {
    for (int by = 0; by < nb; ++by) {
      for (int bx = 0; bx < nb; ++bx) {
        const int tok = bx + nb * (by + nb * bz);
        for (int iz = 0; iz < p; ++iz) {
          for (int iy = 0; iy < p; ++iy) {
            for (int ix = 0; ix < p; ++ix) {
              const int x = bx * p + ix, y = by * p + iy, z = bz * p + iz;
              A.patches(tok, ix + p * (iy + p * iz)) = state.geo[x + r * (y + r * z)];
            }
          }
        }
      }
    }
  }
  Mat X(T, d);
  X.topRows(tg) = A.patches * P(L.patch_w) + P(L.geo_pos);
  X.topRows(tg).rowwise() += P(L.patch_b).row(0) + A.temb + global;

  // KineVoxel injection: lifted kinematic tokens appended after the geometry tokens.
  A.kine_in.resize(m, kKineDim);
  for (int j = 0; j < m; ++j) {
    for (int c = 0; c < kKineDim; ++c) A.kine_in(j, c) = state.kin[j][c];
  }
  A.kine_hidden = A.kine_in * P(L.kine_w1);
  A.kine_hidden.rowwise() += P(L.kine_b1).row(0);
  A.kine_act = silu(A.kine_hidden);
  if (m > 0) {
    X.bottomRows(m) = A.kine_act * P(L.kine_w2);
    for (int j = 0; j < m; ++j) {
      X.row(tg + j) += P(L.kine_b2).row(0) + A.parts.row(A.movable[j]) + A.temb;
    }
  }

  // Middle transformer.
  const int heads = cfg_.n_heads;
  const int dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  A.blocks.resize(L.blocks.size());
  for (std::size_t l = 0; l < L.blocks.size(); ++l) {
    const auto& B = L.blocks[l];
    BlockCache& C = A.blocks[l];
    layer_norm(X, P(B.ln1_g), P(B.ln1_b), C.ln1);
    C.qkv = C.ln1.out * P(B.w_qkv);
    C.qkv.leftCols(d).rowwise() += P(B.b_qv).row(0).head(d);
    C.qkv.rightCols(d).rowwise() += P(B.b_qv).row(0).tail(d);
    C.attn.resize(T, d);
    C.probs.resize(heads);
    for (int h = 0; h < heads; ++h) {
      const auto Q = C.qkv.middleCols(h * dh, dh);
      const auto K = C.qkv.middleCols(d + h * dh, dh);
      const auto V = C.qkv.middleCols(2 * d + h * dh, dh);
      Mat S = (Q * K.transpose()) * scale;
      for (int i = 0; i < T; ++i) {
        const double mx = S.row(i).maxCoeff();
        S.row(i) = (S.row(i).array() - mx).exp();
        S.row(i) /= S.row(i).sum();
      }
      C.attn.middleCols(h * dh, dh) = S * V;
      C.probs[h] = std::move(S);
    }
    X += C.attn * P(B.w_o);
    X.rowwise() += P(B.b_o).row(0);

    layer_norm(X, P(B.ln2_g), P(B.ln2_b), C.ln2);
    C.hidden = C.ln2.out * P(B.w_1);
    C.hidden.rowwise() += P(B.b_1).row(0);
    C.act = silu(C.hidden);
    X += C.act * P(B.w_2);
    X.rowwise() += P(B.b_2).row(0);
  }
  layer_norm(X, P(L.final_g), P(L.final_b), A.final_ln);
  const Mat& Y = A.final_ln.out;

  Velocity out;
  // Un-embed (up-sampling) back to the voxel field.
  Mat U = Y.topRows(tg) * P(L.unpatch_w);
  U.rowwise() += P(L.unpatch_b).row(0);
  out.geo.assign(static_cast<std::size_t>(cfg_.field_size()), 0.0);
  for (int bz = 0; bz < nb; ++bz) {
    for (int by = 0; by < nb; ++by) {
      for (int bx = 0; bx < nb; ++bx) {
        const int tok = bx + nb * (by + nb * bz);
        for (int iz = 0; iz < p; ++iz) {
          for (int iy = 0; iy < p; ++iy) {
            for (int ix = 0; ix < p; ++ix) {
              const int x = bx * p + ix, y = by * p + iy, z = bz * p + iz;
              out.geo[x + r * (y + r * z)] = U(tok, ix + p * (iy + p * iz));
            }
          }
        }
      }
    }
  }

  // Kinematic decoder.
  A.dec_hidden = Y.bottomRows(m) * P(L.dekine_w1);
  A.dec_hidden.rowwise() += P(L.dekine_b1).row(0);
  A.dec_act = silu(A.dec_hidden);
  Mat vk = A.dec_act * P(L.dekine_w2);
  vk.rowwise() += P(L.dekine_b2).row(0);
  out.kin.resize(m);
  for (int j = 0; j < m; ++j) {
    for (int c = 0; c < kKineDim; ++c) out.kin[j][c] = vk(j, c);
  }
  return out;
}

void Denoiser::backward(const Activations& cache, const Velocity& grad_out,
                        std::span<double> grad) const {
  if (!cache.impl_) throw Error(Errc::kShapeMismatch, "backward called without forward");
  if (grad.size() != params_.size()) throw Error(Errc::kShapeMismatch, "gradient buffer size");
  if (reinterpret_cast<std::uintptr_t>(grad.data()) % 64 == 0) {
    backward_aligned(cache, grad_out, grad);
    return;
  }
  AlignedBuffer scratch(grad.size(), 0.0);
  backward_aligned(cache, grad_out, scratch);
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += scratch[i];
}

void Denoiser::backward_aligned(const Activations& cache, const Velocity& grad_out,
                                std::span<double> grad) const {
  const Activations::Impl& A = *cache.impl_;
  const Layout& L = *layout_;
  auto P = [&](int idx) {
    const ParamTensor& t = L.tensors[idx];
    return CMap(params_.data() + t.offset, t.rows, t.cols);
  };
  auto G = [&](int idx) {
    const ParamTensor& t = L.tensors[idx];
    return GMap(grad.data() + t.offset, t.rows, t.cols);
  };

  const int d = cfg_.d_model;
  const int r = cfg_.resolution;
  const int p = cfg_.patch;
  const int nb = r / p;
  const int tg = cfg_.geo_tokens();
  const int p3 = cfg_.patch_volume();
  const int m = static_cast<int>(A.movable.size());
  const int n_parts = static_cast<int>(A.boxes.size());
  const int T = tg + m;
  if (static_cast<int>(grad_out.geo.size()) != cfg_.field_size() ||
      static_cast<int>(grad_out.kin.size()) != m) {
    throw Error(Errc::kShapeMismatch, "output gradient shape");
  }
  const Mat& Y = A.final_ln.out;
  Mat dY = Mat::Zero(T, d);

  // Geometry head.
  Mat dU(tg, p3);
  for (int bz = 0; bz < nb; ++bz) {
    for (int by = 0; by < nb; ++by) {
      for (int bx = 0; bx < nb; ++bx) {
        const int tok = bx + nb * (by + nb * bz);
        for (int iz = 0; iz < p; ++iz) {
          for (int iy = 0; iy < p; ++iy) {
            for (int ix = 0; ix < p; ++ix) {
              const int x = bx * p + ix, y = by * p + iy, z = bz * p + iz;
              dU(tok, ix + p * (iy + p * iz)) = grad_out.geo[x + r * (y + r * z)];
            }
          }
        }
      }
    }
  }
  G(L.unpatch_w).noalias() += Y.topRows(tg).transpose() * dU;
  G(L.unpatch_b).row(0) += dU.colwise().sum();
  dY.topRows(tg).noalias() = dU * P(L.unpatch_w).transpose();

  // Kinematic head.
  if (m > 0) {
    Mat dvk(m, kKineDim);
    for (int j = 0; j < m; ++j) {
      for (int c = 0; c < kKineDim; ++c) dvk(j, c) = grad_out.kin[j][c];
    }
    G(L.dekine_w2).noalias() += A.dec_act.transpose() * dvk;
    G(L.dekine_b2).row(0) += dvk.colwise().sum();
    const Mat dhid = silu_backward(A.dec_hidden, dvk * P(L.dekine_w2).transpose());
    G(L.dekine_w1).noalias() += Y.bottomRows(m).transpose() * dhid;
    G(L.dekine_b1).row(0) += dhid.colwise().sum();
    dY.bottomRows(m).noalias() = dhid * P(L.dekine_w1).transpose();
  }

  Mat dX = layer_norm_backward(A.final_ln, dY, P(L.final_g), G(L.final_g), G(L.final_b));

  const int heads = cfg_.n_heads;
  const int dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  for (int l = static_cast<int>(L.blocks.size()) - 1; l >= 0; --l) {
    const auto& B = L.blocks[l];
    const BlockCache& C = A.blocks[l];

    // MLP branch.
    G(B.w_2).noalias() += C.act.transpose() * dX;
    G(B.b_2).row(0) += dX.colwise().sum();
    const Mat dhidden = silu_backward(C.hidden, dX * P(B.w_2).transpose());
    G(B.w_1).noalias() += C.ln2.out.transpose() * dhidden;
    G(B.b_1).row(0) += dhidden.colwise().sum();
    dX += layer_norm_backward(C.ln2, dhidden * P(B.w_1).transpose(), P(B.ln2_g), G(B.ln2_g),
                              G(B.ln2_b));

    // Attention branch.
    G(B.w_o).noalias() += C.attn.transpose() * dX;
    G(B.b_o).row(0) += dX.colwise().sum();
    const Mat dattn = dX * P(B.w_o).transpose();
    Mat dqkv(T, 3 * d);
    for (int h = 0; h < heads; ++h) {
      const auto Q = C.qkv.middleCols(h * dh, dh);
      const auto K = C.qkv.middleCols(d + h * dh, dh);
      const auto V = C.qkv.middleCols(2 * d + h * dh, dh);
      const Mat& Pr = C.probs[h];
      const auto dO = dattn.middleCols(h * dh, dh);
      const Mat dP = dO * V.transpose();
      dqkv.middleCols(2 * d + h * dh, dh).noalias() = Pr.transpose() * dO;
      Mat dS = Pr.array() * (dP.array().colwise() - (dP.array() * Pr.array()).rowwise().sum());
      dS *= scale;
      dqkv.middleCols(h * dh, dh).noalias() = dS * K;
      dqkv.middleCols(d + h * dh, dh).noalias() = dS.transpose() * Q;
    }
    G(B.w_qkv).noalias() += C.ln1.out.transpose() * dqkv;
    G(B.b_qv).row(0).head(d) += dqkv.leftCols(d).colwise().sum();
    G(B.b_qv).row(0).tail(d) += dqkv.rightCols(d).colwise().sum();
    dX += layer_norm_backward(C.ln1, dqkv * P(B.w_qkv).transpose(), P(B.ln1_g), G(B.ln1_g),
                              G(B.ln1_b));
  }

  // Token inputs.
  const auto dgeo = dX.topRows(tg);
  G(L.patch_w).noalias() += A.patches.transpose() * dgeo;
  const RowVec dgeo_sum = dgeo.colwise().sum();
  G(L.patch_b).row(0) += dgeo_sum;
  G(L.geo_pos) += dgeo;
  RowVec dtemb = dgeo_sum;
  const RowVec dglobal = dgeo_sum;

  Mat dparts = Mat::Zero(n_parts, d);
  if (m > 0) {
    const auto dk = dX.bottomRows(m);
    G(L.kine_w2).noalias() += A.kine_act.transpose() * dk;
    const RowVec dk_sum = dk.colwise().sum();
    G(L.kine_b2).row(0) += dk_sum;
    dtemb += dk_sum;
    const Mat dhid = silu_backward(A.kine_hidden, dk * P(L.kine_w2).transpose());
    G(L.kine_w1).noalias() += A.kine_in.transpose() * dhid;
    G(L.kine_b1).row(0) += dhid.colwise().sum();
    for (int j = 0; j < m; ++j) dparts.row(A.movable[j]) += dk.row(j);
  }

  G(L.cond_w).noalias() += A.pooled.transpose() * dglobal;
  G(L.cond_b).row(0) += dglobal;
  const RowVec dpooled = dglobal * P(L.cond_w).transpose();
  dparts.rowwise() += dpooled / static_cast<double>(n_parts);
  GMap gbox = G(L.box_embed);
  GMap gtype = G(L.type_embed);
  for (int q = 0; q < n_parts; ++q) {
    for (int s = 0; s < kBoxSlots; ++s) {
      const int k = s < 3 ? A.boxes[q].kmin[s] : A.boxes[q].kmax[s - 3];
      gbox.row(s * kBoxBins + k) += dparts.row(q);
    }
    gtype.row(A.type_ids[q]) += dparts.row(q);
  }

  G(L.time_w2).noalias() += A.time_act.transpose() * dtemb;
  G(L.time_b2).row(0) += dtemb;
  const Mat dth = silu_backward(A.time_hidden, dtemb * P(L.time_w2).transpose());
  G(L.time_w1).noalias() += A.tau.transpose() * dth;
  G(L.time_b1).row(0) += dth.row(0);
}

}  // namespace artigen::diffusion
