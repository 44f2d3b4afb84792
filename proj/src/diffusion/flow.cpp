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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "artigen/error.hpp"

namespace artigen::diffusion {

namespace {

void check_same_shape(const DiffusionState& a, const DiffusionState& b) {
  if (a.geo.size() != b.geo.size() || a.kin.size() != b.kin.size()) {
    throw Error(Errc::kShapeMismatch, "states differ in shape");
  }
}

double box_distance(const Aabb& b, const Vec3& p) {
  double s = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double d = std::max({b.min[a] - p[a], 0.0, p[a] - b.max[a]});
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

TrainingExample make_example(const Blueprint& bp, const VoxelGrid& grid, const KineScales& s,
                             std::string id) {
  TrainingExample ex;
  ex.id = std::move(id);
  ex.cond = Condition::from_blueprint(bp);
  ex.data.geo = occupancy_to_field(grid);
  for (int idx : ex.cond.movable()) ex.data.kin.push_back(pack(bp.parts[idx].joint, s).v);
  return ex;
}

CfmPair cfm_pair(const DiffusionState& x0, const DiffusionState& x1, double t) {
  check_same_shape(x0, x1);
  if (!(t >= 0.0 && t <= 1.0)) throw Error(Errc::kShapeMismatch, "t outside [0, 1]");
  CfmPair out;
  out.xt.t = t;
  out.xt.geo.resize(x0.geo.size());
  out.target.geo.resize(x0.geo.size());
  for (std::size_t i = 0; i < x0.geo.size(); ++i) {
    out.xt.geo[i] = (1.0 - t) * x0.geo[i] + t * x1.geo[i];
    out.target.geo[i] = x1.geo[i] - x0.geo[i];
  }
  out.xt.kin.resize(x0.kin.size());
  out.target.kin.resize(x0.kin.size());
  for (std::size_t j = 0; j < x0.kin.size(); ++j) {
    for (int c = 0; c < kKineDim; ++c) {
      out.xt.kin[j][c] = (1.0 - t) * x0.kin[j][c] + t * x1.kin[j][c];
      out.target.kin[j][c] = x1.kin[j][c] - x0.kin[j][c];
    }
  }
  return out;
}

LossTerms velocity_loss(const Velocity& pred, const Velocity& target, double lambda,
                        Velocity* grad, double weight) {
  if (pred.geo.size() != target.geo.size() || pred.kin.size() != target.kin.size() ||
      pred.geo.empty()) {
    throw Error(Errc::kShapeMismatch, "prediction and target differ in shape");
  }
  const double n_geo = static_cast<double>(pred.geo.size());
  const double n_kin = static_cast<double>(pred.kin.size() * kKineDim);
  LossTerms terms;
  if (grad) {
    grad->geo.assign(pred.geo.size(), 0.0);
    grad->kin.assign(pred.kin.size(), KineState{});
  }
  for (std::size_t i = 0; i < pred.geo.size(); ++i) {
    const double e = pred.geo[i] - target.geo[i];
    terms.l_geo += e * e;
    if (grad) grad->geo[i] = weight * 2.0 * e / n_geo;
  }
  terms.l_geo /= n_geo;
  if (!pred.kin.empty()) {
    for (std::size_t j = 0; j < pred.kin.size(); ++j) {
      for (int c = 0; c < kKineDim; ++c) {
        const double e = pred.kin[j][c] - target.kin[j][c];
        terms.l_kine += e * e;
        if (grad) grad->kin[j][c] = weight * lambda * 2.0 * e / n_kin;
      }
    }
    terms.l_kine /= n_kin;
  }
  terms.total = composite_loss(terms.l_geo, terms.l_kine, lambda);
  return terms;
}

DiffusionState draw_noise(const TrainingExample& ex, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DiffusionState x0;
  x0.geo.resize(ex.data.geo.size());
  for (double& v : x0.geo) v = normal(rng);
  x0.kin.resize(ex.data.kin.size());
  for (KineState& k : x0.kin) {
    for (double& v : k) v = normal(rng);
  }
  return x0;
}

LossTerms example_loss(const Denoiser& model, const TrainingExample& ex, const DiffusionState& x0,
                       double t, std::span<double> grad, double weight) {
  const CfmPair pair = cfm_pair(x0, ex.data, t);
  Activations cache;
  const Velocity pred = model.forward(pair.xt, ex.cond, cache);
  if (grad.empty()) return velocity_loss(pred, pair.target, model.config().lambda_kine);
  Velocity dpred;
  const LossTerms terms =
      velocity_loss(pred, pair.target, model.config().lambda_kine, &dpred, weight);
  model.backward(cache, dpred, grad);
  return terms;
}

LossTerms batch_loss(const Denoiser& model, std::span<const TrainingExample* const> batch,
                     std::mt19937_64& rng, std::span<double> grad) {
  if (batch.empty()) throw Error(Errc::kShapeMismatch, "empty batch");
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double w = 1.0 / static_cast<double>(batch.size());
  LossTerms sum;
  for (const TrainingExample* ex : batch) {
    const double t = uniform(rng);
    const DiffusionState x0 = draw_noise(*ex, rng);
    const LossTerms terms = example_loss(model, *ex, x0, t, grad, w);
    sum.total += terms.total;
    sum.l_geo += terms.l_geo;
    sum.l_kine += terms.l_kine;
  }
  sum.l_geo *= w;
  sum.l_kine *= w;
  sum.total = composite_loss(sum.l_geo, sum.l_kine, model.config().lambda_kine);
  return sum;
}

std::vector<LossRecord> train(Denoiser& model, std::span<const TrainingExample> data,
                              const TrainConfig& cfg,
                              const std::function<void(const LossRecord&)>& on_step) {
  if (data.empty()) throw Error(Errc::kShapeMismatch, "empty training set");
  if (cfg.steps < 0 || cfg.batch_size < 1) throw Error(Errc::kShapeMismatch, "bad train config");
  std::mt19937_64 rng(cfg.seed);
  const std::size_t n = data.size();
  const std::size_t bs = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size), n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t cursor = n;  // forces a shuffle on first use when batches are partial

  std::span<double> params = model.params();
  AlignedBuffer grad(params.size());
  std::vector<double> velocity(params.size(), 0.0);
  std::vector<double> second;
  if (cfg.optimizer == Optimizer::kAdam) second.assign(params.size(), 0.0);
  std::vector<double> ema;
  if (cfg.ema_decay > 0.0) ema.assign(params.begin(), params.end());
  std::vector<const TrainingExample*> batch(bs);
  std::vector<LossRecord> trace;
  trace.reserve(static_cast<std::size_t>(cfg.steps));

  for (int step = 0; step < cfg.steps; ++step) {
    if (bs == n) {
      for (std::size_t i = 0; i < n; ++i) batch[i] = &data[i];
    } else {
      for (std::size_t i = 0; i < bs; ++i) {
        if (cursor == n) {
          std::shuffle(order.begin(), order.end(), rng);
          cursor = 0;
        }
        batch[i] = &data[order[cursor++]];
      }
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    const LossTerms terms = batch_loss(model, batch, rng, grad);
    if (!std::isfinite(terms.total)) {
      throw Error(Errc::kNanLoss, "non-finite loss at step " + std::to_string(step));
    }
    const LossRecord rec{step, terms};
    trace.push_back(rec);
    if (on_step) on_step(rec);

    double scale = 1.0;
    if (cfg.grad_clip > 0.0) {
      double sq = 0.0;
      for (double g : grad) sq += g * g;
      const double norm = std::sqrt(sq);
      if (norm > cfg.grad_clip) scale = cfg.grad_clip / norm;
    }
    double lr = cfg.lr;
    if (cfg.cosine_decay) {
      lr *= 0.5 * (1.0 + std::cos(kPi * static_cast<double>(step) / cfg.steps));
    }
    if (cfg.optimizer == Optimizer::kAdam) {
      const double c1 = 1.0 - std::pow(cfg.momentum, step + 1);
      const double c2 = 1.0 - std::pow(cfg.beta2, step + 1);
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = scale * grad[i];
        velocity[i] = cfg.momentum * velocity[i] + (1.0 - cfg.momentum) * g;
        second[i] = cfg.beta2 * second[i] + (1.0 - cfg.beta2) * g * g;
        params[i] -= lr * (velocity[i] / c1) / (std::sqrt(second[i] / c2) + cfg.eps);
      }
    } else {
      for (std::size_t i = 0; i < params.size(); ++i) {
        velocity[i] = cfg.momentum * velocity[i] + scale * grad[i];
        params[i] -= lr * velocity[i];
      }
    }
    for (std::size_t i = 0; i < ema.size(); ++i) {
      ema[i] = cfg.ema_decay * ema[i] + (1.0 - cfg.ema_decay) * params[i];
    }
  }
  if (!ema.empty() && cfg.steps > 0) std::copy(ema.begin(), ema.end(), params.begin());
  return trace;
}

DiffusionState integrate_flow(const VelocityField& field, const DiffusionState& x0, int steps) {
  if (steps < 1) throw Error(Errc::kShapeMismatch, "sampler needs at least one step");
  DiffusionState x = x0;
  x.t = 0.0;
  Velocity mean;
  mean.geo.assign(x0.geo.size(), 0.0);
  mean.kin.assign(x0.kin.size(), KineState{});
  for (int i = 0; i < steps; ++i) {
    const Velocity v = field(x);
    if (v.geo.size() != x0.geo.size() || v.kin.size() != x0.kin.size()) {
      throw Error(Errc::kShapeMismatch, "velocity field changed the state shape");
    }
    const double w = 1.0 / static_cast<double>(i + 1);
    const double t_next = static_cast<double>(i + 1) / static_cast<double>(steps);
    for (std::size_t k = 0; k < x0.geo.size(); ++k) {
      mean.geo[k] += (v.geo[k] - mean.geo[k]) * w;
      x.geo[k] = x0.geo[k] + t_next * mean.geo[k];
    }
    for (std::size_t j = 0; j < x0.kin.size(); ++j) {
      for (int c = 0; c < kKineDim; ++c) {
        mean.kin[j][c] += (v.kin[j][c] - mean.kin[j][c]) * w;
        x.kin[j][c] = x0.kin[j][c] + t_next * mean.kin[j][c];
      }
    }
    x.t = t_next;
  }
  return x;
}

VoxelGrid label_by_boxes(const VoxelGrid& occupancy, std::span<const QuantBox> boxes) {
  if (boxes.empty() || boxes.size() > 255) {
    throw Error(Errc::kShapeMismatch, "need 1 to 255 boxes");
  }
  std::vector<Aabb> shapes;
  for (const QuantBox& q : boxes) shapes.push_back(dequantize_box(q));
  const int r = occupancy.resolution();
  VoxelGrid out(r);
  for (int k = 0; k < r; ++k) {
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) {
        if (occupancy.at(i, j, k) == 0) continue;
        const Vec3 c = occupancy.center(i, j, k);
        int label = -1;
        for (std::size_t p = 0; p < shapes.size(); ++p) {
          if (shapes[p].contains(c)) label = static_cast<int>(p);
        }
        if (label < 0) {
          double best = std::numeric_limits<double>::infinity();
          for (std::size_t p = 0; p < shapes.size(); ++p) {
            const double d = box_distance(shapes[p], c);
            if (d < best) {
              best = d;
              label = static_cast<int>(p);
            }
          }
        }
        out.set(i, j, k, static_cast<std::uint8_t>(label + 1));
      }
    }
  }
  return out;
}

DiffusionState sample_noise(const DenoiserConfig& cfg, const Condition& cond, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  DiffusionState x0;
  x0.geo.resize(static_cast<std::size_t>(cfg.field_size()));
  for (double& v : x0.geo) v = normal(rng);
  x0.kin.resize(cond.movable().size());
  for (KineState& k : x0.kin) {
    for (double& v : k) v = normal(rng);
  }
  return x0;
}

SampleResult sample(const Denoiser& model, const Condition& cond, int steps, std::uint64_t seed) {
  const DenoiserConfig& cfg = model.config();
  const DiffusionState x0 = sample_noise(cfg, cond, seed);
  const DiffusionState x1 = integrate_flow(
      [&](const DiffusionState& x) { return model.denoise(x, cond); }, x0, steps);

  SampleResult out;
  out.field = x1.geo;
  out.occupancy = label_by_boxes(field_to_occupancy(x1.geo, cfg.resolution), cond.boxes);
  out.kin = x1.kin;
  out.movable = cond.movable();
  for (std::size_t j = 0; j < out.movable.size(); ++j) {
    const KineVector kv{x1.kin[j], type_embedding_id(cond.types[out.movable[j]])};
    try {
      out.joints.push_back(unpack(kv, cfg.scales));
      out.joint_errors.emplace_back();
    } catch (const Error& e) {
      out.joints.push_back(std::nullopt);
      out.joint_errors.emplace_back(e.what());
    }
  }
  return out;
}

}  // namespace artigen::diffusion
