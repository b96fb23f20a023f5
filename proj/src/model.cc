/*
 * Copyright 2026 The rankfuse Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "rankfuse/model.h"

#include <cmath>

#include "rankfuse/error.h"

namespace rankfuse {
namespace {

void ValidateTower(const Tower& t, const char* name) {
  if (t.embed_dim() == 0 || t.input_dim() == 0) {
    throw InvalidArgument(std::string(name) + " tower has an empty weight matrix");
  }
  if (t.bias.size() != t.embed_dim()) {
    throw InvalidArgument(std::string(name) + " tower bias has wrong length");
  }
  for (double w : t.weights.data()) {
    if (!std::isfinite(w)) throw InvalidArgument("non-finite model weight");
  }
  for (double b : t.bias) {
    if (!std::isfinite(b)) throw InvalidArgument("non-finite model bias");
  }
}

Tower InitTower(std::size_t input_dim, std::size_t embed_dim, Rng& rng) {
  Tower t;
  const double limit = 1.0 / std::sqrt(static_cast<double>(input_dim));
  t.weights = Matrix(input_dim, embed_dim);
  for (double& w : t.weights.data()) w = rng.Uniform(-limit, limit);
  t.bias.assign(embed_dim, 0.0);
  return t;
}

}  // namespace

void Validate(const TwoTowerModel& model) {
  ValidateTower(model.video, "video");
  ValidateTower(model.text, "text");
  if (model.video.embed_dim() != model.text.embed_dim()) {
    throw InvalidArgument("towers disagree on the embedding size");
  }
}

TwoTowerModel InitModel(std::size_t video_dim, std::size_t text_dim,
                        std::size_t embed_dim, Rng& rng) {
  if (video_dim == 0 || text_dim == 0 || embed_dim == 0) {
    throw InvalidArgument("model dimensions must be positive");
  }
  TwoTowerModel model;
  model.video = InitTower(video_dim, embed_dim, rng);
  model.text = InitTower(text_dim, embed_dim, rng);
  return model;
}

Matrix Encode(const Matrix& features, const Tower& tower) {
  if (features.cols() != tower.input_dim()) {
    throw InvalidArgument("features have " + std::to_string(features.cols()) +
                          " columns, tower expects " +
                          std::to_string(tower.input_dim()));
  }
  const std::size_t n = features.rows(), d = features.cols(),
                    e = tower.embed_dim();
  Matrix out(n, e);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = out.row(i);
    for (std::size_t c = 0; c < e; ++c) row[c] = tower.bias[c];
    for (std::size_t k = 0; k < d; ++k) {
      const double x = features(i, k);
      if (x == 0.0) continue;
      const auto w = tower.weights.row(k);
      for (std::size_t c = 0; c < e; ++c) row[c] += x * w[c];
    }
    double norm_sq = 0.0;
    for (double v : row) norm_sq += v * v;
    if (norm_sq == 0.0) continue;
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& v : row) v *= inv;
  }
  return out;
}

Matrix Similarity(const Matrix& video_emb, const Matrix& text_emb) {
  if (video_emb.cols() != text_emb.cols()) {
    throw InvalidArgument("embedding sizes differ: " +
                          std::to_string(video_emb.cols()) + " vs " +
                          std::to_string(text_emb.cols()));
  }
  Matrix sim(video_emb.rows(), text_emb.rows());
  for (std::size_t i = 0; i < video_emb.rows(); ++i) {
    const auto v = video_emb.row(i);
    for (std::size_t j = 0; j < text_emb.rows(); ++j) {
      const auto t = text_emb.row(j);
      double dot = 0.0;
      for (std::size_t c = 0; c < v.size(); ++c) dot += v[c] * t[c];
      sim(i, j) = dot;
    }
  }
  return sim;
}

void Validate(const AdamConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
  if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) ||
      !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) {
    throw InvalidArgument("Adam betas must lie in [0, 1)");
  }
  if (!(cfg.eps > 0.0)) throw InvalidArgument("Adam eps must be positive");
}

void AdamStep(std::span<double> params, std::span<const double> grads,
              AdamState& state, std::int64_t t, const AdamConfig& cfg) {
  if (params.size() != grads.size()) {
    throw InvalidArgument("Adam: " + std::to_string(params.size()) +
                          " parameters but " + std::to_string(grads.size()) +
                          " gradients");
  }
  if (t < 1) throw InvalidArgument("Adam step index starts at 1");
  if (state.m.empty() && state.v.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw InvalidArgument("Adam state does not match parameter size");
  }
  const double correction1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double correction2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = state.m[i] / correction1;
    const double v_hat = state.v[i] / correction2;
    params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

void ModelOptimizer::Step(TwoTowerModel& model, const TwoTowerModel& grads) {
  if (!model.video.weights.SameShape(grads.video.weights) ||
      !model.text.weights.SameShape(grads.text.weights)) {
    throw InvalidArgument("gradient shapes do not match the model");
  }
  ++step_;
  AdamStep(model.video.weights.data(), grads.video.weights.data(), states_[0], step_, cfg_);
  AdamStep(model.video.bias, grads.video.bias, states_[1], step_, cfg_);
  AdamStep(model.text.weights.data(), grads.text.weights.data(), states_[2], step_, cfg_);
  AdamStep(model.text.bias, grads.text.bias, states_[3], step_, cfg_);
}

}  // namespace rankfuse
