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

#ifndef RANKFUSE_MODEL_H_
#define RANKFUSE_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rankfuse/augment.h"
#include "rankfuse/matrix.h"
#include "rankfuse/rng.h"

namespace rankfuse {

// Linear projection D -> E followed by row-wise L2 normalization.
struct Tower {
  Matrix weights;             // D x E
  std::vector<double> bias;   // E

  std::size_t input_dim() const { return weights.rows(); }
  std::size_t embed_dim() const { return weights.cols(); }

  friend bool operator==(const Tower&, const Tower&) = default;
};

struct TwoTowerModel {
  Tower video;
  Tower text;

  std::size_t embed_dim() const { return video.embed_dim(); }
  friend bool operator==(const TwoTowerModel&, const TwoTowerModel&) = default;
};

// Shapes agree, E >= 1 and every weight is finite.
void Validate(const TwoTowerModel& model);

// Weights uniform in [-1/sqrt(D), 1/sqrt(D)], zero biases.
TwoTowerModel InitModel(std::size_t video_dim, std::size_t text_dim,
                        std::size_t embed_dim, Rng& rng);

// Rows of features * W + b scaled to unit norm; all-zero rows stay zero.
Matrix Encode(const Matrix& features, const Tower& tower);

// Cosine similarity of unit-norm embeddings: (N x E) . (M x E)^T.
Matrix Similarity(const Matrix& video_emb, const Matrix& text_emb);

// --- Adam. ---

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void Validate(const AdamConfig& cfg);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
};

// One bias-corrected Adam update at step t >= 1. An empty state is
// zero-initialized to the parameter size.
void AdamStep(std::span<double> params, std::span<const double> grads,
              AdamState& state, std::int64_t t, const AdamConfig& cfg);

// Adam over all four parameter blocks of a model.
class ModelOptimizer {
 public:
  explicit ModelOptimizer(AdamConfig cfg) : cfg_(cfg) { Validate(cfg_); }

  // `grads` has the model's shapes.
  void Step(TwoTowerModel& model, const TwoTowerModel& grads);
  std::int64_t steps() const { return step_; }

 private:
  AdamConfig cfg_;
  std::int64_t step_ = 0;
  AdamState states_[4];
};

}  // namespace rankfuse

#endif  // RANKFUSE_MODEL_H_
