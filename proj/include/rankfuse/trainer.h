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

#ifndef RANKFUSE_TRAINER_H_
#define RANKFUSE_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rankfuse/augment.h"
#include "rankfuse/dataio.h"
#include "rankfuse/metrics.h"
#include "rankfuse/model.h"
#include "rankfuse/neuralsort.h"
#include "rankfuse/triplet.h"

namespace rankfuse {

enum class LossMode { kAugmentedTriplet, kNeuralNdcg };

// "augmented-triplet" / "neural-ndcg".
std::string LossModeName(LossMode mode);
LossMode ParseLossMode(const std::string& name);

struct TrainConfig {
  int epochs = 50;
  std::size_t batch_size = 64;
  std::size_t embed_dim = 32;
  LossMode loss_mode = LossMode::kAugmentedTriplet;
  std::uint64_t seed = 0;
  // Fraction of the train split actually used for training.
  double subset_fraction = 0.25;
  AdamConfig adam;
  TripletConfig triplet;
  // candidate_pool is filled with the training subset by Train().
  AugmentConfig augment;
  NdcgLossConfig ndcg;
};

void Validate(const TrainConfig& cfg);

struct ModelGradients {
  double loss = 0.0;
  // Same shapes as the model.
  TwoTowerModel grads;
};

// Exact gradient of the batch loss with respect to every weight and bias:
// the loss gradient w.r.t. the similarity matrix is pulled back through the
// dot products, the normalization Jacobian and the projections. `batch_rel`
// is the batch-by-batch relevance; row i of both modalities is item i.
ModelGradients ComputeModelGradients(const PairedBatch& batch,
                                     const Matrix& batch_rel,
                                     const TwoTowerModel& model,
                                     LossMode mode, const TrainConfig& cfg,
                                     Rng& rng);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_ndcg_avg = 0.0;
  double val_map_avg = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;

  friend bool operator==(const TrainHistory&, const TrainHistory&) = default;
};

// Tab-separated "epoch, train_loss, val_ndcg_avg, val_map_avg", one line per
// epoch, no header.
std::string FormatHistory(const TrainHistory& history);

struct TrainResult {
  TwoTowerModel model;
  TrainHistory history;
  // Validation metrics of the freshly initialized model.
  MetricsReport initial_validation;
  std::vector<std::string> training_ids;
};

// Similarity of every video against every caption of the given items, with
// the item ids on both axes.
SimilarityMatrix ScoreItems(const TwoTowerModel& model, const Dataset& dataset,
                            std::span<const std::size_t> indices);
RelevanceMatrix RelevanceOfItems(const Dataset& dataset,
                                 std::span<const std::size_t> indices);
MetricsReport EvaluateItems(const TwoTowerModel& model, const Dataset& dataset,
                            std::span<const std::size_t> indices);

// Seeded mini-batch training on a subset of the train split, validated after
// every epoch. The last partial batch is kept. Fully deterministic for a
// given dataset and config.
TrainResult Train(const Dataset& dataset, const TrainConfig& cfg);

}  // namespace rankfuse

#endif  // RANKFUSE_TRAINER_H_
