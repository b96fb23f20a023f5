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

#include "rankfuse/trainer.h"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_set>

#include "rankfuse/error.h"
#include "rankfuse/relevance.h"

namespace rankfuse {
namespace {

// Pre-normalization activations kept for the backward pass.
struct EncodeTape {
  Matrix unit;                // normalized rows
  std::vector<double> norms;  // norm of each pre-normalization row
};

EncodeTape EncodeWithTape(const Matrix& features, const Tower& tower) {
  EncodeTape tape;
  const std::size_t n = features.rows(), e = tower.embed_dim();
  Matrix pre(n, e);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < e; ++c) {
      double v = tower.bias[c];
      for (std::size_t k = 0; k < features.cols(); ++k) {
        v += features(i, k) * tower.weights(k, c);
      }
      pre(i, c) = v;
    }
  }
  tape.unit = Matrix(n, e);
  tape.norms.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (double v : pre.row(i)) sq += v * v;
    tape.norms[i] = std::sqrt(sq);
    if (tape.norms[i] == 0.0) continue;
    for (std::size_t c = 0; c < e; ++c) tape.unit(i, c) = pre(i, c) / tape.norms[i];
  }
  return tape;
}

// Given dL/d(unit rows), accumulates dL/dW and dL/db into `grad`.
void TowerBackward(const Matrix& features, const EncodeTape& tape,
                   const Matrix& grad_unit, Tower& grad) {
  const std::size_t n = features.rows(), e = tape.unit.cols();
  for (std::size_t i = 0; i < n; ++i) {
    if (tape.norms[i] == 0.0) continue;
    const auto u = tape.unit.row(i);
    const auto g = grad_unit.row(i);
    double dot = 0.0;
    for (std::size_t c = 0; c < e; ++c) dot += u[c] * g[c];
    for (std::size_t c = 0; c < e; ++c) {
      const double dh = (g[c] - u[c] * dot) / tape.norms[i];
      grad.bias[c] += dh;
      for (std::size_t k = 0; k < features.cols(); ++k) {
        grad.weights(k, c) += features(i, k) * dh;
      }
    }
  }
}

Tower ZeroLike(const Tower& t) {
  return {Matrix(t.weights.rows(), t.weights.cols()),
          std::vector<double>(t.bias.size(), 0.0)};
}

Matrix SelectRows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = m.row(rows[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

Matrix SelectSquare(const Matrix& m, std::span<const std::size_t> idx) {
  Matrix out(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) out(a, b) = m(idx[a], idx[b]);
  return out;
}

}  // namespace

std::string LossModeName(LossMode mode) {
  return mode == LossMode::kAugmentedTriplet ? "augmented-triplet"
                                             : "neural-ndcg";
}

LossMode ParseLossMode(const std::string& name) {
  if (name == "augmented-triplet") return LossMode::kAugmentedTriplet;
  if (name == "neural-ndcg") return LossMode::kNeuralNdcg;
  throw InvalidArgument("unknown loss '" + name +
                        "' (expected augmented-triplet or neural-ndcg)");
}

void Validate(const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw InvalidArgument("epochs must be at least 1");
  if (cfg.batch_size < 1) throw InvalidArgument("batch size must be positive");
  if (cfg.loss_mode == LossMode::kAugmentedTriplet && cfg.batch_size < 2) {
    throw InvalidArgument("triplet training needs batch size >= 2");
  }
  if (cfg.embed_dim < 1) throw InvalidArgument("embed_dim must be positive");
  if (!(cfg.subset_fraction > 0.0 && cfg.subset_fraction <= 1.0)) {
    throw InvalidArgument("subset fraction must lie in (0, 1]");
  }
  Validate(cfg.adam);
  Validate(cfg.triplet);
  Validate(cfg.augment);
  Validate(cfg.ndcg);
}

ModelGradients ComputeModelGradients(const PairedBatch& batch,
                                     const Matrix& batch_rel,
                                     const TwoTowerModel& model,
                                     LossMode mode, const TrainConfig& cfg,
                                     Rng& rng) {
  const std::size_t n = batch.size();
  if (batch.video.rows() != n || batch.text.rows() != n ||
      batch_rel.rows() != n || batch_rel.cols() != n) {
    throw InvalidArgument("batch features and relevance are not aligned");
  }
  if (batch.video.cols() != model.video.input_dim() ||
      batch.text.cols() != model.text.input_dim()) {
    throw InvalidArgument("batch feature dimensions do not match the model");
  }
  const EncodeTape video = EncodeWithTape(batch.video, model.video);
  const EncodeTape text = EncodeWithTape(batch.text, model.text);
  const Matrix sim = Similarity(video.unit, text.unit);

  const LossAndGrad loss = mode == LossMode::kAugmentedTriplet
                               ? TripletRanpLoss(sim, batch_rel, cfg.triplet, rng)
                               : NeuralNdcgBatchLoss(sim, batch_rel, cfg.ndcg);

  // sim = V T^T  =>  dV = G T,  dT = G^T V.
  const std::size_t e = model.embed_dim();
  Matrix grad_video(n, e), grad_text(n, e);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double g = loss.grad(i, j);
      if (g == 0.0) continue;
      for (std::size_t c = 0; c < e; ++c) {
        grad_video(i, c) += g * text.unit(j, c);
        grad_text(j, c) += g * video.unit(i, c);
      }
    }
  }

  ModelGradients out;
  out.loss = loss.loss;
  out.grads.video = ZeroLike(model.video);
  out.grads.text = ZeroLike(model.text);
  TowerBackward(batch.video, video, grad_video, out.grads.video);
  TowerBackward(batch.text, text, grad_text, out.grads.text);
  return out;
}

std::string FormatHistory(const TrainHistory& history) {
  std::string out;
  char buf[160];
  for (const EpochRecord& r : history.epochs) {
    std::snprintf(buf, sizeof(buf), "%d\t%.17g\t%.17g\t%.17g\n", r.epoch,
                  r.train_loss, r.val_ndcg_avg, r.val_map_avg);
    out += buf;
  }
  return out;
}

SimilarityMatrix ScoreItems(const TwoTowerModel& model, const Dataset& dataset,
                            std::span<const std::size_t> indices) {
  SimilarityMatrix sim;
  const Matrix video = Encode(SelectRows(dataset.video_features, indices), model.video);
  const Matrix text = Encode(SelectRows(dataset.text_features, indices), model.text);
  sim.values = Similarity(video, text);
  for (std::size_t idx : indices) {
    sim.row_ids.push_back(dataset.annotations[idx].id);
    sim.col_ids.push_back(dataset.annotations[idx].id);
  }
  return sim;
}

RelevanceMatrix RelevanceOfItems(const Dataset& dataset,
                                 std::span<const std::size_t> indices) {
  std::vector<CaptionAnnotation> items;
  items.reserve(indices.size());
  for (std::size_t idx : indices) items.push_back(dataset.annotations[idx]);
  return ComputeRelevanceMatrix(items);
}

MetricsReport EvaluateItems(const TwoTowerModel& model, const Dataset& dataset,
                            std::span<const std::size_t> indices) {
  return Evaluate(ScoreItems(model, dataset, indices),
                  RelevanceOfItems(dataset, indices));
}

TrainResult Train(const Dataset& dataset, const TrainConfig& cfg) {
  Validate(cfg);
  Validate(dataset);
  const auto train_all = dataset.IndicesOf(Split::kTrain);
  const auto validation = dataset.IndicesOf(Split::kValidation);
  if (train_all.empty()) throw DataError("dataset has no training items");
  if (validation.empty()) throw DataError("dataset has no validation items");

  std::vector<std::string> train_ids;
  for (std::size_t idx : train_all) train_ids.push_back(dataset.annotations[idx].id);
  TrainResult result;
  result.training_ids = SubsetSplit(train_ids, cfg.subset_fraction, cfg.seed);
  const std::unordered_set<std::string> chosen(result.training_ids.begin(),
                                               result.training_ids.end());
  std::vector<std::size_t> train_idx;
  for (std::size_t idx : train_all) {
    if (chosen.count(dataset.annotations[idx].id)) train_idx.push_back(idx);
  }

  // The training subset is also the augmentation pool.
  PairedBatch pool;
  pool.ids = result.training_ids;
  pool.video = SelectRows(dataset.video_features, train_idx);
  pool.text = SelectRows(dataset.text_features, train_idx);
  const RelevanceMatrix pool_rel = RelevanceOfItems(dataset, train_idx);
  AugmentConfig augment = cfg.augment;
  augment.candidate_pool = {result.training_ids.begin(), result.training_ids.end()};

  Rng rng(cfg.seed);
  result.model = InitModel(dataset.video_features.cols(),
                           dataset.text_features.cols(), cfg.embed_dim, rng);
  result.initial_validation = EvaluateItems(result.model, dataset, validation);

  ModelOptimizer optimizer(cfg.adam);
  std::vector<std::size_t> order(train_idx.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::swap(order[i], order[rng.Index(i + 1)]);
    }
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      const std::span<const std::size_t> positions(order.data() + start, stop - start);
      PairedBatch batch;
      for (std::size_t p : positions) batch.ids.push_back(pool.ids[p]);
      batch.video = SelectRows(pool.video, positions);
      batch.text = SelectRows(pool.text, positions);
      if (cfg.loss_mode == LossMode::kAugmentedTriplet) {
        batch = SampleAugmentedBatch(batch, pool, pool_rel, augment, rng).batch;
      }
      const Matrix batch_rel = SelectSquare(pool_rel.values, positions);
      const ModelGradients g = ComputeModelGradients(
          batch, batch_rel, result.model, cfg.loss_mode, cfg, rng);
      optimizer.Step(result.model, g.grads);
      loss_sum += g.loss;
      ++batches;
    }
    const MetricsReport val = EvaluateItems(result.model, dataset, validation);
    result.history.epochs.push_back(
        {epoch, loss_sum / static_cast<double>(batches), val.ndcg_avg, val.map_avg});
  }
  return result;
}

}  // namespace rankfuse
