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
#include <sstream>

#include "doctest.h"
#include "oracles.h"
#include "rankfuse/error.h"
#include "rankfuse/synthetic.h"
#include "test_util.h"

namespace rankfuse {
namespace {

using V = std::vector<double>;

// Flattened view of all four parameter blocks, in a fixed order.
V Flatten(const TwoTowerModel& m) {
  V out;
  for (const Tower* t : {&m.video, &m.text}) {
    out.insert(out.end(), t->weights.data().begin(), t->weights.data().end());
    out.insert(out.end(), t->bias.begin(), t->bias.end());
  }
  return out;
}

TwoTowerModel Unflatten(const TwoTowerModel& shape, const V& x) {
  TwoTowerModel m = shape;
  std::size_t k = 0;
  for (Tower* t : {&m.video, &m.text}) {
    for (double& w : t->weights.data()) w = x[k++];
    for (double& b : t->bias) b = x[k++];
  }
  return m;
}

Dataset ToyDataset(std::size_t n_train, std::size_t n_val, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d;
  const std::size_t n = n_train + n_val;
  for (std::size_t i = 0; i < n; ++i) {
    d.annotations.push_back({"t" + std::to_string(i), static_cast<std::int64_t>(i % 2),
                             {static_cast<std::int64_t>(i % 3)}});
    d.splits.push_back(i < n_train ? Split::kTrain : Split::kValidation);
  }
  d.video_features = testing::RandomMatrix(rng, n, 5);
  d.text_features = testing::RandomMatrix(rng, n, 4);
  return d;
}

bool SmoothForTriplet(const Matrix& sim, double margin) {
  const std::size_t n = sim.rows();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        if (std::abs(margin - sim(a, b) + sim(a, c)) <= 1e-3) return false;
        if (std::abs(margin - sim(b, a) + sim(c, a)) <= 1e-3) return false;
        if (b != c && (std::abs(sim(a, b) - sim(a, c)) <= 1e-3 ||
                       std::abs(sim(b, a) - sim(c, a)) <= 1e-3))
          return false;
      }
  return true;
}

TEST_CASE("loss mode names") {
  CHECK(ParseLossMode("neural-ndcg") == LossMode::kNeuralNdcg);
  CHECK(LossModeName(LossMode::kAugmentedTriplet) == "augmented-triplet");
  CHECK_THROWS_AS(ParseLossMode("softmax"), InvalidArgument);
}

TEST_CASE("model gradients match finite differences") {
  Rng gen(123);
  for (LossMode mode : {LossMode::kAugmentedTriplet, LossMode::kNeuralNdcg}) {
    int checked = 0;
    for (int t = 0; checked < 100; ++t) {
      const std::size_t n = 2 + gen.Index(3);
      const std::size_t e = 1 + gen.Index(4);
      const std::size_t dv = 1 + gen.Index(4), dt = 1 + gen.Index(4);
      TwoTowerModel model = InitModel(dv, dt, e, gen);
      for (double& b : model.video.bias) b = gen.Uniform(-0.3, 0.3);
      for (double& b : model.text.bias) b = gen.Uniform(-0.3, 0.3);
      const PairedBatch batch{testing::Ids("b", n), testing::RandomMatrix(gen, n, dv),
                              testing::RandomMatrix(gen, n, dt)};
      Matrix rel = testing::RandomMatrix(gen, n, n, 0, 0.4);
      for (std::size_t i = 0; i < n; ++i) rel(i, i) = 1.0;
      TrainConfig cfg;
      if (mode == LossMode::kAugmentedTriplet &&
          !SmoothForTriplet(Similarity(Encode(batch.video, model.video),
                                       Encode(batch.text, model.text)),
                            cfg.triplet.margin))
        continue;
      ++checked;

      const Rng seed(t);
      Rng rng = seed;
      const auto g = ComputeModelGradients(batch, rel, model, mode, cfg, rng);
      const V x = Flatten(model);
      const V grad = Flatten(g.grads);
      auto f = [&](const V& p) {
        Rng copy = seed;
        return ComputeModelGradients(batch, rel, Unflatten(model, p), mode, cfg, copy).loss;
      };
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double fd = oracle::CentralDifference(f, x, k, 1e-6);
        CHECK(oracle::RelativeError(grad[k], fd) < 1e-4);
      }
    }
  }
}

TEST_CASE("inactive hinges give zero gradients") {
  // Identity towers on orthonormal features: s(i,i) = 1 and s(i,j) = 0.
  TwoTowerModel model{{Matrix::Identity(3), V(3, 0.0)}, {Matrix::Identity(3), V(3, 0.0)}};
  const PairedBatch batch{testing::Ids("b", 3), Matrix::Identity(3), Matrix::Identity(3)};
  TrainConfig cfg;
  Rng rng(0);
  const auto g = ComputeModelGradients(batch, Matrix::Identity(3), model,
                                       LossMode::kAugmentedTriplet, cfg, rng);
  CHECK(g.loss == 0.0);
  for (double v : Flatten(g.grads)) CHECK(v == 0.0);
}

TEST_CASE("duplicating an item adds its terms once more") {
  Rng gen(7);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 3 + gen.Index(4);
    const Matrix sim = testing::RandomMatrix(gen, n, n);
    Matrix rel = testing::RandomMatrix(gen, n, n, 0, 0.3);
    for (std::size_t i = 0; i < n; ++i) rel(i, i) = 1.0;
    const std::size_t k = gen.Index(n);

    // Item n is a copy of item k: same similarities, fully relevant to k.
    Matrix sim2(n + 1, n + 1), rel2(n + 1, n + 1);
    auto src = [&](std::size_t i) { return i == n ? k : i; };
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j <= n; ++j) {
        sim2(i, j) = sim(src(i), src(j));
        rel2(i, j) = rel(src(i), src(j));
      }

    TripletConfig cfg;
    cfg.use_relevant_positives = false;
    Rng r1(0), r2(0);
    const auto base = TripletRanpLoss(sim, rel, cfg, r1);
    const auto dup = TripletRanpLoss(sim2, rel2, cfg, r2);

    // Item k's own contribution, recomputed by hand for both directions.
    double own = 0.0;
    std::size_t own_terms = 0;
    for (int dir = 0; dir < 2; ++dir) {
      std::optional<double> hardest;
      for (std::size_t j = 0; j < n; ++j) {
        const double r = dir == 0 ? rel(k, j) : rel(j, k);
        const double s = dir == 0 ? sim(k, j) : sim(j, k);
        if (j != k && r < cfg.relevance_threshold && (!hardest || s > *hardest)) hardest = s;
      }
      if (!hardest) continue;
      own += std::max(0.0, cfg.margin - sim(k, k) + *hardest);
      ++own_terms;
    }
    CHECK(dup.terms == base.terms + own_terms);
    const double base_sum = base.loss * static_cast<double>(base.terms);
    const double dup_sum = dup.loss * static_cast<double>(dup.terms);
    CHECK(dup_sum == doctest::Approx(base_sum + own).epsilon(1e-12));
  }
}

TEST_CASE("training bookkeeping") {
  const Dataset d = ToyDataset(4, 2, 1);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 3;
  cfg.embed_dim = 3;
  cfg.subset_fraction = 1.0;
  for (LossMode mode : {LossMode::kAugmentedTriplet, LossMode::kNeuralNdcg}) {
    cfg.loss_mode = mode;
    const auto r = Train(d, cfg);
    REQUIRE(r.history.epochs.size() == 1);
    CHECK(r.history.epochs[0].epoch == 1);
    CHECK(r.training_ids.size() == 4);
    CHECK(r.model.embed_dim() == 3);
    CHECK(std::isfinite(r.history.epochs[0].train_loss));
  }
  cfg.epochs = 0;
  CHECK_THROWS_AS(Train(d, cfg), InvalidArgument);
  cfg.epochs = 1;
  Dataset no_val = d;
  for (Split& s : no_val.splits) s = Split::kTrain;
  CHECK_THROWS_AS(Train(no_val, cfg), DataError);
}

TEST_CASE("training is deterministic") {
  SyntheticSpec spec;
  spec.n_items = 80;
  spec.seed = 3;
  const Dataset d = GenerateSynthetic(spec).dataset;
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 8;
  cfg.embed_dim = 8;
  cfg.subset_fraction = 0.5;
  cfg.seed = 11;
  for (LossMode mode : {LossMode::kAugmentedTriplet, LossMode::kNeuralNdcg}) {
    cfg.loss_mode = mode;
    const auto a = Train(d, cfg);
    const auto b = Train(d, cfg);
    CHECK(a.model == b.model);
    CHECK(FormatHistory(a.history) == FormatHistory(b.history));
    cfg.seed = 12;
    CHECK_FALSE(Train(d, cfg).model == a.model);
    cfg.seed = 11;
  }
}

TEST_CASE("history format") {
  TrainHistory h{{{1, 0.5, 0.25, 0.125}, {2, 0.1, 0.2, 0.3}}};
  CHECK(FormatHistory(h) == "1\t0.5\t0.25\t0.125\n2\t0.10000000000000001\t0.20000000000000001\t0.29999999999999999\n");
}

}  // namespace
}  // namespace rankfuse
