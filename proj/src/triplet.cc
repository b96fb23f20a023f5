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

#include "rankfuse/triplet.h"

#include <cmath>

#include "rankfuse/error.h"

namespace rankfuse {

std::string MiningModeName(MiningMode mode) {
  return mode == MiningMode::kHardest ? "hardest" : "random";
}

MiningMode ParseMiningMode(const std::string& name) {
  if (name == "hardest") return MiningMode::kHardest;
  if (name == "random") return MiningMode::kRandom;
  throw InvalidArgument("unknown mining mode '" + name + "'");
}

void Validate(const TripletConfig& cfg) {
  if (!(cfg.margin > 0.0) || !std::isfinite(cfg.margin)) {
    throw InvalidArgument("margin must be positive");
  }
  if (!(cfg.relevance_threshold >= 0.0 && cfg.relevance_threshold <= 1.0)) {
    throw InvalidArgument("relevance threshold must lie in [0, 1]");
  }
}

RelevancePartition PartitionByRelevance(std::span<const double> anchor_row,
                                        double threshold,
                                        std::size_t anchor_index) {
  if (anchor_index >= anchor_row.size()) {
    throw InvalidArgument("anchor index " + std::to_string(anchor_index) +
                          " out of range for row of " +
                          std::to_string(anchor_row.size()));
  }
  RelevancePartition out;
  for (std::size_t j = 0; j < anchor_row.size(); ++j) {
    if (j == anchor_index) continue;
    if (anchor_row[j] >= threshold) {
      out.positives.push_back(j);
    } else {
      out.negatives.push_back(j);
    }
  }
  return out;
}

std::optional<std::size_t> MineNegative(std::span<const double> sim_row,
                                        std::span<const std::size_t> negatives,
                                        MiningMode mode, Rng& rng) {
  if (negatives.empty()) return std::nullopt;
  if (mode == MiningMode::kRandom) return negatives[rng.Index(negatives.size())];
  std::size_t best = negatives.front();
  for (std::size_t idx : negatives) {
    if (sim_row[idx] > sim_row[best] ||
        (sim_row[idx] == sim_row[best] && idx < best)) {
      best = idx;
    }
  }
  return best;
}

LossAndGrad TripletRanpLoss(const Matrix& sim, const Matrix& rel,
                            const TripletConfig& cfg, Rng& rng) {
  Validate(cfg);
  if (!sim.SameShape(rel) || sim.rows() != sim.cols()) {
    throw InvalidArgument("triplet loss needs square aligned matrices, got " +
                          ShapeString(sim) + " and " + ShapeString(rel));
  }
  const std::size_t n = sim.rows();
  if (n == 0) throw InvalidArgument("empty batch");

  // Terms reference sim entries by (row, col); the direction only decides
  // which line of the matrix the anchor reads.
  struct Term {
    double value;
    std::size_t pos_r, pos_c, neg_r, neg_c;
  };
  std::vector<Term> terms;
  const Matrix sim_t = sim.Transposed();
  const Matrix rel_t = rel.Transposed();

  for (int direction = 0; direction < 2; ++direction) {
    const Matrix& s = direction == 0 ? sim : sim_t;
    const Matrix& r = direction == 0 ? rel : rel_t;
    auto entry = [direction](std::size_t anchor, std::size_t other) {
      return direction == 0 ? std::pair{anchor, other}
                            : std::pair{other, anchor};
    };
    for (std::size_t i = 0; i < n; ++i) {
      const auto part = PartitionByRelevance(r.row(i), cfg.relevance_threshold, i);
      const auto neg = MineNegative(s.row(i), part.negatives, cfg.mining, rng);
      if (!neg) continue;
      const auto [nr, nc] = entry(i, *neg);
      const auto [gr, gc] = entry(i, i);
      terms.push_back({cfg.margin - s(i, i) + s(i, *neg), gr, gc, nr, nc});
      if (cfg.use_relevant_positives && !part.positives.empty()) {
        const std::size_t pos = part.positives[rng.Index(part.positives.size())];
        const auto [pr, pc] = entry(i, pos);
        terms.push_back({cfg.margin - s(i, pos) + s(i, *neg), pr, pc, nr, nc});
      }
    }
  }

  LossAndGrad out;
  out.grad = Matrix(n, n);
  out.terms = terms.size();
  if (terms.empty()) return out;
  const double weight = 1.0 / static_cast<double>(terms.size());
  double total = 0.0;
  for (const Term& t : terms) {
    if (t.value <= 0.0) continue;
    total += t.value;
    out.grad(t.pos_r, t.pos_c) -= weight;
    out.grad(t.neg_r, t.neg_c) += weight;
  }
  out.loss = total * weight;
  return out;
}

}  // namespace rankfuse
