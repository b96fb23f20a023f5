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

#ifndef RANKFUSE_TRIPLET_H_
#define RANKFUSE_TRIPLET_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankfuse/matrix.h"
#include "rankfuse/neuralsort.h"
#include "rankfuse/rng.h"

namespace rankfuse {

enum class MiningMode { kHardest, kRandom };

std::string MiningModeName(MiningMode mode);
// Accepts "hardest" or "random".
MiningMode ParseMiningMode(const std::string& name);

struct TripletConfig {
  double margin = 0.2;
  // Items with relevance >= threshold count as relevant.
  double relevance_threshold = 0.15;
  MiningMode mining = MiningMode::kHardest;
  bool use_relevant_positives = true;
};

void Validate(const TripletConfig& cfg);

// Split of one anchor's candidates. The anchor's own index (its groundtruth
// match) belongs to neither set.
struct RelevancePartition {
  std::vector<std::size_t> positives;  // relevance >= threshold
  std::vector<std::size_t> negatives;  // relevance < threshold
};

RelevancePartition PartitionByRelevance(std::span<const double> anchor_row,
                                        double threshold,
                                        std::size_t anchor_index);

// Hardest: the negative with maximal similarity, smallest index on ties.
// Random: a uniform draw from `negatives`. nullopt when there is none.
std::optional<std::size_t> MineNegative(std::span<const double> sim_row,
                                        std::span<const std::size_t> negatives,
                                        MiningMode mode, Rng& rng);

// Relevance-aware bidirectional triplet loss on a square batch whose i-th
// video and i-th caption are the groundtruth pair.
//
// For every anchor (video rows first, then caption columns, each in
// ascending order) the negative is mined among irrelevant items and yields
//   max(0, margin - s(i, i) + s(i, neg)).
// When relevant positives are enabled and exist, one of them is drawn
// uniformly and adds
//   max(0, margin - s(i, pos) + s(i, neg)).
// The loss is the mean over all formed terms; anchors without irrelevant
// items form no term. Random draws consume `rng` in exactly that order
// (negative before positive). The gradient uses subgradient 0 at the hinge.
LossAndGrad TripletRanpLoss(const Matrix& sim, const Matrix& rel,
                            const TripletConfig& cfg, Rng& rng);

}  // namespace rankfuse

#endif  // RANKFUSE_TRIPLET_H_
