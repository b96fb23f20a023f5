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

#ifndef RANKFUSE_AUGMENT_H_
#define RANKFUSE_AUGMENT_H_

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rankfuse/matrix.h"
#include "rankfuse/relevance.h"
#include "rankfuse/rng.h"

namespace rankfuse {

// Feature-space mixing of semantically related training items.
struct AugmentConfig {
  // Chance that an item is augmented at all.
  double probability = 1.0;
  // Partners must have relevance >= partner_threshold with the anchor.
  double partner_threshold = 0.15;
  // Mixing weight of the anchor, drawn uniformly from [mix_low, mix_high].
  double mix_low = 0.5;
  double mix_high = 1.0;
  // Only ids in this set may be anchors or partners.
  std::set<std::string> candidate_pool;
};

void Validate(const AugmentConfig& cfg);

// Video and caption features of aligned items: row i of each matrix belongs
// to ids[i].
struct PairedBatch {
  std::vector<std::string> ids;
  Matrix video;
  Matrix text;

  std::size_t size() const { return ids.size(); }
  friend bool operator==(const PairedBatch&, const PairedBatch&) = default;
};

// lambda * anchor + (1 - lambda) * partner.
std::vector<double> AugmentFeatures(std::span<const double> anchor,
                                    std::span<const double> partner,
                                    double lambda);

// What happened to one batch item; partners are pool ids.
struct AugmentRecord {
  std::optional<std::string> video_partner;
  std::optional<std::string> text_partner;
  double video_lambda = 1.0;
  double text_lambda = 1.0;
};

struct AugmentedBatch {
  PairedBatch batch;
  std::vector<AugmentRecord> records;
};

// Replaces each item's features, with probability cfg.probability, by a mix
// with a relevant partner drawn from the candidate pool. Video and caption
// partners (and their lambdas) are drawn independently. Items keep their id
// and therefore their annotation and groundtruth pairing; items without an
// eligible partner pass through.
//
// `pool` holds the features of every item partners may come from and must be
// aligned with both axes of `pool_rel`. Random numbers are consumed per item
// in batch order: the augmentation coin, then video partner and lambda, then
// caption partner and lambda.
//
// Throws DataError if a batch id is not in cfg.candidate_pool (the guard
// against mixing with items outside the training subset) or not in `pool`.
AugmentedBatch SampleAugmentedBatch(const PairedBatch& batch,
                                    const PairedBatch& pool,
                                    const RelevanceMatrix& pool_rel,
                                    const AugmentConfig& cfg, Rng& rng);

}  // namespace rankfuse

#endif  // RANKFUSE_AUGMENT_H_
