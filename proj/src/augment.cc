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

#include "rankfuse/augment.h"

#include <unordered_map>

#include "rankfuse/error.h"
#include "rankfuse/similarity_matrix.h"

namespace rankfuse {

void Validate(const AugmentConfig& cfg) {
  if (!(cfg.probability >= 0.0 && cfg.probability <= 1.0)) {
    throw InvalidArgument("augmentation probability must lie in [0, 1]");
  }
  if (!(cfg.partner_threshold >= 0.0 && cfg.partner_threshold <= 1.0)) {
    throw InvalidArgument("partner threshold must lie in [0, 1]");
  }
  if (!(cfg.mix_low >= 0.5 && cfg.mix_low <= cfg.mix_high &&
        cfg.mix_high <= 1.0)) {
    throw InvalidArgument("mixing range needs 0.5 <= mix_low <= mix_high <= 1");
  }
}

std::vector<double> AugmentFeatures(std::span<const double> anchor,
                                    std::span<const double> partner,
                                    double lambda) {
  if (anchor.size() != partner.size()) {
    throw InvalidArgument("feature dimension mismatch: " +
                          std::to_string(anchor.size()) + " vs " +
                          std::to_string(partner.size()));
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidArgument("mixing weight must lie in [0, 1]");
  }
  std::vector<double> out(anchor.size());
  for (std::size_t d = 0; d < anchor.size(); ++d) {
    out[d] = lambda * anchor[d] + (1.0 - lambda) * partner[d];
  }
  return out;
}

AugmentedBatch SampleAugmentedBatch(const PairedBatch& batch,
                                    const PairedBatch& pool,
                                    const RelevanceMatrix& pool_rel,
                                    const AugmentConfig& cfg, Rng& rng) {
  Validate(cfg);
  if (batch.video.rows() != batch.size() || batch.text.rows() != batch.size() ||
      pool.video.rows() != pool.size() || pool.text.rows() != pool.size()) {
    throw InvalidArgument("feature rows do not match ids");
  }
  if (batch.size() > 0 && (batch.video.cols() != pool.video.cols() ||
                           batch.text.cols() != pool.text.cols())) {
    throw InvalidArgument("batch and pool feature dimensions differ");
  }
  CheckIdsAligned(pool.ids, pool_rel.row_ids, "augmentation pool rows");
  CheckIdsAligned(pool.ids, pool_rel.col_ids, "augmentation pool columns");

  std::unordered_map<std::string, std::size_t> pool_index;
  for (std::size_t j = 0; j < pool.size(); ++j) pool_index.emplace(pool.ids[j], j);
  std::vector<char> in_candidates(pool.size(), 0);
  for (std::size_t j = 0; j < pool.size(); ++j) {
    in_candidates[j] = cfg.candidate_pool.count(pool.ids[j]) ? 1 : 0;
  }

  AugmentedBatch out;
  out.batch = batch;
  out.records.resize(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const std::string& id = batch.ids[i];
    if (!cfg.candidate_pool.count(id)) {
      throw DataError("batch item '" + id + "' is outside the candidate pool");
    }
    const auto found = pool_index.find(id);
    if (found == pool_index.end()) {
      throw DataError("batch item '" + id + "' has no pool features");
    }
    const std::size_t anchor = found->second;

    if (cfg.probability <= 0.0 || !(rng.Uniform() < cfg.probability)) continue;

    std::vector<std::size_t> eligible;
    const auto rel_row = pool_rel.values.row(anchor);
    for (std::size_t j = 0; j < pool.size(); ++j) {
      if (j != anchor && in_candidates[j] && rel_row[j] >= cfg.partner_threshold) {
        eligible.push_back(j);
      }
    }
    if (eligible.empty()) continue;

    AugmentRecord& record = out.records[i];
    {
      const std::size_t partner = eligible[rng.Index(eligible.size())];
      const double lambda = rng.UniformClosed(cfg.mix_low, cfg.mix_high);
      const auto mixed = AugmentFeatures(batch.video.row(i),
                                         pool.video.row(partner), lambda);
      std::copy(mixed.begin(), mixed.end(), out.batch.video.row(i).begin());
      record.video_partner = pool.ids[partner];
      record.video_lambda = lambda;
    }
    {
      const std::size_t partner = eligible[rng.Index(eligible.size())];
      const double lambda = rng.UniformClosed(cfg.mix_low, cfg.mix_high);
      const auto mixed = AugmentFeatures(batch.text.row(i),
                                         pool.text.row(partner), lambda);
      std::copy(mixed.begin(), mixed.end(), out.batch.text.row(i).begin());
      record.text_partner = pool.ids[partner];
      record.text_lambda = lambda;
    }
  }
  return out;
}

}  // namespace rankfuse
