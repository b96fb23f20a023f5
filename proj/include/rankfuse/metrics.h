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

#ifndef RANKFUSE_METRICS_H_
#define RANKFUSE_METRICS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankfuse/relevance.h"
#include "rankfuse/similarity_matrix.h"

namespace rankfuse {

// nDCG and mAP in both retrieval directions plus their averages.
// v2t: each video (row) queries all captions; t2v: each caption (column)
// queries all videos.
struct MetricsReport {
  double ndcg_v2t = 0.0;
  double ndcg_t2v = 0.0;
  double ndcg_avg = 0.0;
  double map_v2t = 0.0;
  double map_t2v = 0.0;
  double map_avg = 0.0;
  std::size_t n_queries_v2t = 0;
  std::size_t n_queries_t2v = 0;
  // Queries that had at least one positive and therefore entered the mAP mean.
  std::size_t n_map_queries_v2t = 0;
  std::size_t n_map_queries_t2v = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Sum of gains[i] / log2(i + 2) over 0-based ranks i. Throws on empty input.
double Dcg(std::span<const double> gains_in_rank_order);

// Item indices ordered by descending score; ties keep ascending index order.
std::vector<std::size_t> RankOrder(std::span<const double> scores);

// Linear-gain nDCG of the ranking induced by `scores`. A query whose
// relevances are all zero scores 1.
double Ndcg(std::span<const double> scores, std::span<const double> relevances);

// Average precision with item j positive iff relevances[j] > pos_threshold.
// Returns nullopt when nothing is positive.
std::optional<double> AveragePrecision(std::span<const double> scores,
                                       std::span<const double> relevances,
                                       double pos_threshold = 0.0);

// Per-direction values are plain means over queries, accumulated in index
// order, so parallel evaluation reproduces the sequential result bit for bit.
// Queries without positives are left out of the mAP mean; a direction with
// no such query at all reports mAP 0.
MetricsReport Evaluate(const SimilarityMatrix& sim, const RelevanceMatrix& rel,
                       double pos_threshold = 0.0);

// "key=value" lines, one per field, values printed with 17 significant
// digits so that reports round-trip exactly.
std::string FormatReport(const MetricsReport& report);

}  // namespace rankfuse

#endif  // RANKFUSE_METRICS_H_
