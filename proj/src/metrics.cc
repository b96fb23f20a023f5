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

#include "rankfuse/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "rankfuse/error.h"
#include "rankfuse/parallel.h"

namespace rankfuse {
namespace {

void CheckLengths(std::span<const double> scores,
                  std::span<const double> relevances) {
  if (scores.size() != relevances.size()) {
    throw InvalidArgument("score/relevance length mismatch: " +
                          std::to_string(scores.size()) + " vs " +
                          std::to_string(relevances.size()));
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw InvalidArgument("non-finite score");
  }
}

void CheckRelevances(std::span<const double> relevances) {
  for (double r : relevances) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw InvalidArgument("relevance outside [0, 1]");
    }
  }
}

double Mean(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

struct DirectionResult {
  double ndcg = 0.0;
  double map = 0.0;
  std::size_t n_queries = 0;
  std::size_t n_map_queries = 0;
};

// Each row of `scores` is a query over its columns.
DirectionResult EvaluateRows(const Matrix& scores, const Matrix& rel,
                             double pos_threshold) {
  const std::size_t n = scores.rows();
  std::vector<double> ndcgs(n);
  std::vector<std::optional<double>> aps(n);
  ParallelFor(n, [&](std::size_t q) {
    ndcgs[q] = Ndcg(scores.row(q), rel.row(q));
    aps[q] = AveragePrecision(scores.row(q), rel.row(q), pos_threshold);
  });
  DirectionResult out;
  out.n_queries = n;
  out.ndcg = Mean(ndcgs);
  std::vector<double> present;
  for (const auto& ap : aps) {
    if (ap) present.push_back(*ap);
  }
  out.n_map_queries = present.size();
  out.map = Mean(present);
  return out;
}

}  // namespace

double Dcg(std::span<const double> gains_in_rank_order) {
  if (gains_in_rank_order.empty()) throw InvalidArgument("DCG of empty list");
  double dcg = 0.0;
  for (std::size_t i = 0; i < gains_in_rank_order.size(); ++i) {
    dcg += gains_in_rank_order[i] / std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg;
}

std::vector<std::size_t> RankOrder(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  return order;
}

double Ndcg(std::span<const double> scores,
            std::span<const double> relevances) {
  CheckLengths(scores, relevances);
  CheckRelevances(relevances);
  if (scores.empty()) throw InvalidArgument("nDCG of empty list");

  std::vector<double> ranked;
  ranked.reserve(relevances.size());
  for (std::size_t idx : RankOrder(scores)) ranked.push_back(relevances[idx]);

  std::vector<double> ideal(relevances.begin(), relevances.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double ideal_dcg = Dcg(ideal);
  if (ideal_dcg == 0.0) return 1.0;
  return std::min(1.0, Dcg(ranked) / ideal_dcg);
}

std::optional<double> AveragePrecision(std::span<const double> scores,
                                       std::span<const double> relevances,
                                       double pos_threshold) {
  CheckLengths(scores, relevances);
  if (!(pos_threshold >= 0.0)) {
    throw InvalidArgument("positive threshold must be non-negative");
  }
  std::size_t hits = 0;
  double precision_sum = 0.0;
  const auto order = RankOrder(scores);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (relevances[order[rank]] > pos_threshold) {
      ++hits;
      precision_sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  if (hits == 0) return std::nullopt;
  return precision_sum / static_cast<double>(hits);
}

MetricsReport Evaluate(const SimilarityMatrix& sim, const RelevanceMatrix& rel,
                       double pos_threshold) {
  if (!sim.values.SameShape(rel.values)) {
    throw DataError("similarity " + ShapeString(sim.values) +
                    " and relevance " + ShapeString(rel.values) +
                    " shapes differ");
  }
  if (sim.values.empty()) throw DataError("cannot evaluate an empty matrix");
  CheckIdsAligned(rel.row_ids, sim.row_ids, "row ids");
  CheckIdsAligned(rel.col_ids, sim.col_ids, "column ids");

  const DirectionResult v2t = EvaluateRows(sim.values, rel.values,
                                           pos_threshold);
  const DirectionResult t2v = EvaluateRows(
      sim.values.Transposed(), rel.values.Transposed(), pos_threshold);

  MetricsReport report;
  report.ndcg_v2t = v2t.ndcg;
  report.ndcg_t2v = t2v.ndcg;
  report.ndcg_avg = 0.5 * (v2t.ndcg + t2v.ndcg);
  report.map_v2t = v2t.map;
  report.map_t2v = t2v.map;
  report.map_avg = 0.5 * (v2t.map + t2v.map);
  report.n_queries_v2t = v2t.n_queries;
  report.n_queries_t2v = t2v.n_queries;
  report.n_map_queries_v2t = v2t.n_map_queries;
  report.n_map_queries_t2v = t2v.n_map_queries;
  return report;
}

std::string FormatReport(const MetricsReport& report) {
  std::string out;
  auto real = [&out](const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s=%.17g\n", key, v);
    out += buf;
  };
  auto count = [&out](const char* key, std::size_t v) {
    out += std::string(key) + "=" + std::to_string(v) + "\n";
  };
  real("ndcg_v2t", report.ndcg_v2t);
  real("ndcg_t2v", report.ndcg_t2v);
  real("ndcg_avg", report.ndcg_avg);
  real("map_v2t", report.map_v2t);
  real("map_t2v", report.map_t2v);
  real("map_avg", report.map_avg);
  count("n_queries_v2t", report.n_queries_v2t);
  count("n_queries_t2v", report.n_queries_t2v);
  count("n_map_queries_v2t", report.n_map_queries_v2t);
  count("n_map_queries_t2v", report.n_map_queries_t2v);
  return out;
}

}  // namespace rankfuse
