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

// Independent reference implementations used only by tests. They follow the
// textbook definitions as literally as possible and share no code with the
// library paths they check.

#ifndef RANKFUSE_TESTS_ORACLES_H_
#define RANKFUSE_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iterator>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "rankfuse/matrix.h"
#include "rankfuse/relevance.h"
#include "rankfuse/rng.h"

namespace rankfuse::oracle {

inline double SetIou(const std::set<std::int64_t>& a,
                     const std::set<std::int64_t>& b) {
  std::set<std::int64_t> inter, uni;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(inter, inter.begin()));
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::inserter(uni, uni.begin()));
  return uni.empty() ? 0.0
                     : static_cast<double>(inter.size()) /
                           static_cast<double>(uni.size());
}

inline double Relevance(const CaptionAnnotation& a, const CaptionAnnotation& b) {
  const std::set<std::int64_t> va{a.verb_class}, vb{b.verb_class};
  const std::set<std::int64_t> na(a.noun_classes.begin(), a.noun_classes.end());
  const std::set<std::int64_t> nb(b.noun_classes.begin(), b.noun_classes.end());
  return (SetIou(va, vb) + SetIou(na, nb)) / 2.0;
}

// Ranking by repeated selection of the best remaining item (highest score,
// lowest index on ties).
inline std::vector<std::size_t> SelectionRanking(const std::vector<double>& scores) {
  std::vector<bool> taken(scores.size(), false);
  std::vector<std::size_t> order;
  for (std::size_t r = 0; r < scores.size(); ++r) {
    std::size_t best = scores.size();
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (taken[j]) continue;
      if (best == scores.size() || scores[j] > scores[best]) best = j;
    }
    taken[best] = true;
    order.push_back(best);
  }
  return order;
}

inline double DcgOf(const std::vector<double>& gains, std::size_t k) {
  double total = 0.0;
  for (std::size_t r = 0; r < std::min(k, gains.size()); ++r) {
    total += gains[r] * std::log(2.0) / std::log(static_cast<double>(r) + 2.0);
  }
  return total;
}

// nDCG with an arbitrary gain function and cutoff k.
inline double Ndcg(const std::vector<double>& scores,
                   const std::vector<double>& rels,
                   const std::function<double(double)>& gain,
                   std::size_t k) {
  std::vector<double> ranked, ideal;
  for (std::size_t idx : SelectionRanking(scores)) ranked.push_back(gain(rels[idx]));
  for (double r : rels) ideal.push_back(gain(r));
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double best = DcgOf(ideal, k);
  if (best == 0.0) return 1.0;
  return DcgOf(ranked, k) / best;
}

inline double LinearNdcg(const std::vector<double>& scores,
                         const std::vector<double>& rels) {
  return Ndcg(scores, rels, [](double y) { return y; }, scores.size());
}

inline std::optional<double> AveragePrecision(const std::vector<double>& scores,
                                              const std::vector<double>& rels,
                                              double threshold) {
  const auto order = SelectionRanking(scores);
  double total = 0.0;
  int positives = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (!(rels[order[k]] > threshold)) continue;
    // Precision at k counted from scratch.
    int hits = 0;
    for (std::size_t r = 0; r <= k; ++r) hits += rels[order[r]] > threshold;
    total += static_cast<double>(hits) / static_cast<double>(k + 1);
    ++positives;
  }
  if (positives == 0) return std::nullopt;
  return total / positives;
}

struct Report {
  double ndcg_v2t, ndcg_t2v, map_v2t, map_t2v;
};

inline Report Evaluate(const Matrix& sim, const Matrix& rel, double threshold) {
  auto direction = [threshold](const Matrix& s, const Matrix& r) {
    double ndcg = 0.0, ap = 0.0;
    int ap_count = 0;
    for (std::size_t q = 0; q < s.rows(); ++q) {
      const std::vector<double> sr(s.row(q).begin(), s.row(q).end());
      const std::vector<double> rr(r.row(q).begin(), r.row(q).end());
      ndcg += LinearNdcg(sr, rr);
      if (auto v = AveragePrecision(sr, rr, threshold)) {
        ap += *v;
        ++ap_count;
      }
    }
    return std::pair{ndcg / static_cast<double>(s.rows()),
                     ap_count ? ap / ap_count : 0.0};
  };
  const auto [n1, m1] = direction(sim, rel);
  const auto [n2, m2] = direction(sim.Transposed(), rel.Transposed());
  return {n1, n2, m1, m2};
}

// Triplet loss by enumeration: for each anchor all candidates are scanned
// for the hardest irrelevant one; relevant positives are drawn from a copy of
// the generator in the documented order. Hardest mining only.
inline double TripletLoss(const Matrix& sim, const Matrix& rel, double margin,
                          double threshold, bool use_positives, Rng rng) {
  const std::size_t n = sim.rows();
  double total = 0.0;
  int terms = 0;
  for (int dir = 0; dir < 2; ++dir) {
    auto s = [&](std::size_t a, std::size_t b) { return dir == 0 ? sim(a, b) : sim(b, a); };
    auto r = [&](std::size_t a, std::size_t b) { return dir == 0 ? rel(a, b) : rel(b, a); };
    for (std::size_t i = 0; i < n; ++i) {
      std::optional<std::size_t> hardest;
      std::vector<std::size_t> positives;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        if (r(i, j) < threshold) {
          if (!hardest || s(i, j) > s(i, *hardest)) hardest = j;
        } else {
          positives.push_back(j);
        }
      }
      if (!hardest) continue;
      total += std::max(0.0, margin - s(i, i) + s(i, *hardest));
      ++terms;
      if (use_positives && !positives.empty()) {
        const std::size_t p = positives[rng.Index(positives.size())];
        total += std::max(0.0, margin - s(i, p) + s(i, *hardest));
        ++terms;
      }
    }
  }
  return terms ? total / terms : 0.0;
}

// Central finite difference of f at x along coordinate i.
template <typename F>
double CentralDifference(F&& f, std::vector<double> x, std::size_t i, double h) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double up = f(x);
  x[i] = x0 - h;
  const double down = f(x);
  return (up - down) / (2.0 * h);
}

// |a - b| / max(|a|, |b|, floor): relative error that stays meaningful for
// near-zero derivatives.
inline double RelativeError(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace rankfuse::oracle

#endif  // RANKFUSE_TESTS_ORACLES_H_
