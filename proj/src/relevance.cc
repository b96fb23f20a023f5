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

#include "rankfuse/relevance.h"

#include <algorithm>

#include "rankfuse/error.h"
#include "rankfuse/parallel.h"

namespace rankfuse {
namespace {

std::vector<std::int64_t> SortedNouns(const CaptionAnnotation& a) {
  std::vector<std::int64_t> nouns = a.noun_classes;
  std::sort(nouns.begin(), nouns.end());
  return nouns;
}

// Both inputs sorted ascending without duplicates.
double SortedSetIou(std::span<const std::int64_t> a,
                    std::span<const std::int64_t> b) {
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  const std::size_t united = a.size() + b.size() - common;
  if (united == 0) return 0.0;
  return static_cast<double>(common) / static_cast<double>(united);
}

double RelevanceOfSorted(std::int64_t verb_a, std::span<const std::int64_t> a,
                         std::int64_t verb_b,
                         std::span<const std::int64_t> b) {
  const double verb_iou = verb_a == verb_b ? 1.0 : 0.0;
  return 0.5 * (verb_iou + SortedSetIou(a, b));
}

}  // namespace

void Validate(const CaptionAnnotation& annotation) {
  if (annotation.verb_class < 0) {
    throw InvalidArgument("annotation '" + annotation.id +
                          "': negative verb class");
  }
  if (annotation.noun_classes.empty()) {
    throw InvalidArgument("annotation '" + annotation.id +
                          "': empty noun class list");
  }
  const auto nouns = SortedNouns(annotation);
  if (nouns.front() < 0) {
    throw InvalidArgument("annotation '" + annotation.id +
                          "': negative noun class");
  }
  if (std::adjacent_find(nouns.begin(), nouns.end()) != nouns.end()) {
    throw InvalidArgument("annotation '" + annotation.id +
                          "': duplicate noun class");
  }
}

double PairRelevance(const CaptionAnnotation& a, const CaptionAnnotation& b) {
  const auto na = SortedNouns(a);
  const auto nb = SortedNouns(b);
  return RelevanceOfSorted(a.verb_class, na, b.verb_class, nb);
}

RelevanceMatrix ComputeRelevanceMatrix(
    std::span<const CaptionAnnotation> queries,
    std::span<const CaptionAnnotation> gallery) {
  if (queries.empty() || gallery.empty()) {
    throw DataError("relevance matrix needs non-empty query and gallery sets");
  }
  std::vector<std::vector<std::int64_t>> query_nouns, gallery_nouns;
  query_nouns.reserve(queries.size());
  gallery_nouns.reserve(gallery.size());
  for (const auto& q : queries) query_nouns.push_back(SortedNouns(q));
  for (const auto& g : gallery) gallery_nouns.push_back(SortedNouns(g));

  RelevanceMatrix rel;
  rel.values = Matrix(queries.size(), gallery.size());
  for (const auto& q : queries) rel.row_ids.push_back(q.id);
  for (const auto& g : gallery) rel.col_ids.push_back(g.id);

  ParallelFor(queries.size(), [&](std::size_t i) {
    auto row = rel.values.row(i);
    for (std::size_t j = 0; j < gallery.size(); ++j) {
      row[j] = RelevanceOfSorted(queries[i].verb_class, query_nouns[i],
                                 gallery[j].verb_class, gallery_nouns[j]);
    }
  });
  return rel;
}

}  // namespace rankfuse
