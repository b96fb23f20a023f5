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

#ifndef RANKFUSE_RELEVANCE_H_
#define RANKFUSE_RELEVANCE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rankfuse/matrix.h"

namespace rankfuse {

// Pre-classed caption: one verb class and a non-empty set of noun classes.
struct CaptionAnnotation {
  std::string id;
  std::int64_t verb_class = 0;
  std::vector<std::int64_t> noun_classes;

  friend bool operator==(const CaptionAnnotation&,
                         const CaptionAnnotation&) = default;
};

// Throws InvalidArgument on negative classes, an empty noun list or a repeated
// noun class.
void Validate(const CaptionAnnotation& annotation);

// Query-by-gallery relevance values in [0, 1].
struct RelevanceMatrix {
  Matrix values;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;

  std::size_t rows() const { return values.rows(); }
  std::size_t cols() const { return values.cols(); }
};

// Semantic relevance: the mean of the verb IoU (verbs are singleton sets, so
// this is 0 or 1) and the IoU of the noun class sets. Symmetric; exactly 1 for
// identical verb and noun set, exactly 0 when both the verbs and the nouns
// are disjoint. Noun lists may be in any order.
double PairRelevance(const CaptionAnnotation& a, const CaptionAnnotation& b);

// values(i, j) = PairRelevance(queries[i], gallery[j]). Rows are computed in
// parallel; the result does not depend on the thread count.
// Throws DataError when either side is empty.
RelevanceMatrix ComputeRelevanceMatrix(
    std::span<const CaptionAnnotation> queries,
    std::span<const CaptionAnnotation> gallery);

// Relevance among the given annotations and themselves (square, symmetric,
// unit diagonal).
inline RelevanceMatrix ComputeRelevanceMatrix(
    std::span<const CaptionAnnotation> items) {
  return ComputeRelevanceMatrix(items, items);
}

}  // namespace rankfuse

#endif  // RANKFUSE_RELEVANCE_H_
