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

#include "rankfuse/ensemble.h"

#include <algorithm>
#include <vector>

#include "rankfuse/error.h"

namespace rankfuse {

SimilarityMatrix MeanSimilarity(std::span<const SimilarityMatrix> matrices) {
  if (matrices.empty()) throw DataError("ensemble needs at least one matrix");
  const SimilarityMatrix& first = matrices.front();
  Validate(first);
  for (std::size_t m = 1; m < matrices.size(); ++m) {
    const SimilarityMatrix& other = matrices[m];
    if (!other.values.SameShape(first.values)) {
      throw DataError("matrix " + std::to_string(m) + " is " +
                      ShapeString(other.values) + ", expected " +
                      ShapeString(first.values));
    }
    CheckIdsAligned(first.row_ids, other.row_ids,
                    "matrix " + std::to_string(m) + " row ids");
    CheckIdsAligned(first.col_ids, other.col_ids,
                    "matrix " + std::to_string(m) + " column ids");
    Validate(other);
  }
  if (matrices.size() == 1) return first;

  SimilarityMatrix out = first;
  const double count = static_cast<double>(matrices.size());
  std::vector<double> cell(matrices.size());
  auto values = out.values.data();
  for (std::size_t e = 0; e < values.size(); ++e) {
    for (std::size_t m = 0; m < matrices.size(); ++m) {
      cell[m] = matrices[m].values.data()[e];
    }
    std::sort(cell.begin(), cell.end());
    double sum = 0.0;
    for (double v : cell) sum += v;
    values[e] = std::clamp(sum / count, cell.front(), cell.back());
  }
  return out;
}

}  // namespace rankfuse
