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

#ifndef RANKFUSE_SIMILARITY_MATRIX_H_
#define RANKFUSE_SIMILARITY_MATRIX_H_

#include <string>
#include <vector>

#include "rankfuse/matrix.h"

namespace rankfuse {

// Model scores for every (video, caption) pair: rows are videos, columns are
// captions. Also the unit that ensembles average.
struct SimilarityMatrix {
  Matrix values;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;

  std::size_t rows() const { return values.rows(); }
  std::size_t cols() const { return values.cols(); }

  friend bool operator==(const SimilarityMatrix&,
                         const SimilarityMatrix&) = default;
};

// Throws DataError unless id vectors match the value shape, ids are unique
// per axis and every entry is finite.
void Validate(const SimilarityMatrix& sim);

// Throws DataError if the two id vectors differ; the message names the first
// mismatching position and both ids.
void CheckIdsAligned(const std::vector<std::string>& expected,
                     const std::vector<std::string>& actual,
                     const std::string& what);

}  // namespace rankfuse

#endif  // RANKFUSE_SIMILARITY_MATRIX_H_
