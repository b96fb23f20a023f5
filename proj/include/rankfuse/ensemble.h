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

#ifndef RANKFUSE_ENSEMBLE_H_
#define RANKFUSE_ENSEMBLE_H_

#include <span>

#include "rankfuse/similarity_matrix.h"

namespace rankfuse {

// Late fusion: entry-wise arithmetic mean of similarity matrices that share
// shape and identically ordered ids. Each entry's inputs are summed in
// ascending value order, which makes the result independent of the order of
// `matrices`; the mean is clamped into [min, max] of its inputs.
// Throws DataError on an empty input or any shape/id mismatch (naming the
// first mismatched id).
SimilarityMatrix MeanSimilarity(std::span<const SimilarityMatrix> matrices);

}  // namespace rankfuse

#endif  // RANKFUSE_ENSEMBLE_H_
