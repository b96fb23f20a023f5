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

#ifndef RANKFUSE_NEURALSORT_H_
#define RANKFUSE_NEURALSORT_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rankfuse/matrix.h"

namespace rankfuse {

struct NdcgLossConfig {
  // Relaxation temperature; smaller is closer to a hard sort.
  double temperature = 1.0;
  int sinkhorn_iters = 30;
  double sinkhorn_eps = 1e-6;
  // Only the top `cutoff` soft ranks are scored; nullopt scores the full list.
  std::optional<std::size_t> cutoff;
  // Gain g(y) = gain_base^y - 1.
  double gain_base = 2.0;
};

// Throws InvalidArgument for a non-positive temperature, fewer than one
// Sinkhorn pass, a non-positive tolerance, a zero cutoff or gain_base <= 1.
void Validate(const NdcgLossConfig& cfg);

// Row-stochastic relaxation of the descending-sort permutation matrix.
// Row i (0-based) is the softmax over j of
//   ((n - 1 - 2i) * s_j - sum_k |s_j - s_k|) / temperature.
// Scores enter only through differences to the maximum score, so adding a
// constant to every score leaves the output unchanged whenever the shifted
// scores are themselves exact.
Matrix SoftPermutation(std::span<const double> scores, double temperature);

// Vector-Jacobian product of SoftPermutation: given dL/dP, returns dL/ds.
// |.| has subgradient 0 at exact ties.
std::vector<double> SoftPermutationBackward(std::span<const double> scores,
                                            double temperature,
                                            const Matrix& soft_perm,
                                            const Matrix& grad_soft_perm);

struct SinkhornResult {
  Matrix scaled;
  // Row+column normalization passes actually applied.
  int passes = 0;
  bool converged = false;
};

// Alternating row then column normalization, at most `iters` passes. Before
// each pass the current matrix is tested and iteration stops once every row
// and column sum is within `eps` of 1, so doubly stochastic inputs come back
// untouched. Columns that sum to zero are left as they are. If the cap is
// reached first, one closing row normalization is applied so the result is
// always row-stochastic.
// Throws InvalidArgument for negative entries or an all-zero row.
SinkhornResult SinkhornScale(const Matrix& p, int iters, double eps);

struct NdcgValue {
  double value = 0.0;
  // d value / d scores.
  std::vector<double> grad;
};

// Differentiable nDCG surrogate of one query:
//   value = sum_{j < k} (S * g(y))_j / log2(j + 2) / maxDCG_k
// with S = SinkhornScale(SoftPermutation(scores)). maxDCG_k is the DCG of
// the sorted gains truncated at k; value is 1 (zero gradient) when it is 0.
// The gradient is exact for this computation graph, Sinkhorn passes unrolled.
NdcgValue NeuralNdcg(std::span<const double> scores,
                     std::span<const double> relevances,
                     const NdcgLossConfig& cfg);

struct LossAndGrad {
  double loss = 0.0;
  // d loss / d sim.
  Matrix grad;
  // Number of per-query values or hinge terms the loss averages over.
  std::size_t terms = 0;
};

// Bidirectional loss over a batch: -(mean NeuralNdcg over rows + mean over
// columns) / 2, rows being video queries and columns caption queries. The
// cutoff is clamped to each list's length.
LossAndGrad NeuralNdcgBatchLoss(const Matrix& sim, const Matrix& rel,
                                const NdcgLossConfig& cfg);

}  // namespace rankfuse

#endif  // RANKFUSE_NEURALSORT_H_
