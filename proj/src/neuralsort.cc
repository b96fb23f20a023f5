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

#include "rankfuse/neuralsort.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rankfuse/error.h"
#include "rankfuse/parallel.h"

namespace rankfuse {
namespace {

double Sign(double x) { return (x > 0.0) - (x < 0.0); }

// Worst deviation of any row or column sum from 1.
double DoublyStochasticResidual(const Matrix& m) {
  double worst = 0.0;
  std::vector<double> col_sums(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      row_sum += m(i, j);
      col_sums[j] += m(i, j);
    }
    worst = std::max(worst, std::abs(row_sum - 1.0));
  }
  for (double c : col_sums) worst = std::max(worst, std::abs(c - 1.0));
  return worst;
}

// Forward Sinkhorn that keeps every intermediate needed by the backward pass.
struct SinkhornTape {
  struct Pass {
    std::vector<double> row_sums;
    Matrix after_rows;
    std::vector<double> col_sums;  // 0 marks a column left unscaled
    Matrix after_cols;
  };
  std::vector<Pass> passes;
  bool converged = false;

  const Matrix& Output(const Matrix& input) const {
    return passes.empty() ? input : passes.back().after_cols;
  }
};

SinkhornTape RunSinkhorn(const Matrix& p, int iters, double eps) {
  if (p.rows() != p.cols()) {
    throw InvalidArgument("Sinkhorn scaling needs a square matrix, got " +
                          ShapeString(p));
  }
  const std::size_t n = p.rows();
  for (std::size_t i = 0; i < n; ++i) {
    bool any = false;
    for (double v : p.row(i)) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InvalidArgument("Sinkhorn input must be finite and non-negative");
      }
      any = any || v > 0.0;
    }
    if (!any) {
      throw InvalidArgument("Sinkhorn input has an all-zero row " +
                            std::to_string(i));
    }
  }

  SinkhornTape tape;
  const Matrix* current = &p;
  for (int pass = 0; pass < iters; ++pass) {
    if (DoublyStochasticResidual(*current) <= eps) {
      tape.converged = true;
      break;
    }
    SinkhornTape::Pass step;
    step.after_rows = *current;
    step.row_sums.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = step.after_rows.row(i);
      double sum = 0.0;
      for (double v : row) sum += v;
      step.row_sums[i] = sum;
      for (double& v : row) v /= sum;
    }
    step.after_cols = step.after_rows;
    step.col_sums.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        step.col_sums[j] += step.after_cols(i, j);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (step.col_sums[j] > 0.0) step.after_cols(i, j) /= step.col_sums[j];
    tape.passes.push_back(std::move(step));
    current = &tape.passes.back().after_cols;
  }
  if (!tape.converged) {
    tape.converged = DoublyStochasticResidual(*current) <= eps;
  }
  if (!tape.converged) {
    // Closing row step so the output stays row-stochastic when the pass cap
    // is hit. Zero column sums leave the column step as a no-op.
    SinkhornTape::Pass step;
    step.after_rows = *current;
    step.row_sums.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = step.after_rows.row(i);
      double sum = 0.0;
      for (double v : row) sum += v;
      step.row_sums[i] = sum;
      for (double& v : row) v /= sum;
    }
    step.col_sums.assign(n, 0.0);
    step.after_cols = step.after_rows;
    tape.passes.push_back(std::move(step));
  }
  return tape;
}

// Pulls dL/d(output) back to dL/d(input) through the recorded passes.
Matrix SinkhornBackward(const SinkhornTape& tape, Matrix grad) {
  const std::size_t n = grad.rows();
  for (auto it = tape.passes.rbegin(); it != tape.passes.rend(); ++it) {
    // Column step: out_ij = in_ij / c_j.
    for (std::size_t j = 0; j < n; ++j) {
      const double c = it->col_sums[j];
      if (c <= 0.0) continue;
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += grad(i, j) * it->after_cols(i, j);
      for (std::size_t i = 0; i < n; ++i) grad(i, j) = (grad(i, j) - dot) / c;
    }
    // Row step: out_ij = in_ij / r_i.
    for (std::size_t i = 0; i < n; ++i) {
      const double r = it->row_sums[i];
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += grad(i, j) * it->after_rows(i, j);
      for (std::size_t j = 0; j < n; ++j) grad(i, j) = (grad(i, j) - dot) / r;
    }
  }
  return grad;
}

std::vector<double> DiscountedPrefix(std::size_t n, std::size_t k) {
  std::vector<double> discount(n, 0.0);
  for (std::size_t j = 0; j < std::min(n, k); ++j) {
    discount[j] = 1.0 / std::log2(static_cast<double>(j) + 2.0);
  }
  return discount;
}

}  // namespace

void Validate(const NdcgLossConfig& cfg) {
  if (!(cfg.temperature > 0.0) || !std::isfinite(cfg.temperature)) {
    throw InvalidArgument("temperature must be positive");
  }
  if (cfg.sinkhorn_iters < 1) {
    throw InvalidArgument("sinkhorn_iters must be at least 1");
  }
  if (!(cfg.sinkhorn_eps > 0.0)) {
    throw InvalidArgument("sinkhorn_eps must be positive");
  }
  if (cfg.cutoff && *cfg.cutoff == 0) {
    throw InvalidArgument("cutoff must be positive");
  }
  if (!(cfg.gain_base > 1.0) || !std::isfinite(cfg.gain_base)) {
    throw InvalidArgument("gain_base must be greater than 1");
  }
}

Matrix SoftPermutation(std::span<const double> scores, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidArgument("temperature must be positive");
  }
  if (scores.empty()) throw InvalidArgument("soft permutation of empty list");
  for (double s : scores) {
    if (!std::isfinite(s)) throw InvalidArgument("non-finite score");
  }
  const std::size_t n = scores.size();
  const double top = *std::max_element(scores.begin(), scores.end());

  std::vector<double> centered(n), abs_sums(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    centered[j] = scores[j] - top;
    for (std::size_t k = 0; k < n; ++k) {
      abs_sums[j] += std::abs(scores[j] - scores[k]);
    }
  }

  Matrix p(n, n);
  std::vector<double> logits(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double coeff = static_cast<double>(n) - 1.0 - 2.0 * static_cast<double>(i);
    for (std::size_t j = 0; j < n; ++j) {
      logits[j] = (coeff * centered[j] - abs_sums[j]) / temperature;
    }
    const double peak = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    auto row = p.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = std::exp(logits[j] - peak);
      total += row[j];
    }
    for (double& v : row) v /= total;
  }
  return p;
}

std::vector<double> SoftPermutationBackward(std::span<const double> scores,
                                            double temperature,
                                            const Matrix& soft_perm,
                                            const Matrix& grad_soft_perm) {
  const std::size_t n = scores.size();
  if (soft_perm.rows() != n || soft_perm.cols() != n ||
      !soft_perm.SameShape(grad_soft_perm)) {
    throw InvalidArgument("soft permutation backward shape mismatch");
  }
  // Softmax backward: dz_ij = P_ij (G_ij - sum_l G_il P_il).
  Matrix dz(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j < n; ++j) dot += grad_soft_perm(i, j) * soft_perm(i, j);
    for (std::size_t j = 0; j < n; ++j) {
      dz(i, j) = soft_perm(i, j) * (grad_soft_perm(i, j) - dot);
    }
  }
  // z_ij = ((n-1-2i) s_j - sum_k |s_j - s_k|) / t, so
  // dz_ij/ds_l = ((n-1-2i) [j=l] - [j=l] sum_k sgn(s_j-s_k) + sgn(s_j-s_l)) / t.
  std::vector<double> col_total(n, 0.0), weighted(n, 0.0), sign_sums(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double coeff = static_cast<double>(n) - 1.0 - 2.0 * static_cast<double>(i);
    for (std::size_t j = 0; j < n; ++j) {
      col_total[j] += dz(i, j);
      weighted[j] += coeff * dz(i, j);
    }
  }
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t k = 0; k < n; ++k) sign_sums[l] += Sign(scores[l] - scores[k]);

  std::vector<double> grad(n);
  for (std::size_t l = 0; l < n; ++l) {
    double cross = 0.0;
    for (std::size_t j = 0; j < n; ++j) cross += col_total[j] * Sign(scores[j] - scores[l]);
    grad[l] = (weighted[l] - col_total[l] * sign_sums[l] + cross) / temperature;
  }
  return grad;
}

SinkhornResult SinkhornScale(const Matrix& p, int iters, double eps) {
  if (iters < 1) throw InvalidArgument("Sinkhorn needs at least one pass");
  SinkhornTape tape = RunSinkhorn(p, iters, eps);
  SinkhornResult result;
  result.passes = std::min(static_cast<int>(tape.passes.size()), iters);
  result.converged = tape.converged;
  result.scaled = tape.Output(p);
  return result;
}

NdcgValue NeuralNdcg(std::span<const double> scores,
                     std::span<const double> relevances,
                     const NdcgLossConfig& cfg) {
  Validate(cfg);
  if (scores.size() != relevances.size()) {
    throw InvalidArgument("score/relevance length mismatch: " +
                          std::to_string(scores.size()) + " vs " +
                          std::to_string(relevances.size()));
  }
  const std::size_t n = scores.size();
  if (n == 0) throw InvalidArgument("NeuralNDCG of empty list");
  if (cfg.cutoff && *cfg.cutoff > n) {
    throw InvalidArgument("cutoff exceeds list length");
  }
  const std::size_t k = cfg.cutoff.value_or(n);

  std::vector<double> gains(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!(relevances[j] >= 0.0 && relevances[j] <= 1.0)) {
      throw InvalidArgument("relevance outside [0, 1]");
    }
    gains[j] = std::pow(cfg.gain_base, relevances[j]) - 1.0;
  }
  const std::vector<double> discount = DiscountedPrefix(n, k);

  std::vector<double> ideal = gains;
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double max_dcg = 0.0;
  for (std::size_t j = 0; j < k; ++j) max_dcg += ideal[j] * discount[j];

  NdcgValue out;
  out.grad.assign(n, 0.0);
  if (max_dcg == 0.0) {
    out.value = 1.0;
    return out;
  }

  const Matrix perm = SoftPermutation(scores, cfg.temperature);
  const SinkhornTape tape = RunSinkhorn(perm, cfg.sinkhorn_iters, cfg.sinkhorn_eps);
  const Matrix& scaled = tape.Output(perm);

  double dcg = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double soft_gain = 0.0;
    for (std::size_t l = 0; l < n; ++l) soft_gain += scaled(j, l) * gains[l];
    dcg += soft_gain * discount[j];
  }
  out.value = dcg / max_dcg;

  Matrix grad_scaled(n, n);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t l = 0; l < n; ++l)
      grad_scaled(j, l) = discount[j] * gains[l] / max_dcg;
  const Matrix grad_perm = SinkhornBackward(tape, std::move(grad_scaled));
  out.grad = SoftPermutationBackward(scores, cfg.temperature, perm, grad_perm);
  return out;
}

LossAndGrad NeuralNdcgBatchLoss(const Matrix& sim, const Matrix& rel,
                                const NdcgLossConfig& cfg) {
  Validate(cfg);
  if (!sim.SameShape(rel)) {
    throw InvalidArgument("similarity " + ShapeString(sim) + " and relevance " +
                          ShapeString(rel) + " shapes differ");
  }
  if (sim.empty()) throw InvalidArgument("empty batch");
  const std::size_t rows = sim.rows(), cols = sim.cols();

  auto clamp_cfg = [&cfg](std::size_t len) {
    NdcgLossConfig c = cfg;
    if (c.cutoff) c.cutoff = std::min(*c.cutoff, len);
    return c;
  };
  const NdcgLossConfig row_cfg = clamp_cfg(cols);
  const NdcgLossConfig col_cfg = clamp_cfg(rows);
  const Matrix sim_t = sim.Transposed();
  const Matrix rel_t = rel.Transposed();

  std::vector<NdcgValue> by_row(rows), by_col(cols);
  ParallelFor(rows + cols, [&](std::size_t q) {
    if (q < rows) {
      by_row[q] = NeuralNdcg(sim.row(q), rel.row(q), row_cfg);
    } else {
      const std::size_t c = q - rows;
      by_col[c] = NeuralNdcg(sim_t.row(c), rel_t.row(c), col_cfg);
    }
  });

  LossAndGrad out;
  out.grad = Matrix(rows, cols);
  const double row_weight = -0.5 / static_cast<double>(rows);
  const double col_weight = -0.5 / static_cast<double>(cols);
  double row_sum = 0.0, col_sum = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    row_sum += by_row[i].value;
    for (std::size_t j = 0; j < cols; ++j) out.grad(i, j) += row_weight * by_row[i].grad[j];
  }
  for (std::size_t j = 0; j < cols; ++j) {
    col_sum += by_col[j].value;
    for (std::size_t i = 0; i < rows; ++i) out.grad(i, j) += col_weight * by_col[j].grad[i];
  }
  out.loss = row_weight * row_sum + col_weight * col_sum;
  out.terms = rows + cols;
  return out;
}

}  // namespace rankfuse
