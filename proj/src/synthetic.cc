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

#include "rankfuse/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <utility>

#include "rankfuse/error.h"
#include "rankfuse/rng.h"

namespace rankfuse {
namespace {

// min(C(n, k), cap) without overflow.
std::size_t BinomialCapped(std::size_t n, std::size_t k, std::size_t cap) {
  k = std::min(k, n - k);
  double value = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    value = value * static_cast<double>(n - k + i) / static_cast<double>(i);
    if (value >= static_cast<double>(cap)) return cap;
  }
  return static_cast<std::size_t>(std::llround(value));
}

std::vector<std::int64_t> SampleNouns(const SyntheticSpec& spec, Rng& rng) {
  std::vector<std::int64_t> pool(spec.n_noun_classes);
  std::iota(pool.begin(), pool.end(), std::int64_t{0});
  for (std::size_t i = 0; i < spec.nouns_per_caption; ++i) {
    std::swap(pool[i], pool[i + rng.Index(pool.size() - i)]);
  }
  pool.resize(spec.nouns_per_caption);
  std::sort(pool.begin(), pool.end());
  return pool;
}

Matrix GaussianMatrix(std::size_t rows, std::size_t cols, double scale, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = scale * rng.Normal();
  return m;
}

}  // namespace

void Validate(const SyntheticSpec& spec) {
  if (spec.n_items == 0 || spec.n_verb_classes == 0 ||
      spec.n_noun_classes == 0 || spec.nouns_per_caption == 0 ||
      spec.n_clusters == 0 || spec.video_dim == 0 || spec.text_dim == 0 ||
      spec.latent_dim == 0) {
    throw InvalidArgument("synthetic spec counts must all be at least 1");
  }
  if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
    throw InvalidArgument("noise_sigma must be non-negative");
  }
  if (spec.nouns_per_caption > spec.n_noun_classes) {
    throw InvalidArgument("nouns_per_caption exceeds n_noun_classes");
  }
  const std::size_t noun_sets = BinomialCapped(
      spec.n_noun_classes, spec.nouns_per_caption, spec.n_clusters);
  const double combos = static_cast<double>(noun_sets) *
                        static_cast<double>(spec.n_verb_classes);
  if (combos < static_cast<double>(spec.n_clusters)) {
    throw InvalidArgument("not enough distinct verb/noun combinations for " +
                          std::to_string(spec.n_clusters) + " clusters");
  }
}

SyntheticDataset GenerateSynthetic(const SyntheticSpec& spec) {
  Validate(spec);
  Rng rng(spec.seed);

  // Distinct verbs per cluster while they last, then distinct (verb, nouns).
  std::vector<std::int64_t> verbs(spec.n_verb_classes);
  std::iota(verbs.begin(), verbs.end(), std::int64_t{0});
  for (std::size_t i = verbs.size() - 1; i > 0; --i) {
    std::swap(verbs[i], verbs[rng.Index(i + 1)]);
  }
  std::set<std::pair<std::int64_t, std::vector<std::int64_t>>> used;
  std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> cluster_labels;
  for (std::size_t c = 0; c < spec.n_clusters; ++c) {
    for (;;) {
      const std::int64_t verb = c < verbs.size()
                                    ? verbs[c]
                                    : static_cast<std::int64_t>(
                                          rng.Index(spec.n_verb_classes));
      auto label = std::make_pair(verb, SampleNouns(spec, rng));
      if (used.insert(label).second) {
        cluster_labels.push_back(std::move(label));
        break;
      }
    }
  }

  const double inv_sqrt_latent = 1.0 / std::sqrt(static_cast<double>(spec.latent_dim));
  const Matrix prototypes = GaussianMatrix(spec.n_clusters, spec.latent_dim, 1.0, rng);
  const Matrix video_map = GaussianMatrix(spec.video_dim, spec.latent_dim,
                                          inv_sqrt_latent, rng);
  const Matrix text_map = GaussianMatrix(spec.text_dim, spec.latent_dim,
                                         inv_sqrt_latent, rng);

  auto project = [&](const Matrix& map, std::size_t cluster, std::span<double> out) {
    for (std::size_t d = 0; d < map.rows(); ++d) {
      double v = 0.0;
      for (std::size_t l = 0; l < spec.latent_dim; ++l) {
        v += map(d, l) * prototypes(cluster, l);
      }
      out[d] = v;
    }
  };

  SyntheticDataset out;
  Dataset& d = out.dataset;
  d.video_features = Matrix(spec.n_items, spec.video_dim);
  d.text_features = Matrix(spec.n_items, spec.text_dim);
  for (std::size_t i = 0; i < spec.n_items; ++i) {
    const std::size_t c = i % spec.n_clusters;
    out.cluster_of.push_back(c);
    char id[32];
    std::snprintf(id, sizeof(id), "clip_%05zu", i);
    d.annotations.push_back({id, cluster_labels[c].first, cluster_labels[c].second});
    project(video_map, c, d.video_features.row(i));
    project(text_map, c, d.text_features.row(i));
    for (double& v : d.video_features.row(i)) v += spec.noise_sigma * rng.Normal();
    for (double& v : d.text_features.row(i)) v += spec.noise_sigma * rng.Normal();
  }
  d.video_features = RoundToFloat(d.video_features);
  d.text_features = RoundToFloat(d.text_features);

  std::vector<std::size_t> order(spec.n_items);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng.Index(i + 1)]);
  }
  const std::size_t n_train = spec.n_items * 70 / 100;
  const std::size_t n_val = spec.n_items * 15 / 100;
  d.splits.assign(spec.n_items, Split::kTest);
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (r < n_train) {
      d.splits[order[r]] = Split::kTrain;
    } else if (r < n_train + n_val) {
      d.splits[order[r]] = Split::kValidation;
    }
  }
  return out;
}

}  // namespace rankfuse
