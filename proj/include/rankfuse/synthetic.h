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

#ifndef RANKFUSE_SYNTHETIC_H_
#define RANKFUSE_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rankfuse/dataio.h"

namespace rankfuse {

// Clustered toy retrieval data. Every cluster owns one annotation (verb and
// noun set), so relevance is exactly 1 inside a cluster; features of each
// modality are a fixed random linear image of the cluster prototype plus
// Gaussian noise.
struct SyntheticSpec {
  std::size_t n_items = 400;
  std::size_t n_verb_classes = 20;
  std::size_t n_noun_classes = 40;
  std::size_t nouns_per_caption = 2;
  std::size_t n_clusters = 8;
  std::size_t video_dim = 32;
  std::size_t text_dim = 24;
  std::size_t latent_dim = 16;
  double noise_sigma = 0.05;
  std::uint64_t seed = 0;
};

void Validate(const SyntheticSpec& spec);

struct SyntheticDataset {
  Dataset dataset;
  // cluster_of[i] is the cluster of dataset item i.
  std::vector<std::size_t> cluster_of;
};

// Deterministic per seed. Items are assigned to clusters round-robin, ids
// are "clip_00000", ... and splits are 70/15/15 over a seeded shuffle.
// Feature values are rounded to 4-byte floats so saved datasets reload
// bit-identically.
SyntheticDataset GenerateSynthetic(const SyntheticSpec& spec);

}  // namespace rankfuse

#endif  // RANKFUSE_SYNTHETIC_H_
