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

#ifndef RANKFUSE_DATAIO_H_
#define RANKFUSE_DATAIO_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankfuse/matrix.h"
#include "rankfuse/relevance.h"
#include "rankfuse/similarity_matrix.h"

namespace rankfuse {

enum class Split { kTrain, kValidation, kTest };

std::string SplitName(Split split);
// Accepts "train", "validation" and "test".
Split ParseSplit(const std::string& name);

// Annotations and both feature matrices, aligned by row; splits[i] is the
// split of annotations[i].
struct Dataset {
  std::vector<CaptionAnnotation> annotations;
  Matrix video_features;
  Matrix text_features;
  std::vector<Split> splits;

  std::size_t size() const { return annotations.size(); }
  std::vector<std::string> ids() const;
  std::vector<std::size_t> IndicesOf(Split split) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Row alignment, unique ids, annotation invariants.
void Validate(const Dataset& dataset);

// --- Annotations: JSON lines of {"id", "verb_class", "noun_classes"}. ---

// `source` names the input in error messages.
std::vector<CaptionAnnotation> ParseAnnotations(std::istream& in,
                                                const std::string& source);
std::vector<CaptionAnnotation> LoadAnnotations(const std::filesystem::path& path);
void SaveAnnotations(const std::filesystem::path& path,
                     std::span<const CaptionAnnotation> annotations);

// --- Binary matrices. Little-endian throughout:
//   magic[4] | u32 version | u64 rows | u64 cols |
//   rows x (u16 len, utf-8 id) | [cols x (u16 len, id) for RFSM] |
//   rows*cols f32, row-major
// Values are stored as 4-byte floats, so a save/load round trip is exact for
// float-representable matrices. ---

inline constexpr std::uint32_t kFeatureFormatVersion = 1;
inline constexpr std::uint32_t kSimilarityFormatVersion = 1;

struct FeatureMatrix {
  std::vector<std::string> ids;
  Matrix values;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

std::string SerializeFeatures(const FeatureMatrix& features);
FeatureMatrix ParseFeatures(std::string_view bytes);
void SaveFeatures(const std::filesystem::path& path,
                  const FeatureMatrix& features);
FeatureMatrix LoadFeatures(const std::filesystem::path& path);

std::string SerializeSimilarity(const SimilarityMatrix& sim);
SimilarityMatrix ParseSimilarity(std::string_view bytes);
void SaveSimilarity(const std::filesystem::path& path,
                    const SimilarityMatrix& sim);
SimilarityMatrix LoadSimilarity(const std::filesystem::path& path);

// Rounds every entry to the nearest 4-byte float, the precision the binary
// formats keep.
Matrix RoundToFloat(const Matrix& m);

// --- Whole-file helpers. ---

std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);

// --- Dataset directories: annotations.jsonl, video.rfft, text.rfft and
// splits.tsv ("id<TAB>split" per line). ---

void SaveDataset(const std::filesystem::path& dir, const Dataset& dataset);
Dataset LoadDataset(const std::filesystem::path& dir);

// The first ceil(fraction * N) ids of a seeded shuffle, returned in their
// original order. Pure function of its arguments.
std::vector<std::string> SubsetSplit(std::span<const std::string> ids,
                                     double fraction, std::uint64_t seed);

}  // namespace rankfuse

#endif  // RANKFUSE_DATAIO_H_
