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

#include "rankfuse/checkpoint.h"

#include <limits>

#include "byte_codec.h"
#include "rankfuse/dataio.h"
#include "rankfuse/error.h"

namespace rankfuse {
namespace {

constexpr std::string_view kMagic = "RFMD";

void WriteTower(internal::ByteWriter& w, const Tower& t) {
  for (double v : t.weights.data()) w.F64(v);
  for (double v : t.bias) w.F64(v);
}

Tower ReadTower(internal::ByteReader& r, std::uint64_t input_dim,
                std::uint64_t embed_dim) {
  if (input_dim > std::numeric_limits<std::uint64_t>::max() / embed_dim - 1) {
    throw FormatError(FormatErrorKind::kInconsistent, "checkpoint dims overflow");
  }
  r.NeedItems((input_dim + 1) * embed_dim, 8);
  Tower t;
  t.weights = Matrix(input_dim, embed_dim);
  for (double& v : t.weights.data()) v = r.F64();
  t.bias.resize(embed_dim);
  for (double& v : t.bias) v = r.F64();
  return t;
}

}  // namespace

std::string SerializeCheckpoint(const TwoTowerModel& model) {
  Validate(model);
  internal::ByteWriter w;
  w.Raw(kMagic);
  w.U32(kCheckpointVersion);
  w.U64(model.video.input_dim());
  w.U64(model.text.input_dim());
  w.U64(model.embed_dim());
  WriteTower(w, model.video);
  WriteTower(w, model.text);
  return w.Take();
}

TwoTowerModel ParseCheckpoint(std::string_view bytes) {
  internal::ByteReader r(bytes, "checkpoint");
  r.ExpectMagic(kMagic);
  r.ExpectVersion(kCheckpointVersion);
  const std::uint64_t video_dim = r.U64();
  const std::uint64_t text_dim = r.U64();
  const std::uint64_t embed_dim = r.U64();
  if (video_dim == 0 || text_dim == 0 || embed_dim == 0) {
    throw FormatError(FormatErrorKind::kInconsistent, "checkpoint has a zero dimension");
  }
  TwoTowerModel model;
  model.video = ReadTower(r, video_dim, embed_dim);
  model.text = ReadTower(r, text_dim, embed_dim);
  r.ExpectEnd();
  try {
    Validate(model);
  } catch (const InvalidArgument& e) {
    throw FormatError(FormatErrorKind::kInconsistent, e.what());
  }
  return model;
}

void SaveCheckpoint(const std::filesystem::path& path, const TwoTowerModel& model) {
  WriteFileBytes(path, SerializeCheckpoint(model));
}

TwoTowerModel LoadCheckpoint(const std::filesystem::path& path) {
  return ParseCheckpoint(ReadFileBytes(path));
}

}  // namespace rankfuse
