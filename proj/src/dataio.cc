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

#include "rankfuse/dataio.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "byte_codec.h"
#include "json.hpp"
#include "rankfuse/error.h"
#include "rankfuse/rng.h"

namespace rankfuse {
namespace {

using internal::ByteReader;
using internal::ByteWriter;

constexpr std::string_view kFeatureMagic = "RFFT";
constexpr std::string_view kSimilarityMagic = "RFSM";

void WriteValues(ByteWriter& w, const Matrix& m) {
  for (double v : m.data()) w.F32(static_cast<float>(v));
}

Matrix ReadValues(ByteReader& r, std::uint64_t rows, std::uint64_t cols) {
  if (cols != 0 && rows > std::numeric_limits<std::uint64_t>::max() / cols) {
    throw FormatError(FormatErrorKind::kInconsistent, "matrix dims overflow");
  }
  r.NeedItems(rows * cols, 4);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = static_cast<double>(r.F32());
  return m;
}

std::vector<std::string> ReadIds(ByteReader& r, std::uint64_t count) {
  r.NeedItems(count, 2);
  std::vector<std::string> ids;
  ids.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) ids.push_back(r.String16());
  return ids;
}

[[noreturn]] void AnnotationError(const std::string& source, std::size_t line,
                                  const std::string& what) {
  throw DataError(source + ":" + std::to_string(line) + ": " + what);
}

CaptionAnnotation ParseAnnotationLine(const std::string& text,
                                      const std::string& source,
                                      std::size_t line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    AnnotationError(source, line, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) AnnotationError(source, line, "expected a JSON object");
  CaptionAnnotation a;
  const auto id = j.find("id");
  if (id == j.end() || !id->is_string()) {
    AnnotationError(source, line, "missing string field 'id'");
  }
  a.id = id->get<std::string>();
  const auto verb = j.find("verb_class");
  if (verb == j.end() || !verb->is_number_integer()) {
    AnnotationError(source, line, "missing integer field 'verb_class'");
  }
  a.verb_class = verb->get<std::int64_t>();
  const auto nouns = j.find("noun_classes");
  if (nouns == j.end() || !nouns->is_array()) {
    AnnotationError(source, line, "missing array field 'noun_classes'");
  }
  if (nouns->empty()) AnnotationError(source, line, "empty noun_classes");
  for (const auto& n : *nouns) {
    if (!n.is_number_integer()) {
      AnnotationError(source, line, "noun_classes must hold integers");
    }
    a.noun_classes.push_back(n.get<std::int64_t>());
  }
  try {
    Validate(a);
  } catch (const InvalidArgument& e) {
    AnnotationError(source, line, e.what());
  }
  return a;
}

}  // namespace

std::string SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValidation:
      return "validation";
    case Split::kTest:
      return "test";
  }
  return "unknown";
}

Split ParseSplit(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "validation") return Split::kValidation;
  if (name == "test") return Split::kTest;
  throw InvalidArgument("unknown split '" + name + "'");
}

std::vector<std::string> Dataset::ids() const {
  std::vector<std::string> out;
  out.reserve(annotations.size());
  for (const auto& a : annotations) out.push_back(a.id);
  return out;
}

std::vector<std::size_t> Dataset::IndicesOf(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == split) out.push_back(i);
  }
  return out;
}

void Validate(const Dataset& dataset) {
  const std::size_t n = dataset.size();
  if (dataset.video_features.rows() != n || dataset.text_features.rows() != n ||
      dataset.splits.size() != n) {
    throw DataError("dataset has " + std::to_string(n) + " annotations but " +
                    std::to_string(dataset.video_features.rows()) +
                    " video rows, " +
                    std::to_string(dataset.text_features.rows()) +
                    " text rows and " + std::to_string(dataset.splits.size()) +
                    " split labels");
  }
  std::unordered_set<std::string> seen;
  for (const auto& a : dataset.annotations) {
    Validate(a);
    if (!seen.insert(a.id).second) throw DataError("duplicate id '" + a.id + "'");
  }
}

std::vector<CaptionAnnotation> ParseAnnotations(std::istream& in,
                                                const std::string& source) {
  std::vector<CaptionAnnotation> out;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    CaptionAnnotation a = ParseAnnotationLine(text, source, line);
    const auto [it, inserted] = first_line.emplace(a.id, line);
    if (!inserted) {
      throw DataError(source + ": duplicate id '" + a.id + "' on lines " +
                      std::to_string(it->second) + " and " +
                      std::to_string(line));
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<CaptionAnnotation> LoadAnnotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return ParseAnnotations(in, path.string());
}

void SaveAnnotations(const std::filesystem::path& path,
                     std::span<const CaptionAnnotation> annotations) {
  std::string out;
  for (const auto& a : annotations) {
    Validate(a);
    nlohmann::json j = {{"id", a.id},
                        {"verb_class", a.verb_class},
                        {"noun_classes", a.noun_classes}};
    out += j.dump();
    out += '\n';
  }
  WriteFileBytes(path, out);
}

std::string SerializeFeatures(const FeatureMatrix& features) {
  if (features.ids.size() != features.values.rows()) {
    throw DataError("feature matrix " + ShapeString(features.values) + " has " +
                    std::to_string(features.ids.size()) + " ids");
  }
  ByteWriter w;
  w.Raw(kFeatureMagic);
  w.U32(kFeatureFormatVersion);
  w.U64(features.values.rows());
  w.U64(features.values.cols());
  for (const auto& id : features.ids) w.String16(id);
  WriteValues(w, features.values);
  return w.Take();
}

FeatureMatrix ParseFeatures(std::string_view bytes) {
  ByteReader r(bytes, "feature file");
  r.ExpectMagic(kFeatureMagic);
  r.ExpectVersion(kFeatureFormatVersion);
  const std::uint64_t rows = r.U64();
  const std::uint64_t cols = r.U64();
  FeatureMatrix out;
  out.ids = ReadIds(r, rows);
  out.values = ReadValues(r, rows, cols);
  r.ExpectEnd();
  return out;
}

void SaveFeatures(const std::filesystem::path& path,
                  const FeatureMatrix& features) {
  WriteFileBytes(path, SerializeFeatures(features));
}

FeatureMatrix LoadFeatures(const std::filesystem::path& path) {
  return ParseFeatures(ReadFileBytes(path));
}

std::string SerializeSimilarity(const SimilarityMatrix& sim) {
  Validate(sim);
  ByteWriter w;
  w.Raw(kSimilarityMagic);
  w.U32(kSimilarityFormatVersion);
  w.U64(sim.rows());
  w.U64(sim.cols());
  for (const auto& id : sim.row_ids) w.String16(id);
  for (const auto& id : sim.col_ids) w.String16(id);
  WriteValues(w, sim.values);
  return w.Take();
}

SimilarityMatrix ParseSimilarity(std::string_view bytes) {
  ByteReader r(bytes, "similarity file");
  r.ExpectMagic(kSimilarityMagic);
  r.ExpectVersion(kSimilarityFormatVersion);
  const std::uint64_t rows = r.U64();
  const std::uint64_t cols = r.U64();
  SimilarityMatrix out;
  out.row_ids = ReadIds(r, rows);
  out.col_ids = ReadIds(r, cols);
  out.values = ReadValues(r, rows, cols);
  r.ExpectEnd();
  try {
    Validate(out);
  } catch (const DataError& e) {
    throw FormatError(FormatErrorKind::kInconsistent, e.what());
  }
  return out;
}

void SaveSimilarity(const std::filesystem::path& path,
                    const SimilarityMatrix& sim) {
  WriteFileBytes(path, SerializeSimilarity(sim));
}

SimilarityMatrix LoadSimilarity(const std::filesystem::path& path) {
  return ParseSimilarity(ReadFileBytes(path));
}

Matrix RoundToFloat(const Matrix& m) {
  Matrix out = m;
  for (double& v : out.data()) v = static_cast<double>(static_cast<float>(v));
  return out;
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return std::move(buffer).str();
}

void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
}

void SaveDataset(const std::filesystem::path& dir, const Dataset& dataset) {
  Validate(dataset);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const auto ids = dataset.ids();
  SaveAnnotations(dir / "annotations.jsonl", dataset.annotations);
  SaveFeatures(dir / "video.rfft", {ids, dataset.video_features});
  SaveFeatures(dir / "text.rfft", {ids, dataset.text_features});
  std::string splits;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    splits += ids[i] + "\t" + SplitName(dataset.splits[i]) + "\n";
  }
  WriteFileBytes(dir / "splits.tsv", splits);
}

Dataset LoadDataset(const std::filesystem::path& dir) {
  Dataset d;
  d.annotations = LoadAnnotations(dir / "annotations.jsonl");
  const auto ids = d.ids();
  FeatureMatrix video = LoadFeatures(dir / "video.rfft");
  FeatureMatrix text = LoadFeatures(dir / "text.rfft");
  CheckIdsAligned(ids, video.ids, "video.rfft");
  CheckIdsAligned(ids, text.ids, "text.rfft");
  d.video_features = std::move(video.values);
  d.text_features = std::move(text.values);

  std::unordered_map<std::string, Split> split_of;
  std::istringstream in(ReadFileBytes(dir / "splits.tsv"));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("splits.tsv:" + std::to_string(line_no) +
                      ": expected 'id<TAB>split'");
    }
    try {
      split_of[line.substr(0, tab)] = ParseSplit(line.substr(tab + 1));
    } catch (const InvalidArgument& e) {
      throw DataError("splits.tsv:" + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (const auto& id : ids) {
    const auto it = split_of.find(id);
    if (it == split_of.end()) throw DataError("no split for id '" + id + "'");
    d.splits.push_back(it->second);
  }
  Validate(d);
  return d;
}

std::vector<std::string> SubsetSplit(std::span<const std::string> ids,
                                     double fraction, std::uint64_t seed) {
  if (ids.empty()) throw InvalidArgument("cannot subset an empty id list");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw InvalidArgument("subset fraction must lie in (0, 1]");
  }
  const std::size_t n = ids.size();
  // A tiny tolerance keeps exact products such as 0.07 * 100 from rounding up.
  const double target = fraction * static_cast<double>(n);
  std::size_t keep = static_cast<std::size_t>(std::ceil(target - 1e-9 * target));
  keep = std::clamp<std::size_t>(keep, 1, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.Index(i + 1)]);
  order.resize(keep);
  std::sort(order.begin(), order.end());

  std::vector<std::string> out;
  out.reserve(keep);
  for (std::size_t idx : order) out.push_back(ids[idx]);
  return out;
}

}  // namespace rankfuse
