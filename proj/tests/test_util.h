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

#ifndef RANKFUSE_TESTS_TEST_UTIL_H_
#define RANKFUSE_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rankfuse/matrix.h"
#include "rankfuse/relevance.h"
#include "rankfuse/rng.h"

namespace rankfuse::testing {

// Small class vocabularies so that random annotations collide often.
inline CaptionAnnotation RandomAnnotation(Rng& rng, const std::string& id,
                                          int verbs = 4, int nouns = 6) {
  CaptionAnnotation a;
  a.id = id;
  a.verb_class = static_cast<std::int64_t>(rng.Index(verbs));
  const std::size_t count = 1 + rng.Index(3);
  while (a.noun_classes.size() < count) {
    const auto n = static_cast<std::int64_t>(rng.Index(nouns));
    if (std::find(a.noun_classes.begin(), a.noun_classes.end(), n) ==
        a.noun_classes.end()) {
      a.noun_classes.push_back(n);
    }
  }
  return a;
}

inline std::vector<CaptionAnnotation> RandomAnnotations(Rng& rng, std::size_t n,
                                                        int verbs = 4,
                                                        int nouns = 6) {
  std::vector<CaptionAnnotation> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(RandomAnnotation(rng, "a" + std::to_string(i), verbs, nouns));
  }
  return out;
}

inline Matrix RandomMatrix(Rng& rng, std::size_t rows, std::size_t cols,
                           double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.Uniform(lo, hi);
  return m;
}

inline std::vector<std::string> Ids(const std::string& prefix, std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
  return ids;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path TempDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("rankfuse_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace rankfuse::testing

#endif  // RANKFUSE_TESTS_TEST_UTIL_H_
