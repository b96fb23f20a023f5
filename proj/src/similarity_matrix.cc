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

#include "rankfuse/similarity_matrix.h"

#include <cmath>
#include <unordered_set>

#include "rankfuse/error.h"

namespace rankfuse {
namespace {

void CheckUnique(const std::vector<std::string>& ids, const char* axis) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw DataError(std::string("duplicate ") + axis + " id '" + id + "'");
    }
  }
}

}  // namespace

void Validate(const SimilarityMatrix& sim) {
  if (sim.row_ids.size() != sim.values.rows() ||
      sim.col_ids.size() != sim.values.cols()) {
    throw DataError("similarity matrix " + ShapeString(sim.values) + " has " +
                    std::to_string(sim.row_ids.size()) + " row ids and " +
                    std::to_string(sim.col_ids.size()) + " column ids");
  }
  CheckUnique(sim.row_ids, "row");
  CheckUnique(sim.col_ids, "column");
  for (double v : sim.values.data()) {
    if (!std::isfinite(v)) throw DataError("non-finite similarity value");
  }
}

void CheckIdsAligned(const std::vector<std::string>& expected,
                     const std::vector<std::string>& actual,
                     const std::string& what) {
  if (expected.size() != actual.size()) {
    throw DataError(what + ": expected " + std::to_string(expected.size()) +
                    " ids, got " + std::to_string(actual.size()));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected[i] != actual[i]) {
      throw DataError(what + ": first mismatched id at position " +
                      std::to_string(i) + " ('" + expected[i] + "' vs '" +
                      actual[i] + "')");
    }
  }
}

}  // namespace rankfuse
