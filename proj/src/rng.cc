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

#include "rankfuse/rng.h"

#include <algorithm>

namespace rankfuse {

double Rng::UniformClosed(double lo, double hi) {
  if (lo == hi) return lo;
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  // 53-bit draw scaled so that both endpoints are reachable.
  const double x = lo + (hi - lo) * (u / (1.0 - 0x1.0p-53));
  return std::clamp(x, lo, hi);
}

}  // namespace rankfuse
