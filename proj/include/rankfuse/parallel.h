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

#ifndef RANKFUSE_PARALLEL_H_
#define RANKFUSE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace rankfuse {

// Thread count for parallel kernels: RANKFUSE_THREADS when set to a positive
// integer, otherwise the hardware concurrency (at least 1).
int DefaultThreadCount();

// Runs body(i) for i in [0, n) over `threads` workers with static striping.
// Bodies must write only to slot i of their output so that results do not
// depend on the thread count. The first exception thrown is rethrown.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& body,
                 int threads = DefaultThreadCount());

}  // namespace rankfuse

#endif  // RANKFUSE_PARALLEL_H_
