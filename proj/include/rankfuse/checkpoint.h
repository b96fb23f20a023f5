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

#ifndef RANKFUSE_CHECKPOINT_H_
#define RANKFUSE_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "rankfuse/model.h"

namespace rankfuse {

// "RFMD" | u32 version | u64 D_v | u64 D_t | u64 E | f64 values, row-major
// little-endian: video weights, video bias, text weights, text bias.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string SerializeCheckpoint(const TwoTowerModel& model);
TwoTowerModel ParseCheckpoint(std::string_view bytes);
void SaveCheckpoint(const std::filesystem::path& path, const TwoTowerModel& model);
TwoTowerModel LoadCheckpoint(const std::filesystem::path& path);

}  // namespace rankfuse

#endif  // RANKFUSE_CHECKPOINT_H_
