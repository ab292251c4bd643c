// Copyright 2026 The BugBrief Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BUGBRIEF_CHUNKING_H_
#define BUGBRIEF_CHUNKING_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bugbrief/tokenizer.h"

namespace bugbrief {

inline constexpr size_t kDefaultChunkLimit = 1024;

enum class SnapPolicy {
  kNone,  // fixed cuts every `limit` tokens: exactly ceil(n / limit) segments
  kLine,  // pull each cut back to just after a newline token within limit/8
};

std::string_view ToString(SnapPolicy policy);
SnapPolicy ParseSnapPolicy(std::string_view name);

struct Segment {
  size_t start = 0;
  size_t length = 0;

  bool operator==(const Segment&) const = default;
};

// Contiguous, non-overlapping segments covering [0, total_tokens), each
// 1..limit tokens long.
struct ChunkPlan {
  size_t total_tokens = 0;
  size_t limit = kDefaultChunkLimit;
  std::vector<Segment> segments;

  size_t size() const { return segments.size(); }
};

// Throws Error("invalid_chunk_limit") when limit == 0.
ChunkPlan PlanChunks(std::span<const std::string> code_tokens, size_t limit,
                     SnapPolicy snap = SnapPolicy::kNone);

// Throws Error("segment_out_of_range"), or Error("plan_mismatch") when the
// plan was built for a different length.
std::span<const std::string> Slice(std::span<const std::string> code_tokens,
                                   const ChunkPlan& plan, size_t index);

}  // namespace bugbrief

#endif  // BUGBRIEF_CHUNKING_H_
