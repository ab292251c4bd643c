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

#include "bugbrief/chunking.h"

#include <algorithm>

#include "bugbrief/error.h"

namespace bugbrief {

std::string_view ToString(SnapPolicy policy) {
  return policy == SnapPolicy::kNone ? "none" : "line";
}

SnapPolicy ParseSnapPolicy(std::string_view name) {
  if (name == "none") return SnapPolicy::kNone;
  if (name == "line") return SnapPolicy::kLine;
  throw UsageError("unknown_snap_policy", std::string(name));
}

ChunkPlan PlanChunks(std::span<const std::string> code_tokens, size_t limit, SnapPolicy snap) {
  if (limit == 0) throw Error("invalid_chunk_limit", "limit must be >= 1");
  ChunkPlan plan;
  plan.total_tokens = code_tokens.size();
  plan.limit = limit;
  const size_t window = snap == SnapPolicy::kLine ? limit / 8 : 0;

  size_t start = 0;
  while (start < plan.total_tokens) {
    size_t cut = std::min(start + limit, plan.total_tokens);
    if (window > 0 && cut < plan.total_tokens) {
      // Latest newline in [cut - window, cut); the newline stays with the
      // earlier segment. Never search at or before `start`.
      const size_t lowest = std::max(start + 1, cut - window);
      for (size_t i = cut; i-- > lowest;) {
        if (code_tokens[i] == kNewlineToken) {
          cut = i + 1;
          break;
        }
      }
    }
    plan.segments.push_back({start, cut - start});
    start = cut;
  }
  return plan;
}

std::span<const std::string> Slice(std::span<const std::string> code_tokens, const ChunkPlan& plan,
                                   size_t index) {
  if (index >= plan.segments.size()) {
    throw Error("segment_out_of_range", std::to_string(index) + " >= " +
                                            std::to_string(plan.segments.size()));
  }
  if (plan.total_tokens != code_tokens.size()) {
    throw Error("plan_mismatch", "plan covers " + std::to_string(plan.total_tokens) +
                                     " tokens, got " + std::to_string(code_tokens.size()));
  }
  const Segment& segment = plan.segments[index];
  return code_tokens.subspan(segment.start, segment.length);
}

}  // namespace bugbrief
