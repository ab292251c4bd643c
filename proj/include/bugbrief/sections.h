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

// Delimiter grammar for prompt bodies and fine-tuning inputs.
//
//   === NAME ===        section header, on a line of its own
//   --- PART m ---      aggregation part header (1-based)
//
// Detokenized content can never reproduce a header line: Detokenize always
// separates consecutive '=' or '-' tokens with spaces.

#ifndef BUGBRIEF_SECTIONS_H_
#define BUGBRIEF_SECTIONS_H_

#include <string>
#include <string_view>
#include <vector>

namespace bugbrief {

inline constexpr std::string_view kBugReportSection = "BUG REPORT";
inline constexpr std::string_view kCodeSection = "CODE";
inline constexpr std::string_view kCodeSummarySection = "CODE SUMMARY";
inline constexpr std::string_view kExampleSection = "EXAMPLE";
inline constexpr std::string_view kExampleSummarySection = "EXAMPLE SUMMARY";
inline constexpr std::string_view kTargetSection = "TARGET";
inline constexpr std::string_view kManifestSection = "MANIFEST";
inline constexpr std::string_view kCodeChunkPrefix = "CODE CHUNK ";

std::string SectionHeader(std::string_view name);
std::string PartHeader(size_t one_based_index);

// Appends "header\ncontent\n" to `body`.
void AppendSection(std::string& body, std::string_view name, std::string_view content);

struct Section {
  std::string name;  // "BUG REPORT", "PART 2", ...
  bool is_part = false;
  std::string content;  // lines between this header and the next, joined by '\n'
};

// Splits a body on header lines. Text before the first header is dropped.
std::vector<Section> ParseSections(std::string_view body);

}  // namespace bugbrief

#endif  // BUGBRIEF_SECTIONS_H_
