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

#ifndef BUGBRIEF_SRC_HTML_TEXT_H_
#define BUGBRIEF_SRC_HTML_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace bugbrief::internal {

struct ExtractedText {
  std::string text;
  std::vector<std::string> code_blocks;  // document order
};

// Strips markup and decodes entities. <script>/<style> vanish with their
// content; <pre>/<code> regions are pulled out verbatim (minus inner tags)
// when `extract_code` is set, otherwise kept as text.
ExtractedText CleanHtml(std::string_view html, bool extract_code);

// Removes ``` / ~~~ fenced regions, line based. An unclosed fence runs to
// the end of the text.
ExtractedText ExtractFencedBlocks(std::string_view text);

std::string DecodeEntities(std::string_view text);

}  // namespace bugbrief::internal

#endif  // BUGBRIEF_SRC_HTML_TEXT_H_
