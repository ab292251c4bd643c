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

#include "bugbrief/error.h"
#include "bugbrief/io.h"
#include "bugbrief/prompting.h"

namespace bugbrief {
namespace {

// Keep in sync with templates/v1 (checked by prompting_test).
PromptTemplates MakeDefault() {
  PromptTemplates t;
  t.version = "v1";
  t.system =
      "You help software maintainers triage defects. Write a concise abstractive summary of the "
      "software defect, its symptoms, reproduction conditions, and implicated code. Use your own "
      "words; do not copy long passages.";
  t.final =
      "Summarize the defect in the TARGET block. It contains: {{sections}}. Worked examples above "
      "it: {{example_count}}. Reply with the summary only.";
  t.chunk =
      "Summarize the defect-relevant behavior of code chunk {{index}} of {{total}}. Relate it to "
      "the bug report when one is given. Reply with the summary only.";
  t.aggregate =
      "Merge the {{count}} partial code summaries below into one consolidated summary of the "
      "code's defect-relevant behavior. Reply with the summary only.";
  return t;
}

std::string ReadTemplate(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error("template_missing", path.string());
  std::string text = ReadFile(path);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ')) {
    text.pop_back();
  }
  return text;
}

}  // namespace

const PromptTemplates& PromptTemplates::Default() {
  static const PromptTemplates kDefault = MakeDefault();
  return kDefault;
}

PromptTemplates PromptTemplates::FromDirectory(const std::filesystem::path& dir) {
  PromptTemplates t;
  t.version = ReadTemplate(dir / "VERSION");
  t.system = ReadTemplate(dir / "system.txt");
  t.final = ReadTemplate(dir / "final.txt");
  t.chunk = ReadTemplate(dir / "chunk.txt");
  t.aggregate = ReadTemplate(dir / "aggregate.txt");
  return t;
}

std::string RenderTemplate(std::string_view text,
                           const std::map<std::string, std::string>& values) {
  std::string out;
  size_t pos = 0;
  while (pos < text.size()) {
    const size_t open = text.find("{{", pos);
    if (open == std::string_view::npos) break;
    const size_t close = text.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    out.append(text.substr(pos, open - pos));
    const std::string name(text.substr(open + 2, close - open - 2));
    auto it = values.find(name);
    if (it == values.end()) throw Error("template_placeholder", name);
    out.append(it->second);
    pos = close + 2;
  }
  out.append(text.substr(pos));
  return out;
}

}  // namespace bugbrief
