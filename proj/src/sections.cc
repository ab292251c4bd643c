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

#include "bugbrief/sections.h"

#include <optional>

namespace bugbrief {
namespace {

std::optional<std::string_view> HeaderName(std::string_view line, std::string_view fence) {
  if (line.size() < 2 * fence.size() + 3) return std::nullopt;
  if (!line.starts_with(fence) || !line.ends_with(fence)) return std::nullopt;
  if (line[fence.size()] != ' ' || line[line.size() - fence.size() - 1] != ' ') return std::nullopt;
  std::string_view name = line.substr(fence.size() + 1, line.size() - 2 * fence.size() - 2);
  if (name.empty() || name.front() == ' ' || name.back() == ' ') return std::nullopt;
  return name;
}

}  // namespace

std::string SectionHeader(std::string_view name) {
  return "=== " + std::string(name) + " ===";
}

std::string PartHeader(size_t one_based_index) {
  return "--- PART " + std::to_string(one_based_index) + " ---";
}

void AppendSection(std::string& body, std::string_view name, std::string_view content) {
  body += SectionHeader(name);
  body += '\n';
  body += content;
  if (!content.empty() && content.back() != '\n') body += '\n';
}

std::vector<Section> ParseSections(std::string_view body) {
  std::vector<Section> sections;
  size_t pos = 0;
  bool have_lines = false;
  while (pos < body.size()) {
    size_t eol = body.find('\n', pos);
    if (eol == std::string_view::npos) eol = body.size();
    const std::string_view line = body.substr(pos, eol - pos);
    pos = eol + 1;

    std::optional<std::string_view> name = HeaderName(line, "===");
    bool is_part = false;
    if (!name) {
      name = HeaderName(line, "---");
      is_part = name.has_value();
    }
    if (name) {
      sections.push_back({std::string(*name), is_part, {}});
      have_lines = false;
      continue;
    }
    if (sections.empty()) continue;
    std::string& content = sections.back().content;
    if (have_lines) content.push_back('\n');
    content.append(line);
    have_lines = true;
  }
  return sections;
}

}  // namespace bugbrief
