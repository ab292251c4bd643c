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

#include "html_text.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <utility>

namespace bugbrief::internal {
namespace {

constexpr std::array<std::string_view, 24> kBlockTags = {
    "p",  "div", "br",    "li",    "ul",     "ol",      "tr",     "td",
    "th", "table", "h1",  "h2",    "h3",     "h4",      "h5",     "h6",
    "hr", "dd",  "dt",    "dl",    "section", "article", "blockquote", "title"};

constexpr std::array<std::pair<std::string_view, std::string_view>, 14> kNamedEntities = {{
    {"amp", "&"},
    {"lt", "<"},
    {"gt", ">"},
    {"quot", "\""},
    {"apos", "'"},
    {"nbsp", " "},
    {"hellip", "…"},
    {"mdash", "—"},
    {"ndash", "–"},
    {"lsquo", "‘"},
    {"rsquo", "’"},
    {"ldquo", "“"},
    {"rdquo", "”"},
    {"copy", "©"},
}};

char Lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

void AppendUtf8(std::string& out, uint32_t cp) {
  if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

struct Tag {
  std::string name;  // lowercase, empty for comments/doctype
  bool closing = false;
  size_t end = 0;    // one past '>'
};

// Parses the tag starting at html[pos] == '<'. Returns nullopt-like Tag with
// end == 0 when the '<' does not start markup.
Tag ParseTag(std::string_view html, size_t pos) {
  Tag tag;
  size_t i = pos + 1;
  if (i >= html.size()) return tag;
  if (html[i] == '!' || html[i] == '?') {
    const size_t close = html.find('>', i);
    tag.end = close == std::string_view::npos ? html.size() : close + 1;
    return tag;
  }
  if (html[i] == '/') {
    tag.closing = true;
    ++i;
  }
  if (i >= html.size() || !std::isalpha(static_cast<unsigned char>(html[i]))) return tag;
  while (i < html.size() && (std::isalnum(static_cast<unsigned char>(html[i])) || html[i] == '-')) {
    tag.name.push_back(Lower(html[i]));
    ++i;
  }
  char quote = 0;
  for (; i < html.size(); ++i) {
    const char c = html[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      tag.end = i + 1;
      return tag;
    }
  }
  tag.name.clear();
  return tag;
}

// Finds the end of the element named `name` whose opening tag ends at
// `from`. Returns (content_end, element_end).
std::pair<size_t, size_t> FindClose(std::string_view html, size_t from, std::string_view name) {
  int depth = 1;
  size_t i = from;
  while ((i = html.find('<', i)) != std::string_view::npos) {
    const Tag tag = ParseTag(html, i);
    if (tag.end == 0) {
      ++i;
      continue;
    }
    if (tag.name == name) {
      depth += tag.closing ? -1 : 1;
      if (depth == 0) return {i, tag.end};
    }
    i = tag.end;
  }
  return {html.size(), html.size()};
}

bool IsBlockTag(std::string_view name) {
  return std::find(kBlockTags.begin(), kBlockTags.end(), name) != kBlockTags.end();
}

// Tag stripping inside a code region: only <br> contributes a line break.
std::string StripAllTags(std::string_view html) {
  std::string out;
  size_t i = 0;
  while (i < html.size()) {
    if (html[i] == '<') {
      const Tag tag = ParseTag(html, i);
      if (tag.end != 0) {
        if (tag.name == "br") out.push_back('\n');
        i = tag.end;
        continue;
      }
    }
    out.push_back(html[i]);
    ++i;
  }
  return DecodeEntities(out);
}

std::string_view TrimLeft(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

}  // namespace

std::string DecodeEntities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out.push_back(text[i++]);
      continue;
    }
    const size_t semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(text[i++]);
      continue;
    }
    const std::string_view entity = text.substr(i + 1, semi - i - 1);
    bool decoded = false;
    if (entity.size() > 1 && entity[0] == '#') {
      uint32_t cp = 0;
      const bool hex = entity[1] == 'x' || entity[1] == 'X';
      const std::string_view digits = entity.substr(hex ? 2 : 1);
      const auto [ptr, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
      if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty()) {
        AppendUtf8(out, cp);
        decoded = true;
      }
    } else {
      for (const auto& [name, value] : kNamedEntities) {
        if (entity == name) {
          out.append(value);
          decoded = true;
          break;
        }
      }
    }
    if (decoded) {
      i = semi + 1;
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

ExtractedText CleanHtml(std::string_view html, bool extract_code) {
  ExtractedText result;
  std::string raw_text;  // entities still encoded
  size_t i = 0;
  while (i < html.size()) {
    if (html[i] != '<') {
      raw_text.push_back(html[i++]);
      continue;
    }
    if (html.substr(i, 4) == "<!--") {
      const size_t close = html.find("-->", i + 4);
      i = close == std::string_view::npos ? html.size() : close + 3;
      continue;
    }
    const Tag tag = ParseTag(html, i);
    if (tag.end == 0) {
      raw_text.push_back(html[i++]);
      continue;
    }
    if (!tag.closing && (tag.name == "script" || tag.name == "style")) {
      i = FindClose(html, tag.end, tag.name).second;
      continue;
    }
    if (!tag.closing && extract_code && (tag.name == "pre" || tag.name == "code")) {
      const auto [content_end, element_end] = FindClose(html, tag.end, tag.name);
      result.code_blocks.push_back(StripAllTags(html.substr(tag.end, content_end - tag.end)));
      raw_text.push_back(' ');
      i = element_end;
      continue;
    }
    if (IsBlockTag(tag.name)) raw_text.push_back('\n');
    i = tag.end;
  }
  result.text = DecodeEntities(raw_text);
  return result;
}

ExtractedText ExtractFencedBlocks(std::string_view text) {
  ExtractedText result;
  std::string block;
  std::string_view fence;  // active fence marker, empty when outside
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    const std::string_view trimmed = TrimLeft(line);
    const bool is_fence = trimmed.starts_with("```") || trimmed.starts_with("~~~");
    if (fence.empty()) {
      if (is_fence) {
        fence = trimmed.substr(0, 3);
        block.clear();
      } else {
        result.text.append(line);
        if (eol < text.size()) result.text.push_back('\n');
      }
    } else if (is_fence && trimmed.starts_with(fence)) {
      result.code_blocks.push_back(std::move(block));
      block.clear();
      fence = {};
      result.text.push_back('\n');
    } else {
      block.append(line);
      block.push_back('\n');
    }
    if (eol == text.size()) break;
    pos = eol + 1;
  }
  if (!fence.empty()) result.code_blocks.push_back(std::move(block));
  return result;
}

}  // namespace bugbrief::internal
