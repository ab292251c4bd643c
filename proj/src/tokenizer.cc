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

#include "bugbrief/tokenizer.h"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <cstdint>

#include "bugbrief/error.h"

namespace bugbrief {
namespace {

bool IsWordChar(UChar32 c) {
  if (c == '_') return true;
  if (u_hasBinaryProperty(c, UCHAR_ALPHABETIC) || u_isdigit(c)) return true;
  const int8_t type = u_charType(c);
  return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK ||
         type == U_ENCLOSING_MARK;
}

bool IsLineBreak(UChar32 c) {
  return c == '\n' || c == '\r' || c == 0x85 || c == 0x2028 || c == 0x2029;
}

bool IsSpace(UChar32 c) { return u_isUWhiteSpace(c) || c == 0xFEFF; }

bool NoSpaceBefore(std::string_view token) {
  return token == "." || token == "," || token == ";" || token == ":" ||
         token == "!" || token == "?" || token == ")" || token == "]" ||
         token == "}" || token == "%";
}

bool NoSpaceAfter(std::string_view token) {
  return token == "(" || token == "[" || token == "{";
}

}  // namespace

bool IsValidUtf8(std::string_view bytes) {
  const auto* s = reinterpret_cast<const uint8_t*>(bytes.data());
  const int32_t length = static_cast<int32_t>(bytes.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

TokenSeq Tokenize(std::string_view utf8, TokenizeOptions options) {
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const int32_t length = static_cast<int32_t>(utf8.size());
  TokenSeq tokens;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) tokens.push_back(std::move(word));
    word.clear();
  };
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) throw Error("undecodable", "invalid UTF-8 at byte " + std::to_string(start));
    if (IsWordChar(c)) {
      word.append(utf8.substr(start, i - start));
      continue;
    }
    flush();
    if (IsLineBreak(c)) {
      // CRLF is one break.
      if (c == '\r' && i < length && s[i] == '\n') ++i;
      if (options.keep_newlines) tokens.emplace_back(kNewlineToken);
      continue;
    }
    if (IsSpace(c)) continue;
    tokens.emplace_back(utf8.substr(start, i - start));
  }
  flush();
  return tokens;
}

std::string Detokenize(std::span<const std::string> tokens) {
  std::string out;
  bool line_start = true;
  std::string_view previous;
  for (const std::string& token : tokens) {
    if (token == kNewlineToken) {
      out.push_back('\n');
      line_start = true;
      continue;
    }
    if (!line_start && !NoSpaceBefore(token) && !NoSpaceAfter(previous)) {
      out.push_back(' ');
    }
    out.append(token);
    previous = token;
    line_start = false;
  }
  return out;
}

TokenSeq Lowercase(std::span<const std::string> tokens) {
  TokenSeq out;
  out.reserve(tokens.size());
  for (const std::string& token : tokens) {
    std::string lowered;
    icu::UnicodeString::fromUTF8(token).toLower(icu::Locale::getRoot()).toUTF8String(lowered);
    out.push_back(std::move(lowered));
  }
  return out;
}

TokenSeq MetricTokens(std::string_view utf8) { return Lowercase(Tokenize(utf8)); }

std::string NormalizeNfc(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("icu", u_errorName(status));
  const icu::UnicodeString input =
      icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  icu::UnicodeString normalized = nfc->normalize(input, status);
  if (U_FAILURE(status)) throw Error("icu", u_errorName(status));
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

}  // namespace bugbrief
