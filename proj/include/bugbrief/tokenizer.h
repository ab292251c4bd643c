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

// The one tokenizer shared by report text, code, chunk accounting and
// metrics. Words are maximal runs of letters, digits, combining marks and
// '_'; every other non-space code point is a token by itself. Case is
// preserved; metrics lowercase separately.

#ifndef BUGBRIEF_TOKENIZER_H_
#define BUGBRIEF_TOKENIZER_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bugbrief {

using TokenSeq = std::vector<std::string>;

inline constexpr std::string_view kNewlineToken = "\n";

struct TokenizeOptions {
  // Code keeps one "\n" token per line break so chunk cuts can snap to
  // line boundaries. Report text drops them.
  bool keep_newlines = false;
};

// Throws Error("undecodable") on malformed UTF-8.
TokenSeq Tokenize(std::string_view utf8, TokenizeOptions options = {});

// Inverse of Tokenize on its own output: Tokenize(Detokenize(t)) == t.
// Punctuation hugs its neighbour the way prose is usually written.
std::string Detokenize(std::span<const std::string> tokens);

TokenSeq Lowercase(std::span<const std::string> tokens);

// Tokenize + lowercase, without newline tokens.
TokenSeq MetricTokens(std::string_view utf8);

bool IsValidUtf8(std::string_view bytes);

// Unicode canonical composition (NFC). Input must be valid UTF-8.
std::string NormalizeNfc(std::string_view utf8);

}  // namespace bugbrief

#endif  // BUGBRIEF_TOKENIZER_H_
