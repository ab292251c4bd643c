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

// Deterministic prompt rendering for the three stages of the hierarchy:
// per-chunk code prompts, the aggregation prompt, and the final summary
// prompt (optionally preceded by worked examples).
//
// A final-prompt body looks like
//
//   === EXAMPLE ===
//   <exemplar input, itself a sequence of sections>
//   === EXAMPLE SUMMARY ===
//   <exemplar reference summary>
//   ... (k times)
//   === TARGET ===
//   === BUG REPORT ===
//   <report>
//   === CODE SUMMARY ===        (or === CODE === for raw artifact tokens)
//   <code>
//
// with the report and code sections swapped under Ordering::kCodeFirst.

#ifndef BUGBRIEF_PROMPTING_H_
#define BUGBRIEF_PROMPTING_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bugbrief/corpus.h"
#include "bugbrief/tokenizer.h"

namespace bugbrief {

enum class PromptMode { kZeroShot, kOneShot, kFewShot };

struct PromptStrategy {
  PromptMode mode = PromptMode::kZeroShot;
  int k = 0;  // number of worked examples: 0, 1, or >= 1 for few-shot

  static PromptStrategy ZeroShot() { return {PromptMode::kZeroShot, 0}; }
  static PromptStrategy OneShot() { return {PromptMode::kOneShot, 1}; }
  static PromptStrategy FewShot(int k) { return {PromptMode::kFewShot, k}; }

  // Throws Error("invalid_strategy") on a mode/k mismatch.
  void Validate() const;

  bool operator==(const PromptStrategy&) const = default;
};

enum class InputCondition { kReportOnly, kReportPlusCode, kCodeOnly, kReportPlusPatch };
enum class Ordering { kReportFirst, kCodeFirst };
enum class PromptStage { kChunk, kAggregate, kFinal };

std::string_view ToString(PromptMode mode);
std::string_view ToString(InputCondition condition);
std::string_view ToString(Ordering ordering);
std::string_view ToString(PromptStage stage);

// Accept both the long names ("zero_shot") and the short CLI forms ("zero").
PromptMode ParsePromptMode(std::string_view name);
InputCondition ParseInputCondition(std::string_view name);
Ordering ParseOrdering(std::string_view name);

bool IncludesReport(InputCondition condition);
bool IncludesCode(InputCondition condition);

// Artifacts feeding the code side of a condition: patch_code for
// kReportPlusPatch, buggy_code for kReportPlusCode and kCodeOnly, nothing
// for kReportOnly. Corpus order is preserved.
std::vector<const CodeArtifact*> SelectArtifacts(const BugInstance& instance,
                                                 InputCondition condition);

// The selected artifacts as one token sequence. With more than one artifact
// each is preceded by a "// ---- file: <path>" line.
TokenSeq SelectCodeTokens(const BugInstance& instance, InputCondition condition);

struct Exemplar {
  std::string input;   // rendered sections of a demonstration instance
  std::string target;  // its reference summary

  bool operator==(const Exemplar&) const = default;
};

struct Prompt {
  std::string system_text;
  std::string body;
  PromptStrategy strategy;
  InputCondition condition = InputCondition::kReportOnly;
  Ordering ordering = Ordering::kReportFirst;
  PromptStage stage = PromptStage::kFinal;
  std::string fingerprint;  // SHA-256 over text and rendering metadata
};

// Instruction wording. Placeholders are written {{name}}.
struct PromptTemplates {
  std::string version;
  std::string system;     // shared preamble for every stage
  std::string final;      // {{sections}}, {{example_count}}
  std::string chunk;      // {{index}}, {{total}}
  std::string aggregate;  // {{count}}

  // Compiled-in copy of templates/v1.
  static const PromptTemplates& Default();

  // Reads VERSION, system.txt, final.txt, chunk.txt, aggregate.txt.
  // Throws Error("template_missing").
  static PromptTemplates FromDirectory(const std::filesystem::path& dir);
};

// Throws Error("template_placeholder") for a placeholder without a value.
std::string RenderTemplate(std::string_view text, const std::map<std::string, std::string>& values);

inline constexpr size_t kDefaultReportCap = 2000;
inline constexpr std::string_view kTruncationMarker = "…";

// The sections of the target block (no TARGET header). Raw code is cut to
// `raw_code_cap` tokens (0 = unlimited) when no code summary is given.
std::string RenderInputSections(const BugInstance& instance,
                                const std::optional<TokenSeq>& code_summary,
                                InputCondition condition, Ordering ordering,
                                size_t raw_code_cap = 0);

// Throws Error("missing_reference"), Error("no_matching_artifacts").
Exemplar MakeExemplar(const BugInstance& instance, InputCondition condition, Ordering ordering,
                      size_t raw_code_cap);

// Errors: "exemplar_count_mismatch", "no_matching_artifacts",
// "unexpected_code_summary", "invalid_exemplar", "invalid_strategy".
Prompt BuildFinalPrompt(const BugInstance& instance, const std::optional<TokenSeq>& code_summary,
                        const PromptStrategy& strategy, InputCondition condition,
                        Ordering ordering, std::span<const Exemplar> exemplars,
                        const PromptTemplates& templates = PromptTemplates::Default());

// `index` is 0-based; the header reads "CODE CHUNK index+1/total". An empty
// report omits the report section. Reports longer than `report_cap` tokens
// (0 = unlimited) keep their first report_cap tokens plus an ellipsis.
// Throws Error("empty_chunk").
Prompt BuildChunkPrompt(std::span<const std::string> report_tokens,
                        std::span<const std::string> chunk, size_t index, size_t total,
                        InputCondition condition = InputCondition::kReportPlusCode,
                        size_t report_cap = kDefaultReportCap,
                        const PromptTemplates& templates = PromptTemplates::Default());

// Throws Error("aggregation_bypassed") for fewer than two summaries.
Prompt BuildAggregatePrompt(std::span<const TokenSeq> chunk_summaries,
                            InputCondition condition = InputCondition::kReportPlusCode,
                            const PromptTemplates& templates = PromptTemplates::Default());

// Recovers the parts of an aggregation body from its trailing manifest,
// independent of what the parts contain. Throws Error("malformed_manifest").
std::vector<std::string> ParseAggregateParts(std::string_view body);

}  // namespace bugbrief

#endif  // BUGBRIEF_PROMPTING_H_
