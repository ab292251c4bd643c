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

#include "bugbrief/prompting.h"

#include <charconv>

#include "bugbrief/error.h"
#include "bugbrief/hash.h"
#include "bugbrief/sections.h"

namespace bugbrief {
namespace {

std::string Fingerprint(const Prompt& prompt) {
  const std::string k = std::to_string(prompt.strategy.k);
  return Sha256HexOfParts({prompt.system_text, prompt.body, ToString(prompt.stage),
                           ToString(prompt.strategy.mode), k, ToString(prompt.condition),
                           ToString(prompt.ordering)});
}

std::string SystemText(const PromptTemplates& templates, const std::string& instruction) {
  return templates.system + "\n\n" + instruction;
}

std::string Truncated(std::span<const std::string> tokens, size_t cap) {
  if (cap == 0 || tokens.size() <= cap) return Detokenize(tokens);
  return Detokenize(tokens.first(cap)) + " " + std::string(kTruncationMarker);
}

Prompt Finish(Prompt prompt) {
  prompt.fingerprint = Fingerprint(prompt);
  return prompt;
}

}  // namespace

void PromptStrategy::Validate() const {
  const bool ok = (mode == PromptMode::kZeroShot && k == 0) ||
                  (mode == PromptMode::kOneShot && k == 1) ||
                  (mode == PromptMode::kFewShot && k >= 1);
  if (!ok) {
    throw Error("invalid_strategy",
                std::string(ToString(mode)) + " with k=" + std::to_string(k));
  }
}

std::string_view ToString(PromptMode mode) {
  switch (mode) {
    case PromptMode::kZeroShot: return "zero_shot";
    case PromptMode::kOneShot: return "one_shot";
    case PromptMode::kFewShot: return "few_shot";
  }
  return "unknown";
}

std::string_view ToString(InputCondition condition) {
  switch (condition) {
    case InputCondition::kReportOnly: return "report_only";
    case InputCondition::kReportPlusCode: return "report_plus_code";
    case InputCondition::kCodeOnly: return "code_only";
    case InputCondition::kReportPlusPatch: return "report_plus_patch";
  }
  return "unknown";
}

std::string_view ToString(Ordering ordering) {
  return ordering == Ordering::kReportFirst ? "report_first" : "code_first";
}

std::string_view ToString(PromptStage stage) {
  switch (stage) {
    case PromptStage::kChunk: return "chunk";
    case PromptStage::kAggregate: return "aggregate";
    case PromptStage::kFinal: return "final";
  }
  return "unknown";
}

PromptMode ParsePromptMode(std::string_view name) {
  if (name == "zero" || name == "zero_shot") return PromptMode::kZeroShot;
  if (name == "one" || name == "one_shot") return PromptMode::kOneShot;
  if (name == "few" || name == "few_shot") return PromptMode::kFewShot;
  throw UsageError("unknown_strategy", std::string(name));
}

InputCondition ParseInputCondition(std::string_view name) {
  for (InputCondition c : {InputCondition::kReportOnly, InputCondition::kReportPlusCode,
                           InputCondition::kCodeOnly, InputCondition::kReportPlusPatch}) {
    if (ToString(c) == name) return c;
  }
  throw UsageError("unknown_condition", std::string(name));
}

Ordering ParseOrdering(std::string_view name) {
  if (name == "report_first") return Ordering::kReportFirst;
  if (name == "code_first") return Ordering::kCodeFirst;
  throw UsageError("unknown_ordering", std::string(name));
}

bool IncludesReport(InputCondition condition) { return condition != InputCondition::kCodeOnly; }

bool IncludesCode(InputCondition condition) { return condition != InputCondition::kReportOnly; }

std::vector<const CodeArtifact*> SelectArtifacts(const BugInstance& instance,
                                                 InputCondition condition) {
  std::vector<const CodeArtifact*> selected;
  if (!IncludesCode(condition)) return selected;
  const ArtifactKind wanted = condition == InputCondition::kReportPlusPatch
                                  ? ArtifactKind::kPatchCode
                                  : ArtifactKind::kBuggyCode;
  for (const CodeArtifact& artifact : instance.code_artifacts) {
    if (artifact.kind == wanted) selected.push_back(&artifact);
  }
  return selected;
}

TokenSeq SelectCodeTokens(const BugInstance& instance, InputCondition condition) {
  const std::vector<const CodeArtifact*> artifacts = SelectArtifacts(instance, condition);
  if (artifacts.size() == 1) return artifacts.front()->tokens;
  TokenSeq tokens;
  for (size_t i = 0; i < artifacts.size(); ++i) {
    if (i > 0) tokens.emplace_back(kNewlineToken);
    const std::string path = artifacts[i]->source_path.value_or("(unnamed)");
    TokenSeq separator = Tokenize("// ---- file: " + path);
    tokens.insert(tokens.end(), separator.begin(), separator.end());
    tokens.emplace_back(kNewlineToken);
    tokens.insert(tokens.end(), artifacts[i]->tokens.begin(), artifacts[i]->tokens.end());
  }
  return tokens;
}

std::string RenderInputSections(const BugInstance& instance,
                                const std::optional<TokenSeq>& code_summary,
                                InputCondition condition, Ordering ordering,
                                size_t raw_code_cap) {
  std::string report;
  if (IncludesReport(condition)) {
    AppendSection(report, kBugReportSection, Detokenize(instance.report_tokens));
  }
  std::string code;
  if (IncludesCode(condition)) {
    if (code_summary) {
      AppendSection(code, kCodeSummarySection, Detokenize(*code_summary));
    } else {
      const TokenSeq tokens = SelectCodeTokens(instance, condition);
      if (tokens.empty()) {
        throw Error("no_matching_artifacts",
                    instance.bug_id + " has no artifacts for " + std::string(ToString(condition)));
      }
      AppendSection(code, kCodeSection, Truncated(tokens, raw_code_cap));
    }
  }
  return ordering == Ordering::kReportFirst ? report + code : code + report;
}

Exemplar MakeExemplar(const BugInstance& instance, InputCondition condition, Ordering ordering,
                      size_t raw_code_cap) {
  if (!instance.reference_summary || instance.reference_summary->empty()) {
    throw Error("missing_reference", instance.bug_id);
  }
  return {RenderInputSections(instance, std::nullopt, condition, ordering, raw_code_cap),
          Detokenize(*instance.reference_summary)};
}

Prompt BuildFinalPrompt(const BugInstance& instance, const std::optional<TokenSeq>& code_summary,
                        const PromptStrategy& strategy, InputCondition condition,
                        Ordering ordering, std::span<const Exemplar> exemplars,
                        const PromptTemplates& templates) {
  strategy.Validate();
  if (exemplars.size() != static_cast<size_t>(strategy.k)) {
    throw Error("exemplar_count_mismatch", "expected " + std::to_string(strategy.k) + ", got " +
                                               std::to_string(exemplars.size()));
  }
  if (code_summary && !IncludesCode(condition)) {
    throw Error("unexpected_code_summary", std::string(ToString(condition)));
  }
  if (IncludesCode(condition) && SelectArtifacts(instance, condition).empty()) {
    throw Error("no_matching_artifacts",
                instance.bug_id + " has no artifacts for " + std::string(ToString(condition)));
  }

  Prompt prompt;
  prompt.strategy = strategy;
  prompt.condition = condition;
  prompt.ordering = ordering;
  prompt.stage = PromptStage::kFinal;

  for (const Exemplar& exemplar : exemplars) {
    if (exemplar.input.empty() || exemplar.target.empty()) throw Error("invalid_exemplar");
    AppendSection(prompt.body, kExampleSection, exemplar.input);
    AppendSection(prompt.body, kExampleSummarySection, exemplar.target);
  }
  prompt.body += SectionHeader(kTargetSection);
  prompt.body += '\n';
  prompt.body += RenderInputSections(instance, code_summary, condition, ordering);

  std::string sections;
  auto add = [&](std::string_view name) {
    if (!sections.empty()) sections += ", ";
    sections += name;
  };
  const std::string_view code_name = code_summary ? kCodeSummarySection : kCodeSection;
  if (ordering == Ordering::kReportFirst) {
    if (IncludesReport(condition)) add(kBugReportSection);
    if (IncludesCode(condition)) add(code_name);
  } else {
    if (IncludesCode(condition)) add(code_name);
    if (IncludesReport(condition)) add(kBugReportSection);
  }
  prompt.system_text = SystemText(
      templates, RenderTemplate(templates.final, {{"sections", sections},
                                                  {"example_count", std::to_string(strategy.k)}}));
  return Finish(std::move(prompt));
}

Prompt BuildChunkPrompt(std::span<const std::string> report_tokens,
                        std::span<const std::string> chunk, size_t index, size_t total,
                        InputCondition condition, size_t report_cap,
                        const PromptTemplates& templates) {
  if (chunk.empty()) throw Error("empty_chunk", "chunk " + std::to_string(index));
  if (index >= total) throw Error("segment_out_of_range", std::to_string(index));

  Prompt prompt;
  prompt.strategy = PromptStrategy::ZeroShot();
  prompt.condition = condition;
  prompt.stage = PromptStage::kChunk;
  if (!report_tokens.empty() && IncludesReport(condition)) {
    AppendSection(prompt.body, kBugReportSection, Truncated(report_tokens, report_cap));
  }
  const std::string position = std::to_string(index + 1) + "/" + std::to_string(total);
  AppendSection(prompt.body, std::string(kCodeChunkPrefix) + position, Detokenize(chunk));
  prompt.system_text = SystemText(
      templates, RenderTemplate(templates.chunk, {{"index", std::to_string(index + 1)},
                                                  {"total", std::to_string(total)}}));
  return Finish(std::move(prompt));
}

Prompt BuildAggregatePrompt(std::span<const TokenSeq> chunk_summaries, InputCondition condition,
                            const PromptTemplates& templates) {
  if (chunk_summaries.size() < 2) {
    throw Error("aggregation_bypassed", "a single chunk summary is used directly");
  }
  Prompt prompt;
  prompt.strategy = PromptStrategy::ZeroShot();
  prompt.condition = condition;
  prompt.stage = PromptStage::kAggregate;

  std::string lengths;
  for (size_t m = 0; m < chunk_summaries.size(); ++m) {
    const std::string part = Detokenize(chunk_summaries[m]);
    prompt.body += PartHeader(m + 1);
    prompt.body += '\n';
    prompt.body += part;
    prompt.body += '\n';
    if (m > 0) lengths += ',';
    lengths += std::to_string(part.size());
  }
  prompt.body += SectionHeader(kManifestSection);
  prompt.body += "\nparts=" + std::to_string(chunk_summaries.size()) + " bytes=" + lengths + "\n";
  prompt.system_text = SystemText(
      templates,
      RenderTemplate(templates.aggregate, {{"count", std::to_string(chunk_summaries.size())}}));
  return Finish(std::move(prompt));
}

std::vector<std::string> ParseAggregateParts(std::string_view body) {
  const std::string marker = "\n" + SectionHeader(kManifestSection) + "\n";
  const size_t manifest = body.rfind(marker);
  if (manifest == std::string_view::npos) throw Error("malformed_manifest", "no manifest");

  std::string_view line = body.substr(manifest + marker.size());
  if (line.ends_with('\n')) line.remove_suffix(1);
  const size_t bytes_at = line.find(" bytes=");
  if (!line.starts_with("parts=") || bytes_at == std::string_view::npos) {
    throw Error("malformed_manifest", std::string(line));
  }
  size_t count = 0;
  std::from_chars(line.data() + 6, line.data() + bytes_at, count);

  std::vector<size_t> lengths;
  std::string_view list = line.substr(bytes_at + 7);
  while (!list.empty()) {
    const size_t comma = list.find(',');
    const std::string_view item = list.substr(0, comma);
    size_t value = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error("malformed_manifest", std::string(line));
    }
    lengths.push_back(value);
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (lengths.size() != count) throw Error("malformed_manifest", "part count mismatch");

  std::vector<std::string> parts;
  size_t pos = 0;
  for (size_t m = 0; m < count; ++m) {
    const std::string header = PartHeader(m + 1) + "\n";
    if (body.substr(pos, header.size()) != header) {
      throw Error("malformed_manifest", "missing " + PartHeader(m + 1));
    }
    pos += header.size();
    if (pos + lengths[m] + 1 > manifest + 1 || body[pos + lengths[m]] != '\n') {
      throw Error("malformed_manifest", "part " + std::to_string(m + 1) + " length");
    }
    parts.emplace_back(body.substr(pos, lengths[m]));
    pos += lengths[m] + 1;
  }
  if (pos != manifest + 1) throw Error("malformed_manifest", "trailing content");
  return parts;
}

}  // namespace bugbrief
