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

#include "bugbrief/corpus.h"

#include <algorithm>
#include <regex>
#include <utility>

#include "bugbrief/error.h"
#include "html_text.h"

namespace bugbrief {
namespace {

bool IsTextual(SourceKind kind) {
  return kind == SourceKind::kTrackerHtml || kind == SourceKind::kPlainText;
}

std::string CleanBytes(std::string_view content, const NormalizationConfig& rules) {
  if (rules.strip_bom && content.starts_with("\xEF\xBB\xBF")) content.remove_prefix(3);
  std::string out;
  out.reserve(content.size());
  for (char c : content) {
    const auto byte = static_cast<unsigned char>(c);
    if (byte == 0 && rules.drop_nul_bytes) continue;
    if (rules.drop_control_chars && byte < 0x20 && byte != 0 && c != '\t' && c != '\n' &&
        c != '\r') {
      continue;
    }
    out.push_back(c);
  }
  if (!IsValidUtf8(out)) throw Error("undecodable", "content is not valid UTF-8");
  return NormalizeNfc(out);
}

TokenSeq TrimNewlines(TokenSeq tokens) {
  auto first = std::find_if(tokens.begin(), tokens.end(),
                            [](const std::string& t) { return t != kNewlineToken; });
  tokens.erase(tokens.begin(), first);
  while (!tokens.empty() && tokens.back() == kNewlineToken) tokens.pop_back();
  return tokens;
}

TokenSeq CodeTokens(std::string_view text) {
  return TrimNewlines(Tokenize(text, {.keep_newlines = true}));
}

bool LooksLikeDiff(std::string_view content) {
  std::string_view previous;
  size_t pos = 0;
  while (pos < content.size()) {
    size_t eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    std::string_view line = content.substr(pos, eol - pos);
    if (line.ends_with('\r')) line.remove_suffix(1);
    if (line.starts_with("+++ ") && previous.starts_with("--- ")) return true;
    if (line.starts_with("@@ ") && line.find(" @@", 3) != std::string_view::npos) return true;
    previous = line;
    pos = eol + 1;
  }
  return false;
}

bool LooksLikeStackTrace(std::string_view content) {
  static const std::regex kFrame(R"(^\s*at\s+[\w$.<>/]+\(.*\)\s*$)");
  int lines = 0;
  int frames = 0;
  size_t pos = 0;
  while (pos < content.size()) {
    size_t eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    const std::string line(content.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++lines;
    if (std::regex_match(line, kFrame)) ++frames;
  }
  return lines > 0 && 2 * frames > lines;
}

}  // namespace

std::string_view ToString(SourceKind kind) {
  switch (kind) {
    case SourceKind::kTrackerHtml: return "tracker_html";
    case SourceKind::kPlainText: return "plain_text";
    case SourceKind::kCodeFile: return "code_file";
    case SourceKind::kDiff: return "diff";
    case SourceKind::kStackTrace: return "stack_trace";
  }
  return "unknown";
}

std::string_view ToString(ArtifactKind kind) {
  switch (kind) {
    case ArtifactKind::kBuggyCode: return "buggy_code";
    case ArtifactKind::kPatchCode: return "patch_code";
    case ArtifactKind::kDiff: return "diff";
    case ArtifactKind::kStackTrace: return "stack_trace";
    case ArtifactKind::kInlineBlock: return "inline_block";
  }
  return "unknown";
}

SourceKind ParseSourceKind(std::string_view name) {
  for (SourceKind kind : {SourceKind::kTrackerHtml, SourceKind::kPlainText, SourceKind::kCodeFile,
                          SourceKind::kDiff, SourceKind::kStackTrace}) {
    if (ToString(kind) == name) return kind;
  }
  throw UsageError("unknown_source_kind", std::string(name));
}

ArtifactKind ParseArtifactKind(std::string_view name) {
  for (ArtifactKind kind : {ArtifactKind::kBuggyCode, ArtifactKind::kPatchCode, ArtifactKind::kDiff,
                            ArtifactKind::kStackTrace, ArtifactKind::kInlineBlock}) {
    if (ToString(kind) == name) return kind;
  }
  throw Error("unknown_artifact_kind", std::string(name));
}

const BugInstance* Corpus::Find(std::string_view bug_id) const {
  auto it = std::lower_bound(
      instances.begin(), instances.end(), bug_id,
      [](const BugInstance& instance, std::string_view id) { return instance.bug_id < id; });
  if (it == instances.end() || it->bug_id != bug_id) return nullptr;
  return &*it;
}

void CanonicalizeCorpus(Corpus& corpus) {
  std::stable_sort(corpus.instances.begin(), corpus.instances.end(),
                   [](const BugInstance& a, const BugInstance& b) { return a.bug_id < b.bug_id; });
  for (size_t i = 1; i < corpus.instances.size(); ++i) {
    if (corpus.instances[i].bug_id == corpus.instances[i - 1].bug_id) {
      throw Error("duplicate_bug_id", corpus.instances[i].bug_id);
    }
  }
}

ArtifactKind ClassifyArtifact(const RawSource& raw) {
  if (LooksLikeDiff(raw.content)) return ArtifactKind::kDiff;
  if (LooksLikeStackTrace(raw.content)) return ArtifactKind::kStackTrace;
  if (raw.kind == SourceKind::kDiff) return ArtifactKind::kDiff;
  if (raw.kind == SourceKind::kStackTrace) return ArtifactKind::kStackTrace;
  return raw.role_hint == CodeRole::kPatch ? ArtifactKind::kPatchCode : ArtifactKind::kBuggyCode;
}

NormalizedSource Normalize(const RawSource& raw, const NormalizationConfig& rules) {
  const std::string content = CleanBytes(raw.content, rules);
  NormalizedSource out;

  if (!IsTextual(raw.kind)) {
    CodeArtifact artifact{ClassifyArtifact(raw), CodeTokens(content), std::nullopt};
    if (!raw.origin.empty()) artifact.source_path = raw.origin;
    if (artifact.tokens.empty()) throw Error("empty_after_cleaning", raw.origin);
    out.extracted_blocks.push_back(std::move(artifact));
    return out;
  }

  internal::ExtractedText extracted;
  if (raw.kind == SourceKind::kTrackerHtml) {
    extracted = internal::CleanHtml(content, rules.extract_code_tags);
  } else {
    extracted.text = content;
  }
  if (rules.extract_fenced_blocks) {
    internal::ExtractedText fenced = internal::ExtractFencedBlocks(extracted.text);
    extracted.text = std::move(fenced.text);
    for (std::string& block : fenced.code_blocks) extracted.code_blocks.push_back(std::move(block));
  }

  // Entity decoding can reintroduce decomposed sequences.
  out.report_tokens = Tokenize(NormalizeNfc(extracted.text));
  if (out.report_tokens.empty()) throw Error("empty_after_cleaning", raw.origin);
  for (const std::string& block : extracted.code_blocks) {
    TokenSeq tokens = CodeTokens(NormalizeNfc(block));
    if (tokens.empty()) continue;
    out.extracted_blocks.push_back({ArtifactKind::kInlineBlock, std::move(tokens), std::nullopt});
  }
  return out;
}

BugInstance BuildInstance(std::string bug_id, std::span<const RawSource> sources,
                          const std::optional<std::string>& reference,
                          const InstanceMetadata& metadata, const NormalizationConfig& rules) {
  if (bug_id.empty()) throw Error("empty_bug_id");
  BugInstance instance;
  instance.bug_id = std::move(bug_id);
  instance.project = metadata.project;
  instance.tracker_url = metadata.tracker_url;

  size_t rejected = 0;
  for (const RawSource& source : sources) {
    NormalizedSource normalized;
    try {
      normalized = Normalize(source, rules);
    } catch (const Error&) {
      ++rejected;
      continue;
    }
    instance.report_tokens.insert(instance.report_tokens.end(),
                                  normalized.report_tokens.begin(),
                                  normalized.report_tokens.end());
    for (CodeArtifact& artifact : normalized.extracted_blocks) {
      instance.code_artifacts.push_back(std::move(artifact));
    }
  }
  if (instance.report_tokens.empty()) {
    if (!sources.empty() && rejected == sources.size()) {
      throw Error("all_sources_rejected", instance.bug_id);
    }
    throw Error("no_textual_source", instance.bug_id);
  }
  std::stable_sort(instance.code_artifacts.begin(), instance.code_artifacts.end(),
                   [](const CodeArtifact& a, const CodeArtifact& b) { return a.kind < b.kind; });
  if (reference) instance.reference_summary = Tokenize(*reference);
  return instance;
}

}  // namespace bugbrief
