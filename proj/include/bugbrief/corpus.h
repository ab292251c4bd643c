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

// Ingestion: raw tracker pages and code files in, normalized BugInstances
// out. Also persistence of corpora and fine-tuning dataset export.

#ifndef BUGBRIEF_CORPUS_H_
#define BUGBRIEF_CORPUS_H_

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bugbrief/tokenizer.h"

namespace bugbrief {

enum class SourceKind { kTrackerHtml, kPlainText, kCodeFile, kDiff, kStackTrace };

// Declaration order is the canonical artifact order inside a BugInstance.
enum class ArtifactKind { kBuggyCode, kPatchCode, kDiff, kStackTrace, kInlineBlock };

// Which side of the fix a plain code file belongs to when its content alone
// does not say.
enum class CodeRole { kBuggy, kPatch };

std::string_view ToString(SourceKind kind);
std::string_view ToString(ArtifactKind kind);
SourceKind ParseSourceKind(std::string_view name);
ArtifactKind ParseArtifactKind(std::string_view name);

struct RawSource {
  std::string bug_id;
  SourceKind kind = SourceKind::kPlainText;
  std::string content;  // raw bytes
  std::string origin;   // URL or file path
  CodeRole role_hint = CodeRole::kBuggy;
};

struct CodeArtifact {
  ArtifactKind kind = ArtifactKind::kBuggyCode;
  TokenSeq tokens;
  std::optional<std::string> source_path;

  bool operator==(const CodeArtifact&) const = default;
};

struct BugInstance {
  std::string bug_id;
  std::string project;
  TokenSeq report_tokens;
  std::vector<CodeArtifact> code_artifacts;
  std::optional<TokenSeq> reference_summary;
  std::optional<std::string> tracker_url;

  bool operator==(const BugInstance&) const = default;
};

struct Corpus {
  std::string name;
  std::vector<BugInstance> instances;  // sorted by bug_id, unique
  std::string provenance;

  const BugInstance* Find(std::string_view bug_id) const;
};

// Sorts by bug_id and rejects duplicates with Error("duplicate_bug_id").
void CanonicalizeCorpus(Corpus& corpus);

struct NormalizationConfig {
  bool strip_bom = true;
  bool drop_nul_bytes = true;
  // C0 controls other than tab and line breaks.
  bool drop_control_chars = true;
  bool extract_code_tags = true;      // <pre>, <code>
  bool extract_fenced_blocks = true;  // ``` and ~~~ fences
};

struct NormalizedSource {
  TokenSeq report_tokens;
  std::vector<CodeArtifact> extracted_blocks;
};

// Textual sources (tracker_html, plain_text) yield report tokens plus inline
// blocks. Code sources yield no report tokens and exactly one artifact whose
// kind comes from ClassifyArtifact.
//
// Throws Error("undecodable") or Error("empty_after_cleaning").
NormalizedSource Normalize(const RawSource& raw, const NormalizationConfig& rules = {});

// Content rules first (diff headers, then a majority of "at pkg.Cls.m(F:n)"
// frames); otherwise the source kind, then the caller's role hint.
ArtifactKind ClassifyArtifact(const RawSource& raw);

struct InstanceMetadata {
  std::string project;
  std::optional<std::string> tracker_url;
};

// Throws Error("no_textual_source") or Error("all_sources_rejected").
BugInstance BuildInstance(std::string bug_id, std::span<const RawSource> sources,
                          const std::optional<std::string>& reference,
                          const InstanceMetadata& metadata = {},
                          const NormalizationConfig& rules = {});

enum class CorpusFormat { kInstanceJsonl, kDefects4jLayout };

Corpus LoadCorpus(const std::filesystem::path& path,
                  CorpusFormat format = CorpusFormat::kInstanceJsonl);
void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path);

// One instance as a JSONL line (no trailing newline) and back.
std::string InstanceToJsonLine(const BugInstance& instance);
BugInstance InstanceFromJsonLine(std::string_view line);

struct FetchOptions {
  std::chrono::milliseconds timeout{10000};
  int max_attempts = 1;
  std::chrono::milliseconds backoff{250};
};

// GET a tracker page. Errors: "invalid_url", "network", "timeout",
// "http_status(<code>)".
RawSource FetchSource(std::string bug_id, const std::string& url,
                      const FetchOptions& options = {});

enum class FinetuneVariant { kBrOnly, kBrPlusCs };
enum class Split { kTrain, kValid };

std::string_view ToString(Split split);

struct FinetuneRecord {
  std::string bug_id;
  Split split = Split::kTrain;
  std::string input;
  std::string target;
};

// Decided by the bug id alone (roughly one id in ten lands in validation),
// so adding or removing other instances never moves an id.
Split AssignSplit(std::string_view bug_id);

// Throws Error("missing_reference") or Error("missing_code_summary"), naming
// the bug id.
std::vector<FinetuneRecord> ExportFinetuneDataset(
    const Corpus& corpus, FinetuneVariant variant,
    const std::map<std::string, TokenSeq>& code_summaries);

void WriteFinetuneJsonl(std::span<const FinetuneRecord> records,
                        const std::filesystem::path& path);

}  // namespace bugbrief

#endif  // BUGBRIEF_CORPUS_H_
