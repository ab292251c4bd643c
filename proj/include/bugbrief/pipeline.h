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

// Hierarchical summarization: code is cut into chunks of at most
// `chunk_limit` tokens, each chunk is summarized next to the report, the
// chunk summaries are merged by one aggregation call (skipped when there is
// a single chunk), and the final prompt combines the report with the merged
// code summary.
//
// Provider calls per instance for a code-bearing condition with M chunks:
//   (M > 1 ? M + 1 : min(M, 1)) + 1

#ifndef BUGBRIEF_PIPELINE_H_
#define BUGBRIEF_PIPELINE_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bugbrief/chunking.h"
#include "bugbrief/corpus.h"
#include "bugbrief/prompting.h"
#include "bugbrief/provider.h"

namespace bugbrief {

struct PipelineConfig {
  PromptStrategy strategy;
  InputCondition condition = InputCondition::kReportOnly;
  Ordering ordering = Ordering::kReportFirst;
  size_t chunk_limit = kDefaultChunkLimit;
  SnapPolicy snap = SnapPolicy::kLine;
  size_t report_cap = kDefaultReportCap;
  // Single aggregation pass; an aggregation body longer than this many
  // tokens fails with "aggregate_too_long" (0 disables the check).
  size_t aggregate_token_cap = 8192;
  DecodingParams decoding;
  ProviderConfig provider;
  std::vector<std::string> exemplar_pool;  // bug ids, in selection order
  PromptTemplates templates = PromptTemplates::Default();

  // Throws Error("invalid_pipeline_config") / Error("invalid_strategy").
  void Validate() const;
};

struct ChunkSummary {
  size_t index = 0;
  TokenSeq summary;

  bool operator==(const ChunkSummary&) const = default;
};

struct CodeSummary {
  TokenSeq summary;  // the consolidated summary
  std::vector<ChunkSummary> chunks;
  std::vector<std::string> fingerprints;  // prompts issued, in order
};

struct SummaryResult {
  std::string bug_id;
  TokenSeq final_summary;
  std::optional<TokenSeq> code_summary;
  std::vector<ChunkSummary> chunk_summaries;  // non-empty iff code was summarized
  std::vector<std::string> prompts_used;      // fingerprints, in call order
  PipelineConfig provenance;
};

struct BatchFailure {
  std::string bug_id;
  std::string code;
  std::string message;
};

struct BatchResult {
  std::vector<SummaryResult> results;  // sorted by bug_id
  std::vector<BatchFailure> failures;  // sorted by bug_id
};

// Runs one configuration against one provider. Thread-safe when the
// provider is.
class Pipeline {
 public:
  // `exemplars.size()` must equal config.strategy.k.
  Pipeline(PipelineConfig config, Provider& provider, std::vector<Exemplar> exemplars = {});

  // Errors: "no_matching_artifacts", "aggregate_too_long", plus provider
  // errors re-raised with the stage in the detail.
  CodeSummary SummarizeCode(const BugInstance& instance) const;

  // Errors: "exemplar_overlap" when the instance is in the exemplar pool,
  // "empty_report", plus everything from SummarizeCode.
  SummaryResult Summarize(const BugInstance& instance) const;

  const PipelineConfig& config() const { return config_; }

 private:
  TokenSeq Call(const Prompt& prompt, std::string_view stage,
                std::vector<std::string>& fingerprints) const;

  PipelineConfig config_;
  Provider& provider_;
  std::vector<Exemplar> exemplars_;
};

// First `k` pool members from `source`, rendered under the config's
// condition and ordering. Raw exemplar code is cut to chunk_limit tokens.
// Throws Error("insufficient_exemplars").
std::vector<Exemplar> SelectExemplars(const Corpus& source, const PipelineConfig& config);

// Summarizes every instance not in the exemplar pool. Per-instance failures
// are collected, not thrown. Throws Error("empty_corpus").
BatchResult RunBatch(const Corpus& corpus, const PipelineConfig& config, Provider& provider,
                     size_t parallelism, const Corpus* exemplar_source = nullptr);

// Results JSONL: {"bug_id","summary","code_summary","chunks","prompt_fingerprints","config"}.
std::string ResultToJsonLine(const SummaryResult& result);
void WriteResultsJsonl(std::span<const SummaryResult> results, const std::filesystem::path& path);

// What evaluation and export need back from a results file.
struct StoredResult {
  std::string bug_id;
  std::string summary;
  std::optional<std::string> code_summary;
};
std::vector<StoredResult> ReadResultsJsonl(const std::filesystem::path& path);

// Stable JSON rendering of the semantic parts of a config.
std::string PipelineConfigJson(const PipelineConfig& config);

}  // namespace bugbrief

#endif  // BUGBRIEF_PIPELINE_H_
