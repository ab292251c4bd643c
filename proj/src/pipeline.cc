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

#include "bugbrief/pipeline.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "bugbrief/error.h"
#include "bugbrief/io.h"
#include "json.hpp"

namespace bugbrief {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

bool InPool(const PipelineConfig& config, std::string_view bug_id) {
  return std::find(config.exemplar_pool.begin(), config.exemplar_pool.end(), bug_id) !=
         config.exemplar_pool.end();
}

ordered_json ConfigToJson(const PipelineConfig& config) {
  ordered_json out;
  out["strategy"] = ToString(config.strategy.mode);
  out["k"] = config.strategy.k;
  out["condition"] = ToString(config.condition);
  out["ordering"] = ToString(config.ordering);
  out["chunk_limit"] = config.chunk_limit;
  out["snap"] = ToString(config.snap);
  out["report_cap"] = config.report_cap;
  out["aggregate_token_cap"] = config.aggregate_token_cap;
  out["decoding"] = ordered_json::parse(CanonicalParams(config.decoding));
  ordered_json provider;
  provider["kind"] = ToString(config.provider.kind);
  provider["model_id"] = config.provider.model_id;
  provider["endpoint"] =
      config.provider.endpoint ? ordered_json(*config.provider.endpoint) : ordered_json(nullptr);
  out["provider"] = std::move(provider);
  out["exemplar_pool"] = config.exemplar_pool;
  out["templates"] = config.templates.version;
  return out;
}

}  // namespace

void PipelineConfig::Validate() const {
  strategy.Validate();
  decoding.Validate();
  provider.Validate();
  if (chunk_limit == 0) throw Error("invalid_pipeline_config", "chunk_limit must be >= 1");
}

Pipeline::Pipeline(PipelineConfig config, Provider& provider, std::vector<Exemplar> exemplars)
    : config_(std::move(config)), provider_(provider), exemplars_(std::move(exemplars)) {
  config_.strategy.Validate();
  config_.decoding.Validate();
  if (config_.chunk_limit == 0) throw Error("invalid_pipeline_config", "chunk_limit must be >= 1");
  if (exemplars_.size() != static_cast<size_t>(config_.strategy.k)) {
    throw Error("exemplar_count_mismatch", "expected " + std::to_string(config_.strategy.k) +
                                               ", got " + std::to_string(exemplars_.size()));
  }
}

TokenSeq Pipeline::Call(const Prompt& prompt, std::string_view stage,
                        std::vector<std::string>& fingerprints) const {
  fingerprints.push_back(prompt.fingerprint);
  try {
    return Tokenize(provider_.Complete(prompt, config_.decoding).text);
  } catch (const Error& e) {
    throw Error(e.code(), "stage=" + std::string(stage) + ": " + e.detail());
  }
}

CodeSummary Pipeline::SummarizeCode(const BugInstance& instance) const {
  if (SelectArtifacts(instance, config_.condition).empty()) {
    throw Error("no_matching_artifacts", instance.bug_id + " has no artifacts for " +
                                             std::string(ToString(config_.condition)));
  }
  const TokenSeq code = SelectCodeTokens(instance, config_.condition);
  if (code.empty()) {
    throw Error("no_matching_artifacts", instance.bug_id + " has only empty artifacts for " +
                                             std::string(ToString(config_.condition)));
  }
  const ChunkPlan plan = PlanChunks(code, config_.chunk_limit, config_.snap);
  const std::span<const std::string> report =
      IncludesReport(config_.condition) ? std::span<const std::string>(instance.report_tokens)
                                        : std::span<const std::string>();

  CodeSummary out;
  for (size_t m = 0; m < plan.size(); ++m) {
    const Prompt prompt = BuildChunkPrompt(report, Slice(code, plan, m), m, plan.size(),
                                           config_.condition, config_.report_cap,
                                           config_.templates);
    out.chunks.push_back({m, Call(prompt, "chunk[" + std::to_string(m) + "]", out.fingerprints)});
  }
  if (out.chunks.size() == 1) {
    out.summary = out.chunks.front().summary;
    return out;
  }

  std::vector<TokenSeq> parts;
  parts.reserve(out.chunks.size());
  for (const ChunkSummary& chunk : out.chunks) parts.push_back(chunk.summary);
  const Prompt aggregate = BuildAggregatePrompt(parts, config_.condition, config_.templates);
  if (config_.aggregate_token_cap > 0) {
    const size_t tokens = Tokenize(aggregate.body).size();
    if (tokens > config_.aggregate_token_cap) {
      throw Error("aggregate_too_long", instance.bug_id + ": " + std::to_string(tokens) +
                                            " tokens > cap " +
                                            std::to_string(config_.aggregate_token_cap));
    }
  }
  out.summary = Call(aggregate, "aggregate", out.fingerprints);
  return out;
}

SummaryResult Pipeline::Summarize(const BugInstance& instance) const {
  if (InPool(config_, instance.bug_id)) throw Error("exemplar_overlap", instance.bug_id);
  if (IncludesReport(config_.condition) && instance.report_tokens.empty()) {
    throw Error("empty_report", instance.bug_id);
  }

  SummaryResult result;
  result.bug_id = instance.bug_id;
  result.provenance = config_;
  if (IncludesCode(config_.condition)) {
    CodeSummary code = SummarizeCode(instance);
    result.code_summary = std::move(code.summary);
    result.chunk_summaries = std::move(code.chunks);
    result.prompts_used = std::move(code.fingerprints);
  }
  const Prompt final_prompt =
      BuildFinalPrompt(instance, result.code_summary, config_.strategy, config_.condition,
                       config_.ordering, exemplars_, config_.templates);
  result.final_summary = Call(final_prompt, "final", result.prompts_used);
  return result;
}

std::vector<Exemplar> SelectExemplars(const Corpus& source, const PipelineConfig& config) {
  const size_t k = static_cast<size_t>(config.strategy.k);
  std::vector<Exemplar> exemplars;
  for (const std::string& id : config.exemplar_pool) {
    if (exemplars.size() == k) break;
    const BugInstance* instance = source.Find(id);
    if (instance == nullptr) throw Error("insufficient_exemplars", "unknown exemplar " + id);
    exemplars.push_back(
        MakeExemplar(*instance, config.condition, config.ordering, config.chunk_limit));
  }
  if (exemplars.size() < k) {
    throw Error("insufficient_exemplars", "need " + std::to_string(k) + ", pool has " +
                                              std::to_string(exemplars.size()));
  }
  return exemplars;
}

BatchResult RunBatch(const Corpus& corpus, const PipelineConfig& config, Provider& provider,
                     size_t parallelism, const Corpus* exemplar_source) {
  if (parallelism == 0) throw Error("invalid_parallelism", "parallelism must be >= 1");
  std::vector<const BugInstance*> todo;
  for (const BugInstance& instance : corpus.instances) {
    if (!InPool(config, instance.bug_id)) todo.push_back(&instance);
  }
  if (todo.empty()) throw Error("empty_corpus", corpus.name);

  const Pipeline pipeline(config, provider,
                          SelectExemplars(exemplar_source ? *exemplar_source : corpus, config));

  std::vector<std::optional<SummaryResult>> results(todo.size());
  std::vector<std::optional<BatchFailure>> failures(todo.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < todo.size(); i = next++) {
      try {
        results[i] = pipeline.Summarize(*todo[i]);
      } catch (const Error& e) {
        failures[i] = BatchFailure{todo[i]->bug_id, e.code(), e.what()};
      } catch (const std::exception& e) {
        failures[i] = BatchFailure{todo[i]->bug_id, "internal", e.what()};
      }
    }
  };
  {
    std::vector<std::jthread> threads;
    const size_t count = std::min(parallelism, todo.size());
    for (size_t t = 0; t < count; ++t) threads.emplace_back(worker);
  }

  BatchResult batch;
  for (size_t i = 0; i < todo.size(); ++i) {
    if (results[i]) batch.results.push_back(std::move(*results[i]));
    if (failures[i]) batch.failures.push_back(std::move(*failures[i]));
  }
  return batch;
}

std::string PipelineConfigJson(const PipelineConfig& config) { return ConfigToJson(config).dump(); }

std::string ResultToJsonLine(const SummaryResult& result) {
  ordered_json line;
  line["bug_id"] = result.bug_id;
  line["summary"] = Detokenize(result.final_summary);
  line["code_summary"] =
      result.code_summary ? ordered_json(Detokenize(*result.code_summary)) : ordered_json(nullptr);
  ordered_json chunks = ordered_json::array();
  for (const ChunkSummary& chunk : result.chunk_summaries) {
    chunks.push_back({{"index", chunk.index}, {"summary", Detokenize(chunk.summary)}});
  }
  line["chunks"] = std::move(chunks);
  line["prompt_fingerprints"] = result.prompts_used;
  line["config"] = ConfigToJson(result.provenance);
  return line.dump();
}

void WriteResultsJsonl(std::span<const SummaryResult> results, const std::filesystem::path& path) {
  std::ostringstream out;
  for (const SummaryResult& result : results) out << ResultToJsonLine(result) << '\n';
  WriteFileAtomic(path, out.str());
}

std::vector<StoredResult> ReadResultsJsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("file_not_found", path.string());
  std::vector<StoredResult> results;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json record = json::parse(line);
      StoredResult result;
      result.bug_id = record.at("bug_id").get<std::string>();
      result.summary = record.at("summary").get<std::string>();
      if (auto it = record.find("code_summary"); it != record.end() && !it->is_null()) {
        result.code_summary = it->get<std::string>();
      }
      results.push_back(std::move(result));
    } catch (const json::exception& e) {
      throw Error("malformed_record",
                  path.string() + ":" + std::to_string(line_number) + ": " + e.what());
    }
  }
  return results;
}

}  // namespace bugbrief
