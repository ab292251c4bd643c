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

#include <gtest/gtest.h>

#include <fstream>
#include <mutex>

#include "bugbrief/error.h"
#include "bugbrief/sections.h"
#include "json.hpp"
#include "test_util.h"

namespace bugbrief {
namespace {

using testing::TempDir;
using testing::TestData;

// Mock text, plus a log of every prompt stage and an optional poison word.
class CountingProvider final : public Provider {
 public:
  explicit CountingProvider(std::string poison = {}) : poison_(std::move(poison)) {}

  std::string_view model_id() const override { return kMockModelId; }

  std::vector<PromptStage> stages() const {
    std::lock_guard lock(mu_);
    return stages_;
  }
  std::vector<std::string> bodies() const {
    std::lock_guard lock(mu_);
    return bodies_;
  }

 protected:
  Completion DoComplete(const Prompt& prompt, const DecodingParams& params) override {
    {
      std::lock_guard lock(mu_);
      stages_.push_back(prompt.stage);
      bodies_.push_back(prompt.body);
    }
    if (!poison_.empty() && prompt.body.find(poison_) != std::string::npos) {
      throw Error("http_status(500)", "poisoned");
    }
    Completion c;
    c.text = MockExtractiveText(prompt.body, params.max_new_tokens);
    c.prompt_fingerprint = prompt.fingerprint;
    c.model_id = std::string(kMockModelId);
    c.params = params;
    return c;
  }

 private:
  std::string poison_;
  mutable std::mutex mu_;
  std::vector<PromptStage> stages_;
  std::vector<std::string> bodies_;
};

TokenSeq CodeTokens(size_t n) {
  TokenSeq out;
  for (size_t i = 0; i < n; ++i) out.push_back(i % 10 == 9 ? ";" : "v" + std::to_string(i));
  return out;
}

BugInstance Instance(std::string id, size_t code_tokens) {
  BugInstance b;
  b.bug_id = std::move(id);
  b.project = "P";
  b.report_tokens = Tokenize("Save fails on empty file. The editor hangs afterwards.");
  if (code_tokens > 0) b.code_artifacts.push_back({ArtifactKind::kBuggyCode, CodeTokens(code_tokens), "A.java"});
  b.reference_summary = Tokenize("Saving an empty file hangs.");
  return b;
}

PipelineConfig Config(InputCondition condition) {
  PipelineConfig config;
  config.condition = condition;
  config.snap = SnapPolicy::kNone;
  return config;
}

std::string ErrorCode(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

TEST(Pipeline, ShortCodeBypassesAggregation) {
  CountingProvider provider;
  const Pipeline pipeline(Config(InputCondition::kReportPlusCode), provider);
  const SummaryResult r = pipeline.Summarize(Instance("A-1", 30));
  EXPECT_EQ(provider.stages(), (std::vector<PromptStage>{PromptStage::kChunk, PromptStage::kFinal}));
  ASSERT_EQ(r.chunk_summaries.size(), 1u);
  ASSERT_TRUE(r.code_summary.has_value());
  EXPECT_EQ(*r.code_summary, r.chunk_summaries[0].summary);
  EXPECT_EQ(r.prompts_used.size(), 2u);
}

TEST(Pipeline, LongCodeIsChunkedAndAggregated) {
  CountingProvider provider;
  const Pipeline pipeline(Config(InputCondition::kReportPlusCode), provider);
  const SummaryResult r = pipeline.Summarize(Instance("A-1", 2500));
  EXPECT_EQ(provider.stages(),
            (std::vector<PromptStage>{PromptStage::kChunk, PromptStage::kChunk, PromptStage::kChunk,
                                      PromptStage::kAggregate, PromptStage::kFinal}));
  ASSERT_EQ(r.chunk_summaries.size(), 3u);
  const std::string aggregate = provider.bodies()[3];
  size_t last = 0;
  for (size_t m = 0; m < 3; ++m) {
    const size_t at = aggregate.find(PartHeader(m + 1));
    ASSERT_NE(at, std::string::npos);
    EXPECT_GE(at, last);
    last = at;
  }
  std::vector<std::string> expected;
  for (const ChunkSummary& c : r.chunk_summaries) expected.push_back(Detokenize(c.summary));
  EXPECT_EQ(ParseAggregateParts(aggregate), expected);
  EXPECT_NE(provider.bodies()[4].find(Detokenize(*r.code_summary)), std::string::npos);
}

TEST(Pipeline, ReportOnlyIsOneCall) {
  CountingProvider provider;
  const Pipeline pipeline(Config(InputCondition::kReportOnly), provider);
  const SummaryResult r = pipeline.Summarize(Instance("A-1", 2500));
  EXPECT_EQ(provider.stages().size(), 1u);
  EXPECT_FALSE(r.code_summary.has_value());
  EXPECT_TRUE(r.chunk_summaries.empty());
  EXPECT_EQ(Detokenize(r.final_summary), "Save fails on empty file.");
}

TEST(Pipeline, CallCountLaw) {
  for (size_t n : {1u, 30u, 1024u, 1025u, 2500u, 5000u}) {
    CountingProvider provider;
    const Pipeline pipeline(Config(InputCondition::kCodeOnly), provider);
    pipeline.Summarize(Instance("A-1", n));
    const size_t m = (n + kDefaultChunkLimit - 1) / kDefaultChunkLimit;
    EXPECT_EQ(provider.stages().size(), (m > 1 ? m + 1 : std::min<size_t>(m, 1)) + 1) << n;
  }
}

TEST(Pipeline, EmptyCodeArtifactFailsBeforeAnyCall) {
  CountingProvider provider;
  BugInstance instance = Instance("A-1", 0);
  instance.code_artifacts.push_back({ArtifactKind::kBuggyCode, {}, "Empty.java"});
  const Pipeline pipeline(Config(InputCondition::kReportPlusCode), provider);
  EXPECT_EQ(ErrorCode([&] { pipeline.Summarize(instance); }), "no_matching_artifacts");
  EXPECT_TRUE(provider.stages().empty());
}

TEST(Pipeline, Errors) {
  CountingProvider provider;
  const Pipeline code(Config(InputCondition::kReportPlusCode), provider);
  EXPECT_EQ(ErrorCode([&] { code.Summarize(Instance("A-1", 0)); }), "no_matching_artifacts");
  const Pipeline patch(Config(InputCondition::kReportPlusPatch), provider);
  EXPECT_EQ(ErrorCode([&] { patch.Summarize(Instance("A-1", 10)); }), "no_matching_artifacts");

  BugInstance silent = Instance("A-2", 10);
  silent.report_tokens.clear();
  const Pipeline report(Config(InputCondition::kReportOnly), provider);
  EXPECT_EQ(ErrorCode([&] { report.Summarize(silent); }), "empty_report");

  PipelineConfig tight = Config(InputCondition::kCodeOnly);
  tight.aggregate_token_cap = 5;
  const Pipeline capped(tight, provider);
  EXPECT_EQ(ErrorCode([&] { capped.Summarize(Instance("A-3", 2500)); }), "aggregate_too_long");

  PipelineConfig few = Config(InputCondition::kReportOnly);
  few.strategy = PromptStrategy::FewShot(2);
  EXPECT_EQ(ErrorCode([&] { Pipeline(few, provider, {}); }), "exemplar_count_mismatch");
  PipelineConfig zero_limit = Config(InputCondition::kReportOnly);
  zero_limit.chunk_limit = 0;
  EXPECT_THROW(Pipeline(zero_limit, provider), Error);
}

TEST(Pipeline, ProviderErrorsCarryStage) {
  CountingProvider provider("v5");
  const Pipeline pipeline(Config(InputCondition::kReportPlusCode), provider);
  try {
    pipeline.Summarize(Instance("A-1", 30));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "http_status(500)");
    EXPECT_NE(e.detail().find("stage=chunk"), std::string::npos) << e.detail();
  }
}

Corpus MakeCorpus(size_t n) {
  Corpus corpus;
  corpus.name = "synthetic";
  for (size_t i = 0; i < n; ++i) {
    corpus.instances.push_back(Instance("B-" + std::to_string(i), 200 + 700 * i));
  }
  return corpus;
}

TEST(RunBatch, ParallelismDoesNotChangeResults) {
  const Corpus corpus = MakeCorpus(6);
  const PipelineConfig config = Config(InputCondition::kReportPlusCode);
  CountingProvider p1, p4;
  const BatchResult serial = RunBatch(corpus, config, p1, 1);
  const BatchResult parallel = RunBatch(corpus, config, p4, 4);
  ASSERT_EQ(serial.results.size(), 6u);
  ASSERT_EQ(parallel.results.size(), 6u);
  for (size_t i = 0; i < serial.results.size(); ++i) {
    EXPECT_EQ(ResultToJsonLine(serial.results[i]), ResultToJsonLine(parallel.results[i]));
  }
  EXPECT_EQ(ErrorCode([&] { RunBatch(corpus, config, p1, 0); }), "invalid_parallelism");
}

TEST(RunBatch, FailuresAreCollected) {
  Corpus corpus = MakeCorpus(4);
  corpus.instances[2].code_artifacts.clear();
  CountingProvider provider;
  const BatchResult batch = RunBatch(corpus, Config(InputCondition::kReportPlusCode), provider, 3);
  ASSERT_EQ(batch.results.size(), 3u);
  ASSERT_EQ(batch.failures.size(), 1u);
  EXPECT_EQ(batch.failures[0].bug_id, "B-2");
  EXPECT_EQ(batch.failures[0].code, "no_matching_artifacts");
  for (size_t i = 1; i < batch.results.size(); ++i) {
    EXPECT_LT(batch.results[i - 1].bug_id, batch.results[i].bug_id);
  }
}

TEST(RunBatch, ExemplarsAreExcluded) {
  const Corpus corpus = MakeCorpus(3);
  PipelineConfig config = Config(InputCondition::kReportOnly);
  config.strategy = PromptStrategy::OneShot();
  config.exemplar_pool = {"B-0"};
  CountingProvider provider;
  const BatchResult batch = RunBatch(corpus, config, provider, 2);
  ASSERT_EQ(batch.results.size(), 2u);
  EXPECT_EQ(batch.results[0].bug_id, "B-1");
  for (const std::string& body : provider.bodies()) {
    EXPECT_NE(body.find("=== EXAMPLE ==="), std::string::npos);
  }

  const Pipeline pipeline(config, provider, SelectExemplars(corpus, config));
  EXPECT_EQ(ErrorCode([&] { pipeline.Summarize(corpus.instances[0]); }), "exemplar_overlap");

  config.exemplar_pool = {"B-0", "B-1", "B-2"};
  EXPECT_EQ(ErrorCode([&] { RunBatch(corpus, config, provider, 1); }), "empty_corpus");
  config.strategy = PromptStrategy::FewShot(4);
  EXPECT_EQ(ErrorCode([&] { SelectExemplars(corpus, config); }), "insufficient_exemplars");
  EXPECT_EQ(ErrorCode([&] { RunBatch(Corpus{}, Config(InputCondition::kReportOnly), provider, 1); }),
            "empty_corpus");
}

TEST(ResultsJsonl, RoundTrip) {
  const Corpus corpus = MakeCorpus(2);
  CountingProvider provider;
  const BatchResult batch = RunBatch(corpus, Config(InputCondition::kReportPlusCode), provider, 2);
  TempDir dir;
  WriteResultsJsonl(batch.results, dir / "r.jsonl");
  const std::vector<StoredResult> back = ReadResultsJsonl(dir / "r.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].bug_id, "B-0");
  EXPECT_EQ(back[0].summary, Detokenize(batch.results[0].final_summary));
  ASSERT_TRUE(back[1].code_summary.has_value());
  EXPECT_EQ(*back[1].code_summary, Detokenize(*batch.results[1].code_summary));

  const nlohmann::json line = nlohmann::json::parse(ResultToJsonLine(batch.results[1]));
  for (const char* key : {"bug_id", "summary", "code_summary", "chunks", "prompt_fingerprints", "config"}) {
    EXPECT_TRUE(line.contains(key)) << key;
  }

  std::ofstream(dir / "bad.jsonl") << R"({"bug_id":"x","summary":"y"})" "\n" R"({"summary":1})" "\n";
  try {
    ReadResultsJsonl(dir / "bad.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "malformed_record");
    EXPECT_NE(e.detail().find("bad.jsonl:2"), std::string::npos);
  }
}

TEST(Pipeline, FixtureCorpusUnderMock) {
  const Corpus corpus = LoadCorpus(TestData("corpus5.jsonl"));
  const Corpus exemplars = LoadCorpus(TestData("exemplars.jsonl"));
  PipelineConfig config;
  config.condition = InputCondition::kReportPlusCode;
  config.strategy = PromptStrategy::FewShot(2);
  config.exemplar_pool = {"Ex-1", "Ex-2"};
  auto provider = MakeProvider(config.provider);
  const BatchResult batch = RunBatch(corpus, config, *provider, 2, &exemplars);
  EXPECT_EQ(batch.results.size(), 5u);
  EXPECT_TRUE(batch.failures.empty());
  const SummaryResult& gson = batch.results[2];
  EXPECT_EQ(gson.bug_id, "Gson-11");
  EXPECT_EQ(gson.chunk_summaries.size(), 3u);
}

}  // namespace
}  // namespace bugbrief
