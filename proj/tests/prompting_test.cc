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

#include <gtest/gtest.h>

#include <set>

#include "bugbrief/corpus.h"
#include "bugbrief/error.h"
#include "bugbrief/sections.h"
#include "test_util.h"

namespace bugbrief {
namespace {

using testing::TestData;

size_t Count(std::string_view haystack, std::string_view needle) {
  size_t n = 0;
  for (size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

size_t CountSections(const std::string& body, std::string_view name) {
  size_t n = 0;
  for (const Section& s : ParseSections(body)) n += (!s.is_part && s.name == name);
  return n;
}


class PromptingTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    corpus_ = new Corpus(LoadCorpus(TestData("corpus5.jsonl")));
    exemplars_ = new Corpus(LoadCorpus(TestData("exemplars.jsonl")));
  }
  static void TearDownTestSuite() {
    delete corpus_;
    delete exemplars_;
  }
  const BugInstance& Instance(const std::string& id) const { return *corpus_->Find(id); }
  std::vector<Exemplar> Exemplars(size_t k, InputCondition condition, Ordering ordering) const {
    std::vector<Exemplar> out;
    for (size_t i = 0; i < k; ++i) {
      out.push_back(MakeExemplar(exemplars_->instances[i], condition, ordering, 0));
    }
    return out;
  }

  static inline Corpus* corpus_ = nullptr;
  static inline Corpus* exemplars_ = nullptr;
};

TEST_F(PromptingTest, ZeroShotReportOnly) {
  const Prompt p = BuildFinalPrompt(Instance("Cli-3"), std::nullopt, PromptStrategy::ZeroShot(),
                                    InputCondition::kReportOnly, Ordering::kReportFirst, {});
  EXPECT_EQ(p.stage, PromptStage::kFinal);
  EXPECT_EQ(CountSections(p.body, kBugReportSection), 1u);
  EXPECT_EQ(CountSections(p.body, kExampleSection), 0u);
  EXPECT_EQ(CountSections(p.body, kCodeSection), 0u);
  EXPECT_EQ(CountSections(p.body, kCodeSummarySection), 0u);
  EXPECT_EQ(p.fingerprint.size(), 64u);
}

TEST_F(PromptingTest, FewShotBlocksInCallerOrder) {
  const auto condition = InputCondition::kReportPlusCode;
  std::vector<Exemplar> ex = Exemplars(2, condition, Ordering::kReportFirst);
  const Prompt p = BuildFinalPrompt(Instance("Lang-9"), std::nullopt, PromptStrategy::FewShot(2),
                                    condition, Ordering::kReportFirst, ex);
  const std::vector<Section> sections = ParseSections(p.body);
  std::vector<std::string> top;
  for (const Section& s : sections) {
    if (s.name == kExampleSection || s.name == kExampleSummarySection || s.name == kTargetSection) {
      top.push_back(s.name);
    }
  }
  EXPECT_EQ(top, (std::vector<std::string>{"EXAMPLE", "EXAMPLE SUMMARY", "EXAMPLE",
                                           "EXAMPLE SUMMARY", "TARGET"}));
  EXPECT_LT(p.body.find(ex[0].target), p.body.find(ex[1].target));

  std::swap(ex[0], ex[1]);
  const Prompt swapped = BuildFinalPrompt(Instance("Lang-9"), std::nullopt,
                                          PromptStrategy::FewShot(2), condition,
                                          Ordering::kReportFirst, ex);
  EXPECT_LT(swapped.body.find(ex[0].target), swapped.body.find(ex[1].target));
  EXPECT_NE(swapped.fingerprint, p.fingerprint);
}

TEST_F(PromptingTest, ExemplarCountMustMatch) {
  const auto ex = Exemplars(1, InputCondition::kReportOnly, Ordering::kReportFirst);
  try {
    BuildFinalPrompt(Instance("Cli-3"), std::nullopt, PromptStrategy::FewShot(2),
                     InputCondition::kReportOnly, Ordering::kReportFirst, ex);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "exemplar_count_mismatch");
  }
}

TEST_F(PromptingTest, OrderingSwapsSections) {
  const TokenSeq summary = {"parser", "drops", "quotes", "."};
  const auto render = [&](Ordering o) {
    return BuildFinalPrompt(Instance("Csv-7"), summary, PromptStrategy::ZeroShot(),
                            InputCondition::kReportPlusCode, o, {});
  };
  const Prompt a = render(Ordering::kReportFirst), b = render(Ordering::kCodeFirst);
  EXPECT_NE(a.fingerprint, b.fingerprint);
  EXPECT_LT(a.body.find("=== BUG REPORT ==="), a.body.find("=== CODE SUMMARY ==="));
  EXPECT_GT(b.body.find("=== BUG REPORT ==="), b.body.find("=== CODE SUMMARY ==="));

  auto sections_by_name = [](const std::string& body) {
    std::map<std::string, std::string> out;
    for (const Section& s : ParseSections(body)) out[s.name] = s.content;
    return out;
  };
  EXPECT_EQ(sections_by_name(a.body), sections_by_name(b.body));
}

TEST_F(PromptingTest, SectionAlgebra) {
  const BugInstance& csv = Instance("Csv-7");
  const Prompt code_only = BuildFinalPrompt(csv, std::nullopt, PromptStrategy::ZeroShot(),
                                            InputCondition::kCodeOnly, Ordering::kReportFirst, {});
  EXPECT_EQ(CountSections(code_only.body, kBugReportSection), 0u);
  EXPECT_EQ(CountSections(code_only.body, kCodeSection), 1u);

  const auto patch = SelectArtifacts(csv, InputCondition::kReportPlusPatch);
  ASSERT_FALSE(patch.empty());
  for (const CodeArtifact* a : patch) EXPECT_EQ(a->kind, ArtifactKind::kPatchCode);
  for (const CodeArtifact* a : SelectArtifacts(csv, InputCondition::kReportPlusCode)) {
    EXPECT_EQ(a->kind, ArtifactKind::kBuggyCode);
  }
  EXPECT_TRUE(SelectArtifacts(csv, InputCondition::kReportOnly).empty());
}

TEST_F(PromptingTest, FinalPromptErrors) {
  BugInstance bare = Instance("Cli-3");
  bare.code_artifacts.clear();
  std::string code;
  try {
    BuildFinalPrompt(bare, std::nullopt, PromptStrategy::ZeroShot(),
                     InputCondition::kReportPlusCode, Ordering::kReportFirst, {});
  } catch (const Error& e) {
    code = e.code();
  }
  EXPECT_EQ(code, "no_matching_artifacts");
  code.clear();
  try {
    BuildFinalPrompt(bare, TokenSeq{"x"}, PromptStrategy::ZeroShot(), InputCondition::kReportOnly,
                     Ordering::kReportFirst, {});
  } catch (const Error& e) {
    code = e.code();
  }
  EXPECT_EQ(code, "unexpected_code_summary");
}

TEST(ChunkPrompt, HeaderAndTruncation) {
  const TokenSeq chunk = {"int", "x", ";"};
  TokenSeq report;
  for (int i = 0; i < 5000; ++i) report.push_back("w" + std::to_string(i));
  const Prompt p = BuildChunkPrompt(report, chunk, 0, 3);
  EXPECT_EQ(p.stage, PromptStage::kChunk);
  EXPECT_NE(p.body.find("=== CODE CHUNK 1/3 ==="), std::string::npos);

  std::string report_text;
  for (const Section& s : ParseSections(p.body)) {
    if (s.name == kBugReportSection) report_text = s.content;
  }
  const TokenSeq kept = Tokenize(report_text);
  ASSERT_EQ(kept.size(), 2001u);
  EXPECT_EQ(kept[1999], "w1999");
  EXPECT_EQ(kept.back(), kTruncationMarker);
}

TEST(ChunkPrompt, EmptyChunkAndEmptyReport) {
  EXPECT_THROW(BuildChunkPrompt(TokenSeq{"a"}, TokenSeq{}, 0, 1), Error);
  const Prompt no_report = BuildChunkPrompt(TokenSeq{}, TokenSeq{"x"}, 1, 2);
  EXPECT_EQ(CountSections(no_report.body, kBugReportSection), 0u);
  EXPECT_NE(no_report.body.find("CODE CHUNK 2/2"), std::string::npos);
}

TEST(AggregatePrompt, PartsInOrder) {
  const std::vector<TokenSeq> parts = {{"first", "."}, {"second", "."}, {"third", "."}};
  const Prompt p = BuildAggregatePrompt(parts);
  EXPECT_EQ(p.stage, PromptStage::kAggregate);
  const size_t p1 = p.body.find("--- PART 1 ---"), p2 = p.body.find("--- PART 2 ---"),
               p3 = p.body.find("--- PART 3 ---");
  ASSERT_NE(p3, std::string::npos);
  EXPECT_LT(p1, p2);
  EXPECT_LT(p2, p3);
  EXPECT_EQ(ParseAggregateParts(p.body),
            (std::vector<std::string>{"first.", "second.", "third."}));
}

TEST(AggregatePrompt, SingleSummaryBypasses) {
  try {
    BuildAggregatePrompt(std::vector<TokenSeq>{{"only"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "aggregation_bypassed");
  }
}

TEST(AggregatePrompt, DelimiterLookalikesSurvive) {
  const std::vector<TokenSeq> parts = {
      Tokenize("--- PART 2 --- fake header", {.keep_newlines = true}),
      Tokenize("=== MANIFEST ===\n3 4 5", {.keep_newlines = true}),
      Tokenize("plain", {.keep_newlines = true})};
  const Prompt p = BuildAggregatePrompt(parts);
  const std::vector<std::string> back = ParseAggregateParts(p.body);
  ASSERT_EQ(back.size(), 3u);
  for (size_t i = 0; i < parts.size(); ++i) EXPECT_EQ(back[i], Detokenize(parts[i]));
  EXPECT_EQ(Count(p.body, "\n--- PART "), 2u);  // PART 1 opens the body
}

TEST(AggregatePrompt, MalformedManifest) {
  EXPECT_THROW(ParseAggregateParts("no manifest here"), Error);
}

TEST(Templates, DirectoryMatchesCompiledDefault) {
  const PromptTemplates disk = PromptTemplates::FromDirectory(testing::TemplatesDir());
  const PromptTemplates& def = PromptTemplates::Default();
  EXPECT_EQ(disk.version, def.version);
  EXPECT_EQ(disk.system, def.system);
  EXPECT_EQ(disk.final, def.final);
  EXPECT_EQ(disk.chunk, def.chunk);
  EXPECT_EQ(disk.aggregate, def.aggregate);
  EXPECT_THROW(PromptTemplates::FromDirectory(TestData("no-such-dir")), Error);
}

TEST(Templates, RenderPlaceholders) {
  EXPECT_EQ(RenderTemplate("{{a}} and {{b}}", {{"a", "1"}, {"b", "2"}}), "1 and 2");
  EXPECT_THROW(RenderTemplate("{{missing}}", {}), Error);
}

TEST(Strategy, Validation) {
  EXPECT_NO_THROW(PromptStrategy::FewShot(3).Validate());
  EXPECT_THROW((PromptStrategy{PromptMode::kZeroShot, 1}).Validate(), Error);
  EXPECT_THROW((PromptStrategy{PromptMode::kOneShot, 2}).Validate(), Error);
  EXPECT_THROW(PromptStrategy::FewShot(0).Validate(), Error);
  EXPECT_EQ(ParsePromptMode("zero"), PromptMode::kZeroShot);
  EXPECT_EQ(ParsePromptMode("few_shot"), PromptMode::kFewShot);
  EXPECT_EQ(ParseInputCondition("report_plus_patch"), InputCondition::kReportPlusPatch);
  EXPECT_EQ(ParseOrdering("code_first"), Ordering::kCodeFirst);
}

TEST_F(PromptingTest, FingerprintsAreInjectiveOnFixtures) {
  std::set<std::string> seen;
  size_t rendered = 0;
  const std::vector<PromptStrategy> strategies = {PromptStrategy::ZeroShot(),
                                                  PromptStrategy::OneShot(),
                                                  PromptStrategy::FewShot(2)};
  for (const BugInstance& instance : corpus_->instances) {
    for (const PromptStrategy& strategy : strategies) {
      for (auto condition : {InputCondition::kReportOnly, InputCondition::kReportPlusCode,
                             InputCondition::kCodeOnly, InputCondition::kReportPlusPatch}) {
        for (auto ordering : {Ordering::kReportFirst, Ordering::kCodeFirst}) {
          const auto ex = Exemplars(static_cast<size_t>(strategy.k), condition, ordering);
          const Prompt p =
              BuildFinalPrompt(instance, std::nullopt, strategy, condition, ordering, ex);
          seen.insert(p.fingerprint);
          ++rendered;
        }
      }
    }
  }
  EXPECT_EQ(seen.size(), rendered);
}

TEST_F(PromptingTest, RenderingIsDeterministic) {
  const auto make = [&] {
    return BuildFinalPrompt(Instance("Gson-11"), std::nullopt, PromptStrategy::ZeroShot(),
                            InputCondition::kReportPlusCode, Ordering::kCodeFirst, {});
  };
  const Prompt a = make(), b = make();
  EXPECT_EQ(a.body, b.body);
  EXPECT_EQ(a.fingerprint, b.fingerprint);
}

}  // namespace
}  // namespace bugbrief
