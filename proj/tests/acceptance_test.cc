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


// Acceptance checks. One PASS or FAIL line per criterion; the process exits
// non-zero when any criterion fails. Tolerances are pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bugbrief/chunking.h"
#include "bugbrief/cli.h"
#include "bugbrief/error.h"
#include "bugbrief/harness.h"
#include "bugbrief/io.h"
#include "bugbrief/metrics.h"
#include "bugbrief/pipeline.h"
#include "json.hpp"
#include "oracles.h"
#include "test_util.h"

namespace bugbrief {
namespace {

namespace fs = std::filesystem;
using namespace bugbrief::testing;
using Clock = std::chrono::steady_clock;

constexpr int kOraclePairs = 1000;
constexpr double kOracleSeconds = 5.0;
constexpr int kBertPairs = 200;
constexpr double kBertTolerance = 1e-9;
constexpr double kIdentityTolerance = 1e-6;
constexpr double kHandTolerance = 1e-9;
constexpr size_t kChunkMaxTokens = 5000;
constexpr double kChunkSeconds = 5.0;
constexpr double kBenchSeconds = 60.0;
constexpr size_t kCallCountLimit = 1024;

struct Verdict {
  bool pass = true;
  std::string detail;

  void Require(bool ok, const std::string& why) {
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* format, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), format, value);
  return buffer;
}

int RunCliArgs(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "bugbrief");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text != nullptr) *err_text = err.str();
  return code;
}

Verdict MetricOracles() {
  Verdict v;
  std::mt19937_64 rng(20260101);
  const auto start = Clock::now();
  for (int i = 0; i < kOraclePairs && v.pass; ++i) {
    const TokenSeq cand = RandomSeq(rng, 0, 12, 6), ref = RandomSeq(rng, 0, 12, 6);
    for (size_t n : {1u, 2u}) {
      const Overlap got = RougeNOverlap(cand, ref, n);
      const OracleCounts want = OracleRougeN(cand, ref, n);
      v.Require(got.matched == want.matched && got.candidate_total == want.candidate_total &&
                    got.reference_total == want.reference_total,
                "rouge" + std::to_string(n) + " mismatch at pair " + std::to_string(i));
      const PRF prf = RougeN(cand, ref, n);
      const double r = want.reference_total > 0 ? want.matched / want.reference_total : 0.0;
      const double p = want.candidate_total > 0 ? want.matched / want.candidate_total : 0.0;
      v.Require(prf.recall == r && prf.precision == p,
                "rouge" + std::to_string(n) + " ratio mismatch at pair " + std::to_string(i));
    }
    const size_t lcs = OracleLcs(cand, ref);
    v.Require(LcsLength(cand, ref) == lcs, "lcs mismatch at pair " + std::to_string(i));
    const PRF l = RougeL(cand, ref);
    v.Require(l.recall == (ref.empty() ? 0.0 : static_cast<double>(lcs) / ref.size()),
              "rougeL recall mismatch at pair " + std::to_string(i));
  }
  const double elapsed = Seconds(start);
  v.Require(elapsed < kOracleSeconds, "took " + Fmt("%.2f s", elapsed));
  if (v.pass) v.detail = std::to_string(kOraclePairs) + " pairs, " + Fmt("%.3f s", elapsed);
  return v;
}

Verdict BertReductions() {
  Verdict v;
  const OneHotEmbedder onehot;
  std::mt19937_64 rng(424242);
  double worst = 0.0;
  int literal_misses = 0;
  for (int i = 0; i < kBertPairs; ++i) {
    // Clipped overlap equals greedy matching when no token repeats inside a
    // sequence; repeated tokens are checked against the membership form.
    const TokenSeq dc = RandomDistinctSeq(rng, 10, 12), dr = RandomDistinctSeq(rng, 10, 12);
    const PRF bert = BertScore(dc, dr, onehot);
    const PRF clipped = RougeN(dc, dr, 1);
    worst = std::max({worst, std::abs(bert.precision - clipped.precision),
                      std::abs(bert.recall - clipped.recall)});

    const TokenSeq c = RandomSeq(rng, 1, 12, 6), r = RandomSeq(rng, 1, 12, 6);
    const PRF any = BertScore(c, r, onehot);
    worst = std::max({worst, std::abs(any.precision - MembershipRate(c, r)),
                      std::abs(any.recall - MembershipRate(r, c))});
    const PRF literal = RougeN(c, r, 1);
    literal_misses += std::abs(any.precision - literal.precision) > kBertTolerance ||
                      std::abs(any.recall - literal.recall) > kBertTolerance;

    for (const TokenSeq* s : {&c, &dr}) {
      const PRF self = BertScore(*s, *s, onehot);
      v.Require(std::abs(self.f1 - 1.0) <= kIdentityTolerance &&
                    std::abs(self.precision - 1.0) <= kIdentityTolerance &&
                    std::abs(self.recall - 1.0) <= kIdentityTolerance,
                "identity pair scored " + Fmt("%.9f", self.f1));
    }
  }
  const HashedNgramEmbedder hashed;
  for (int i = 0; i < 50; ++i) {
    const TokenSeq s = RandomSeq(rng, 1, 12, 26);
    const PRF self = BertScore(s, s, hashed);
    v.Require(std::abs(self.f1 - 1.0) <= kIdentityTolerance, "hashed identity pair below 1");
  }
  v.Require(worst <= kBertTolerance, "max deviation " + Fmt("%.3g", worst));
  if (v.pass) {
    v.detail = std::to_string(kBertPairs) + " distinct-token pairs vs clipped overlap, " +
               std::to_string(kBertPairs) + " general pairs vs membership, max dev " +
               Fmt("%.1e", worst) + "; clipped form differs on " + std::to_string(literal_misses) +
               " general pairs with repeated tokens";
  }
  return v;
}

Verdict HandValues() {
  Verdict v;
  const TokenSeq ref = {"parser", "crashes", "on", "empty", "input"};
  const TokenSeq cand = {"parser", "crashes", "when", "input", "empty"};
  const auto near = [&](double got, double want, const std::string& what) {
    v.Require(std::abs(got - want) <= kHandTolerance,
              what + " = " + Fmt("%.12f", got) + ", expected " + Fmt("%.12f", want));
  };
  near(RougeN(cand, ref, 1).recall, 0.8, "rouge1 recall");
  near(RougeN(cand, ref, 1).precision, 0.8, "rouge1 precision");
  near(RougeN(cand, ref, 2).recall, 0.25, "rouge2 recall");
  const PRF l = RougeL(TokenSeq{"a", "c", "b", "d"}, TokenSeq{"a", "b", "c", "d"});
  near(l.recall, 0.75, "rougeL recall");
  near(l.precision, 0.75, "rougeL precision");
  const OneHotEmbedder onehot;
  const PRF b = BertScore(TokenSeq{"a", "b"}, TokenSeq{"a", "c"}, onehot);
  near(b.f1, 0.5, "one-hot bert f1");
  near(SemanticSufficiency(TokenSeq{"a", "b"}, TokenSeq{"a"}, onehot).distance,
       1.0 - 1.0 / std::sqrt(2.0), "pooled distance");
  const std::vector<TokenPair> pairs = {{{"a", "b"}, {"a", "b"}}, {{"x", "y"}, {"c", "d"}}};
  near(CorpusRouge(pairs, 1), 0.5, "micro rouge1");
  if (v.pass) v.detail = "rouge1 0.8, rouge2 0.25, rougeL 0.75, d 0.292893";
  return v;
}

Verdict ChunkingLaws() {
  Verdict v;
  TokenSeq tokens(kChunkMaxTokens);
  for (size_t i = 0; i < tokens.size(); ++i) tokens[i] = "t" + std::to_string(i % 97);
  const auto start = Clock::now();
  size_t plans = 0;
  for (size_t limit : {1u, 7u, 64u, 1024u}) {
    for (size_t n = 0; n <= kChunkMaxTokens && v.pass; ++n) {
      const std::span<const std::string> code(tokens.data(), n);
      const ChunkPlan plan = PlanChunks(code, limit, SnapPolicy::kNone);
      ++plans;
      const std::string where = "n=" + std::to_string(n) + " L=" + std::to_string(limit);
      v.Require(plan.size() == (n + limit - 1) / limit, "segment count wrong at " + where);
      size_t next = 0;
      for (size_t m = 0; m < plan.size(); ++m) {
        const std::span<const std::string> part = Slice(code, plan, m);
        v.Require(part.data() == code.data() + next && !part.empty(),
                  "gap or overlap at " + where);
        v.Require(part.size() <= limit, "oversized segment at " + where);
        next += part.size();
      }
      v.Require(next == n, "coverage short at " + where);
    }
  }
  const double elapsed = Seconds(start);
  v.Require(elapsed < kChunkSeconds, "took " + Fmt("%.2f s", elapsed));
  if (v.pass) v.detail = std::to_string(plans) + " plans, " + Fmt("%.3f s", elapsed);
  return v;
}

class CountingProvider final : public Provider {
 public:
  std::string_view model_id() const override { return kMockModelId; }
  size_t calls() const {
    std::lock_guard lock(mu_);
    return calls_;
  }

 protected:
  Completion DoComplete(const Prompt& prompt, const DecodingParams& params) override {
    {
      std::lock_guard lock(mu_);
      ++calls_;
    }
    Completion c;
    c.text = MockExtractiveText(prompt.body, params.max_new_tokens);
    c.prompt_fingerprint = prompt.fingerprint;
    c.model_id = std::string(kMockModelId);
    c.params = params;
    return c;
  }

 private:
  mutable std::mutex mu_;
  size_t calls_ = 0;
};

Verdict CallCountLaw() {
  Verdict v;
  std::string observed;
  for (size_t size : {0u, 30u, 1024u, 2500u}) {
    BugInstance instance;
    instance.bug_id = "Law-" + std::to_string(size);
    instance.report_tokens = Tokenize("Export fails on large files. It stops halfway.");
    TokenSeq code(size);
    for (size_t i = 0; i < size; ++i) code[i] = i % 8 == 7 ? ";" : "c" + std::to_string(i);
    if (size > 0) instance.code_artifacts.push_back({ArtifactKind::kBuggyCode, code, "E.java"});

    PipelineConfig config;
    config.chunk_limit = kCallCountLimit;
    config.snap = SnapPolicy::kNone;
    // Zero code tokens means M = 0; only report-only runs reach the provider then.
    config.condition = size == 0 ? InputCondition::kReportOnly : InputCondition::kReportPlusCode;
    CountingProvider provider;
    try {
      Pipeline(config, provider).Summarize(instance);
    } catch (const Error& e) {
      v.Require(false, "size " + std::to_string(size) + ": " + e.what());
      continue;
    }
    const size_t m = PlanChunks(code, kCallCountLimit, SnapPolicy::kNone).size();
    const size_t expected = (m > 1 ? m + 1 : std::min<size_t>(m, 1)) + 1;
    v.Require(provider.calls() == expected,
              "size " + std::to_string(size) + ": " + std::to_string(provider.calls()) +
                  " calls, expected " + std::to_string(expected));
    if (!observed.empty()) observed += ", ";
    observed += std::to_string(size) + "->" + std::to_string(provider.calls());
  }
  if (v.pass) v.detail = "calls " + observed + " at L=" + std::to_string(kCallCountLimit);
  return v;
}

std::map<std::string, std::string> CsvFiles(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".csv") out[entry.path().filename().string()] = ReadFile(entry.path());
  }
  return out;
}

Verdict HermeticBench() {
  Verdict v;
  const fs::path matrix_path = TestData("bench/matrix.json");
  ExperimentMatrix matrix = LoadMatrix(matrix_path);

  std::set<std::tuple<int, int, int, int>> combos;
  for (const MatrixCell& cell : matrix.cells) {
    v.Require(cell.config.provider.kind == ProviderKind::kMockExtractive,
              cell.label + " is not on the mock provider");
    combos.insert({static_cast<int>(cell.config.strategy.mode), cell.config.strategy.k,
                   static_cast<int>(cell.config.condition), static_cast<int>(cell.config.ordering)});
  }
  v.Require(combos.size() == 24, "matrix covers " + std::to_string(combos.size()) + " of 24 cells");

  TempDir first, second;
  const auto start = Clock::now();
  std::vector<std::map<std::string, std::string>> runs;
  for (const TempDir* dir : {&first, &second}) {
    matrix.output_dir = dir->path();
    const RunReport report = RunMatrix(matrix);
    for (const CellReport& cell : report.cells) {
      v.Require(!cell.failed, cell.label + " failed: " + cell.failure);
    }
    for (const char* table : {"table3.md", "table6.md", "summary.md"}) {
      try {
        const CsvTable t = ParseMarkdownTable(ReadFile(dir->path() / table));
        v.Require(!t.rows.empty(), std::string(table) + " has no rows");
      } catch (const Error& e) {
        v.Require(false, std::string(table) + ": " + e.what());
      }
    }
    runs.push_back(CsvFiles(dir->path()));
  }
  const double elapsed = Seconds(start);
  v.Require(runs[0].size() == matrix.cells.size(), "missing per-cell CSVs");
  v.Require(runs[0] == runs[1], "CSV outputs differ between runs");
  v.Require(elapsed < kBenchSeconds, "took " + Fmt("%.2f s", elapsed));
  if (v.pass) {
    v.detail = std::to_string(matrix.cells.size()) + " cells x 2 runs, " +
               std::to_string(runs[0].size()) + " identical CSVs, " + Fmt("%.2f s", elapsed);
  }
  return v;
}

Verdict ReplayExactness() {
  Verdict v;
  TempDir dir;
  std::string err;
  const int summarize = RunCliArgs(
      {"summarize", "--corpus", TestData("corpus5.jsonl").string(), "--condition",
       "report_plus_code", "--strategy", "few", "--exemplars", TestData("exemplars.jsonl").string(),
       "--provider", TestData("replay/provider.json").string(), "--out",
       (dir / "results.jsonl").string()},
      &err);
  v.Require(summarize == kExitOk, "summarize exited " + std::to_string(summarize) + ": " + err);
  if (!v.pass) return v;
  const int evaluate = RunCliArgs({"evaluate", "--results", (dir / "results.jsonl").string(),
                                   "--corpus", TestData("corpus5.jsonl").string(), "--out",
                                   (dir / "metrics.csv").string(), "--json",
                                   (dir / "metrics.json").string()},
                                  &err);
  v.Require(evaluate == kExitOk, "evaluate exited " + std::to_string(evaluate) + ": " + err);
  if (!v.pass) return v;
  v.Require(ReadFile(dir / "metrics.csv") == ReadFile(TestData("replay/expected_metrics.csv")),
            "metrics.csv differs from the committed report");
  v.Require(ReadFile(dir / "metrics.json") == ReadFile(TestData("replay/expected_metrics.json")),
            "metrics.json differs from the committed report");
  if (v.pass) v.detail = "CSV and JSON byte-identical, cache only";
  return v;
}

std::map<std::string, nlohmann::json> ReadRecords(const fs::path& path) {
  std::map<std::string, nlohmann::json> out;
  std::istringstream in(ReadFile(path));
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    nlohmann::json record = nlohmann::json::parse(line);
    const std::string id = record["bug_id"].get<std::string>();
    out[id] = std::move(record);
  }
  return out;
}

Verdict FinetuneExport() {
  Verdict v;
  TempDir dir;
  const fs::path corpus = TestData("finetune10.jsonl");
  std::string err;
  for (const auto& [variant, extra] :
       std::vector<std::pair<std::string, std::vector<std::string>>>{
           {"br", {}}, {"brcs", {"--provider", "mock"}}}) {
    std::vector<std::string> args = {"export-finetune", "--corpus", corpus.string(), "--variant",
                                     variant, "--out", (dir / (variant + ".jsonl")).string()};
    args.insert(args.end(), extra.begin(), extra.end());
    const int code = RunCliArgs(args, &err);
    v.Require(code == kExitOk, variant + " exited " + std::to_string(code) + ": " + err);
  }
  if (!v.pass) return v;

  // Same instances, different line order.
  std::vector<std::string> lines;
  {
    std::istringstream in(ReadFile(corpus));
    for (std::string line; std::getline(in, line);) {
      if (!line.empty()) lines.push_back(line);
    }
  }
  std::reverse(lines.begin(), lines.end());
  std::rotate(lines.begin(), lines.begin() + 3, lines.end());
  std::string shuffled;
  for (const std::string& line : lines) shuffled += line + "\n";
  WriteFileAtomic(dir / "shuffled.jsonl", shuffled);
  const int code = RunCliArgs({"export-finetune", "--corpus", (dir / "shuffled.jsonl").string(),
                               "--variant", "br", "--out", (dir / "br2.jsonl").string()},
                              &err);
  v.Require(code == kExitOk, "reordered export exited " + std::to_string(code) + ": " + err);
  if (!v.pass) return v;

  const auto br = ReadRecords(dir / "br.jsonl");
  const auto brcs = ReadRecords(dir / "brcs.jsonl");
  const auto reordered = ReadRecords(dir / "br2.jsonl");
  size_t valid = 0, with_code = 0;
  for (const auto& [id, record] : br) {
    valid += record["split"] == "valid";
    v.Require(reordered.count(id) && reordered.at(id)["split"] == record["split"],
              id + " changed split after reordering");
    v.Require(record["input"].get<std::string>().find("=== CODE SUMMARY ===") == std::string::npos,
              id + " br record has a code summary");
    v.Require(brcs.count(id) && brcs.at(id)["split"] == record["split"],
              id + " split differs between variants");
  }
  const Corpus loaded = LoadCorpus(corpus);
  for (const BugInstance& instance : loaded.instances) {
    if (instance.code_artifacts.empty()) continue;
    ++with_code;
    v.Require(brcs.at(instance.bug_id)["input"].get<std::string>().find("=== CODE SUMMARY ===") !=
                  std::string::npos,
              instance.bug_id + " brcs record lacks the code summary");
  }
  v.Require(br.size() == 10 && valid == 1,
            "split " + std::to_string(br.size() - valid) + "/" + std::to_string(valid));
  v.Require(with_code > 0, "fixture has no code-bearing instances");
  if (v.pass) {
    v.detail = "train 9 / valid 1, stable under reordering, " + std::to_string(with_code) +
               " brcs records with code summaries";
  }
  return v;
}

}  // namespace
}  // namespace bugbrief

int main() {
  using bugbrief::Verdict;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"metric-oracles", bugbrief::MetricOracles},
      {"bertscore-reductions", bugbrief::BertReductions},
      {"hand-derived-values", bugbrief::HandValues},
      {"chunking-laws", bugbrief::ChunkingLaws},
      {"pipeline-call-count", bugbrief::CallCountLaw},
      {"hermetic-bench", bugbrief::HermeticBench},
      {"replay-exactness", bugbrief::ReplayExactness},
      {"finetune-export", bugbrief::FinetuneExport},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict verdict;
    try {
      verdict = check();
    } catch (const std::exception& e) {
      verdict = {false, std::string("threw ") + e.what()};
    }
    std::printf("%s %s: %s\n", verdict.pass ? "PASS" : "FAIL", name.c_str(),
                verdict.detail.c_str());
    failures += !verdict.pass;
  }
  return failures == 0 ? 0 : 1;
}
