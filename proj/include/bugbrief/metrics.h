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

// Summary scoring: ROUGE-N, ROUGE-L, greedy-matching BERTScore and an
// input/summary embedding distance.
//
// ROUGE recall is the clipped overlap over the reference size, precision
// the same overlap over the candidate size. Corpus ("micro") ROUGE sums
// overlaps and reference sizes over all pairs before dividing.

#ifndef BUGBRIEF_METRICS_H_
#define BUGBRIEF_METRICS_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bugbrief/corpus.h"
#include "bugbrief/tokenizer.h"

namespace bugbrief {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  // f1 = 2PR / (P + R), or 0 when P + R = 0.
  static PRF From(double precision, double recall);
};

// Numerator and both denominators of one pair.
struct Overlap {
  std::uint64_t matched = 0;
  std::uint64_t candidate_total = 0;
  std::uint64_t reference_total = 0;

  PRF ToPrf() const;
};

// Throws Error("invalid_n") for n == 0. Sequences shorter than n score 0.
Overlap RougeNOverlap(std::span<const std::string> candidate, std::span<const std::string> reference,
                      size_t n);
PRF RougeN(std::span<const std::string> candidate, std::span<const std::string> reference,
           size_t n);

size_t LcsLength(std::span<const std::string> a, std::span<const std::string> b);
Overlap RougeLOverlap(std::span<const std::string> candidate,
                      std::span<const std::string> reference);
PRF RougeL(std::span<const std::string> candidate, std::span<const std::string> reference);

using TokenPair = std::pair<TokenSeq, TokenSeq>;  // (candidate, reference)

// 0 selects ROUGE-L; n >= 1 selects ROUGE-N.
inline constexpr size_t kRougeL = 0;

// Micro recall over all pairs. Throws Error("empty_pairs").
double CorpusRouge(std::span<const TokenPair> pairs, size_t n_or_l);

// Maps tokens to unit vectors. Implementations are safe for concurrent use.
// Vectors from one embedder may differ in length; missing trailing
// components are zero.
class Embedder {
 public:
  using Vector = std::vector<double>;

  virtual ~Embedder() = default;
  virtual std::vector<Vector> Embed(std::span<const std::string> tokens) const = 0;
  virtual std::string id() const = 0;
};

// Cosine of two unit-or-not vectors, zero-padded to the longer length.
double Cosine(const Embedder::Vector& a, const Embedder::Vector& b);

// One dimension per distinct token, assigned on first sight.
class OneHotEmbedder : public Embedder {
 public:
  std::vector<Vector> Embed(std::span<const std::string> tokens) const override;
  std::string id() const override { return "onehot"; }

 private:
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, size_t> vocab_;
};

// Character-trigram counts hashed into `dim` buckets with a seed, then
// normalized. Components are non-negative, so cosines lie in [0, 1].
class HashedNgramEmbedder : public Embedder {
 public:
  explicit HashedNgramEmbedder(size_t dim = 256, std::uint64_t seed = 0x5eed);
  std::vector<Vector> Embed(std::span<const std::string> tokens) const override;
  std::string id() const override;

 private:
  size_t dim_;
  std::uint64_t seed_;
};

struct RemoteEmbedderConfig {
  std::string endpoint;
  std::string model_id;
  std::string auth_env;
  std::chrono::milliseconds timeout{60000};
  int max_attempts = 3;
};

// POST {"model","input":[tokens]} and read {"data":[{"embedding":[...]}]}.
// One request per Embed call. Errors: "malformed_response", HTTP errors.
class RemoteEmbedder : public Embedder {
 public:
  explicit RemoteEmbedder(RemoteEmbedderConfig config) : config_(std::move(config)) {}
  std::vector<Vector> Embed(std::span<const std::string> tokens) const override;
  std::string id() const override { return "remote:" + config_.model_id; }

 private:
  RemoteEmbedderConfig config_;
};

// "onehot", "hashed", or a JSON file {"endpoint","model_id","auth_env"}.
std::unique_ptr<Embedder> MakeEmbedder(std::string_view spec);

// Greedy max-cosine matching. Negative cosines count as 0.
// Throws Error("empty_sequence").
PRF BertScore(std::span<const std::string> candidate, std::span<const std::string> reference,
              const Embedder& embedder);

inline constexpr double kDefaultSufficiencyEpsilon = 0.3;

struct Sufficiency {
  double distance = 0.0;  // 1 - cos of mean-pooled embeddings, in [0, 1]
  bool sufficient = false;
};

// Throws Error("empty_summary").
Sufficiency SemanticSufficiency(std::span<const std::string> input,
                                std::span<const std::string> summary, const Embedder& embedder,
                                double epsilon = kDefaultSufficiencyEpsilon);

// Input = report tokens then every code artifact's tokens, in metric form.
TokenSeq SufficiencyInput(const BugInstance& instance);

struct MetricSet {
  bool rouge1 = true;
  bool rouge2 = true;
  bool rougeL = true;
  bool bert = true;
  bool sufficiency = false;

  // Names: rouge1, rouge2, rougeL, bert, sufficiency. Throws
  // UsageError("unknown_metric").
  static MetricSet Parse(std::span<const std::string> names);
  std::vector<std::string> Names() const;
  bool operator==(const MetricSet&) const = default;
};

struct PairMetrics {
  PRF rouge1;
  PRF rouge2;
  PRF rougeL;
  PRF bert;
  double sufficiency_distance = 0.0;
};

struct CorpusMetrics {
  size_t pairs = 0;
  double rouge1_micro = 0.0;
  double rouge2_micro = 0.0;
  double rougeL_micro = 0.0;
  PRF rouge1;  // macro means from here on
  PRF rouge2;
  PRF rougeL;
  PRF bert;
  double sufficiency_distance = 0.0;
};

struct MetricReport {
  std::map<std::string, PairMetrics> per_pair;
  CorpusMetrics corpus;
  std::string embedder_id;
  MetricSet metrics;
};

struct EvalPair {
  std::string bug_id;
  TokenSeq candidate;  // metric tokens
  TokenSeq reference;
  TokenSeq input;      // for sufficiency; may be empty otherwise
};

struct EvalOptions {
  MetricSet metrics;
  const Embedder* embedder = nullptr;  // required for bert and sufficiency
  double epsilon = kDefaultSufficiencyEpsilon;
};

// Throws Error("empty_pairs"), Error("duplicate_bug_id"),
// Error("embedder_required").
MetricReport Evaluate(std::span<const EvalPair> pairs, const EvalOptions& options);

// Pairs (id, summary text) with the corpus references. Throws
// Error("missing_reference"), Error("unknown_bug_id").
std::vector<EvalPair> MakeEvalPairs(std::span<const std::pair<std::string, std::string>> summaries,
                                    const Corpus& corpus);

std::string MetricReportJson(const MetricReport& report);

// Header: bug_id then one column group per selected metric. Per-pair rows
// leave the micro columns empty; the last row is CORPUS. Values "%.6f".
std::string MetricReportCsv(const MetricReport& report);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
// Plain comma separation, no quoting. Throws Error("malformed_csv").
CsvTable ParseCsv(std::string_view text);

}  // namespace bugbrief

#endif  // BUGBRIEF_METRICS_H_
