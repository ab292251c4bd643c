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

#include "bugbrief/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "bugbrief/error.h"
#include "bugbrief/io.h"
#include "json.hpp"

namespace bugbrief {
namespace {

using nlohmann::ordered_json;

double Ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::map<std::string, std::uint64_t> NGramCounts(std::span<const std::string> tokens, size_t n) {
  std::map<std::string, std::uint64_t> counts;
  if (tokens.size() < n) return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (size_t j = i; j < i + n; ++j) {
      key += tokens[j];
      key += '\x1f';
    }
    ++counts[key];
  }
  return counts;
}

TokenSeq WithoutNewlines(TokenSeq tokens) {
  std::erase(tokens, std::string(kNewlineToken));
  return tokens;
}

double Norm(const Embedder::Vector& v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

Embedder::Vector MeanPool(const std::vector<Embedder::Vector>& vectors) {
  size_t dim = 0;
  for (const auto& v : vectors) dim = std::max(dim, v.size());
  Embedder::Vector mean(dim, 0.0);
  for (const auto& v : vectors) {
    for (size_t i = 0; i < v.size(); ++i) mean[i] += v[i];
  }
  if (!vectors.empty()) {
    for (double& x : mean) x /= static_cast<double>(vectors.size());
  }
  return mean;
}

void Normalize(Embedder::Vector& v) {
  const double norm = Norm(v);
  if (norm == 0.0) return;
  for (double& x : v) x /= norm;
}

std::uint64_t Fnv1a(std::uint64_t seed, std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string Fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

ordered_json PrfJson(const PRF& prf) {
  return {{"precision", prf.precision}, {"recall", prf.recall}, {"f1", prf.f1}};
}

}  // namespace

PRF PRF::From(double precision, double recall) {
  const double sum = precision + recall;
  return {precision, recall, sum > 0.0 ? 2.0 * precision * recall / sum : 0.0};
}

PRF Overlap::ToPrf() const {
  return PRF::From(Ratio(matched, candidate_total), Ratio(matched, reference_total));
}

Overlap RougeNOverlap(std::span<const std::string> candidate, std::span<const std::string> reference,
                      size_t n) {
  if (n == 0) throw Error("invalid_n", "n must be >= 1");
  Overlap out;
  out.candidate_total = candidate.size() >= n ? candidate.size() - n + 1 : 0;
  out.reference_total = reference.size() >= n ? reference.size() - n + 1 : 0;
  const auto cand = NGramCounts(candidate, n);
  for (const auto& [gram, count] : NGramCounts(reference, n)) {
    if (auto it = cand.find(gram); it != cand.end()) out.matched += std::min(count, it->second);
  }
  return out;
}

PRF RougeN(std::span<const std::string> candidate, std::span<const std::string> reference,
           size_t n) {
  return RougeNOverlap(candidate, reference, n).ToPrf();
}

size_t LcsLength(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

Overlap RougeLOverlap(std::span<const std::string> candidate,
                      std::span<const std::string> reference) {
  return {LcsLength(candidate, reference), candidate.size(), reference.size()};
}

PRF RougeL(std::span<const std::string> candidate, std::span<const std::string> reference) {
  return RougeLOverlap(candidate, reference).ToPrf();
}

double CorpusRouge(std::span<const TokenPair> pairs, size_t n_or_l) {
  if (pairs.empty()) throw Error("empty_pairs", "corpus ROUGE needs at least one pair");
  std::uint64_t matched = 0, total = 0;
  for (const auto& [candidate, reference] : pairs) {
    const Overlap o = n_or_l == kRougeL ? RougeLOverlap(candidate, reference)
                                        : RougeNOverlap(candidate, reference, n_or_l);
    matched += o.matched;
    total += o.reference_total;
  }
  return Ratio(matched, total);
}

double Cosine(const Embedder::Vector& a, const Embedder::Vector& b) {
  const double na = Norm(a), nb = Norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  double dot = 0.0;
  for (size_t i = 0, n = std::min(a.size(), b.size()); i < n; ++i) dot += a[i] * b[i];
  return dot / (na * nb);
}

std::vector<Embedder::Vector> OneHotEmbedder::Embed(std::span<const std::string> tokens) const {
  std::vector<size_t> ids;
  ids.reserve(tokens.size());
  {
    std::lock_guard lock(mu_);
    for (const std::string& token : tokens) {
      ids.push_back(vocab_.try_emplace(token, vocab_.size()).first->second);
    }
  }
  std::vector<Vector> out;
  out.reserve(ids.size());
  for (size_t id : ids) {
    Vector v(id + 1, 0.0);
    v[id] = 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

HashedNgramEmbedder::HashedNgramEmbedder(size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim_ == 0) throw Error("invalid_dimension", "dim must be >= 1");
}

std::string HashedNgramEmbedder::id() const {
  return "hashed-trigram-" + std::to_string(dim_) + "-" + std::to_string(seed_);
}

std::vector<Embedder::Vector> HashedNgramEmbedder::Embed(
    std::span<const std::string> tokens) const {
  std::vector<Vector> out;
  out.reserve(tokens.size());
  for (const std::string& token : tokens) {
    const std::string padded = "\x02" + token + "\x03";
    Vector v(dim_, 0.0);
    for (size_t i = 0; i + 3 <= padded.size(); ++i) {
      v[Fnv1a(seed_, std::string_view(padded).substr(i, 3)) % dim_] += 1.0;
    }
    Normalize(v);
    out.push_back(std::move(v));
  }
  return out;
}

std::unique_ptr<Embedder> MakeEmbedder(std::string_view spec) {
  if (spec == "onehot") return std::make_unique<OneHotEmbedder>();
  if (spec == "hashed") return std::make_unique<HashedNgramEmbedder>();
  if (!std::filesystem::is_regular_file(std::filesystem::path(spec))) {
    throw UsageError("invalid_embedder", "expected onehot, hashed or a config file: " +
                                             std::string(spec));
  }
  nlohmann::json in;
  try {
    in = nlohmann::json::parse(ReadFile(std::filesystem::path(spec)));
    RemoteEmbedderConfig config;
    config.endpoint = in.at("endpoint").get<std::string>();
    config.model_id = in.at("model_id").get<std::string>();
    config.auth_env = in.value("auth_env", std::string());
    config.timeout = std::chrono::milliseconds(in.value("timeout_ms", 60000));
    return std::make_unique<RemoteEmbedder>(std::move(config));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("invalid_embedder", std::string(spec) + ": " + e.what());
  }
}

PRF BertScore(std::span<const std::string> candidate, std::span<const std::string> reference,
              const Embedder& embedder) {
  if (candidate.empty() || reference.empty()) {
    throw Error("empty_sequence", candidate.empty() ? "candidate" : "reference");
  }
  const auto cand = embedder.Embed(candidate);
  const auto ref = embedder.Embed(reference);
  std::vector<double> best_for_cand(cand.size(), 0.0), best_for_ref(ref.size(), 0.0);
  for (size_t i = 0; i < cand.size(); ++i) {
    for (size_t j = 0; j < ref.size(); ++j) {
      const double sim = std::clamp(Cosine(cand[i], ref[j]), 0.0, 1.0);
      best_for_cand[i] = std::max(best_for_cand[i], sim);
      best_for_ref[j] = std::max(best_for_ref[j], sim);
    }
  }
  auto mean = [](const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
  };
  return PRF::From(mean(best_for_cand), mean(best_for_ref));
}

Sufficiency SemanticSufficiency(std::span<const std::string> input,
                                std::span<const std::string> summary, const Embedder& embedder,
                                double epsilon) {
  if (summary.empty()) throw Error("empty_summary", "");
  const double cos =
      std::clamp(Cosine(MeanPool(embedder.Embed(input)), MeanPool(embedder.Embed(summary))), 0.0,
                 1.0);
  const double d = 1.0 - cos;
  return {d, d <= epsilon};
}

TokenSeq SufficiencyInput(const BugInstance& instance) {
  TokenSeq input = instance.report_tokens;
  for (const CodeArtifact& artifact : instance.code_artifacts) {
    input.insert(input.end(), artifact.tokens.begin(), artifact.tokens.end());
  }
  return Lowercase(WithoutNewlines(std::move(input)));
}

MetricSet MetricSet::Parse(std::span<const std::string> names) {
  MetricSet set{false, false, false, false, false};
  for (const std::string& name : names) {
    if (name == "rouge1") set.rouge1 = true;
    else if (name == "rouge2") set.rouge2 = true;
    else if (name == "rougeL") set.rougeL = true;
    else if (name == "bert") set.bert = true;
    else if (name == "sufficiency") set.sufficiency = true;
    else throw UsageError("unknown_metric", name);
  }
  return set;
}

std::vector<std::string> MetricSet::Names() const {
  std::vector<std::string> names;
  if (rouge1) names.emplace_back("rouge1");
  if (rouge2) names.emplace_back("rouge2");
  if (rougeL) names.emplace_back("rougeL");
  if (bert) names.emplace_back("bert");
  if (sufficiency) names.emplace_back("sufficiency");
  return names;
}

MetricReport Evaluate(std::span<const EvalPair> pairs, const EvalOptions& options) {
  if (pairs.empty()) throw Error("empty_pairs", "nothing to evaluate");
  const MetricSet& set = options.metrics;
  if ((set.bert || set.sufficiency) && options.embedder == nullptr) {
    throw Error("embedder_required", "bert and sufficiency need an embedder");
  }

  MetricReport report;
  report.metrics = set;
  report.embedder_id = options.embedder ? options.embedder->id() : "";
  Overlap r1, r2, rl;
  PairMetrics sum;
  for (const EvalPair& pair : pairs) {
    PairMetrics m;
    const Overlap o1 = RougeNOverlap(pair.candidate, pair.reference, 1);
    const Overlap o2 = RougeNOverlap(pair.candidate, pair.reference, 2);
    const Overlap ol = RougeLOverlap(pair.candidate, pair.reference);
    m.rouge1 = o1.ToPrf();
    m.rouge2 = o2.ToPrf();
    m.rougeL = ol.ToPrf();
    for (auto [total, o] : {std::pair{&r1, o1}, std::pair{&r2, o2}, std::pair{&rl, ol}}) {
      total->matched += o.matched;
      total->reference_total += o.reference_total;
      total->candidate_total += o.candidate_total;
    }
    try {
      if (set.bert) m.bert = BertScore(pair.candidate, pair.reference, *options.embedder);
      if (set.sufficiency) {
        m.sufficiency_distance =
            SemanticSufficiency(pair.input, pair.candidate, *options.embedder, options.epsilon)
                .distance;
      }
    } catch (const Error& e) {
      throw Error(e.code(), pair.bug_id + ": " + e.detail());
    }
    if (!report.per_pair.emplace(pair.bug_id, m).second) {
      throw Error("duplicate_bug_id", pair.bug_id);
    }
    for (auto [total, v] : {std::pair{&sum.rouge1, m.rouge1}, std::pair{&sum.rouge2, m.rouge2},
                            std::pair{&sum.rougeL, m.rougeL}, std::pair{&sum.bert, m.bert}}) {
      total->precision += v.precision;
      total->recall += v.recall;
      total->f1 += v.f1;
    }
    sum.sufficiency_distance += m.sufficiency_distance;
  }

  const double n = static_cast<double>(pairs.size());
  auto mean = [n](const PRF& s) { return PRF{s.precision / n, s.recall / n, s.f1 / n}; };
  CorpusMetrics& c = report.corpus;
  c.pairs = pairs.size();
  c.rouge1_micro = Ratio(r1.matched, r1.reference_total);
  c.rouge2_micro = Ratio(r2.matched, r2.reference_total);
  c.rougeL_micro = Ratio(rl.matched, rl.reference_total);
  c.rouge1 = mean(sum.rouge1);
  c.rouge2 = mean(sum.rouge2);
  c.rougeL = mean(sum.rougeL);
  c.bert = mean(sum.bert);
  c.sufficiency_distance = sum.sufficiency_distance / n;
  return report;
}

std::vector<EvalPair> MakeEvalPairs(std::span<const std::pair<std::string, std::string>> summaries,
                                    const Corpus& corpus) {
  std::vector<EvalPair> pairs;
  pairs.reserve(summaries.size());
  for (const auto& [bug_id, text] : summaries) {
    const BugInstance* instance = corpus.Find(bug_id);
    if (instance == nullptr) throw Error("unknown_bug_id", bug_id);
    if (!instance->reference_summary) throw Error("missing_reference", bug_id);
    pairs.push_back({bug_id, MetricTokens(text),
                     Lowercase(WithoutNewlines(*instance->reference_summary)),
                     SufficiencyInput(*instance)});
  }
  return pairs;
}

std::string MetricReportJson(const MetricReport& report) {
  const MetricSet& set = report.metrics;
  auto pair_json = [&set](const PairMetrics& m) {
    ordered_json out = ordered_json::object();
    if (set.rouge1) out["rouge1"] = PrfJson(m.rouge1);
    if (set.rouge2) out["rouge2"] = PrfJson(m.rouge2);
    if (set.rougeL) out["rougeL"] = PrfJson(m.rougeL);
    if (set.bert) out["bert"] = PrfJson(m.bert);
    if (set.sufficiency) out["sufficiency_distance"] = m.sufficiency_distance;
    return out;
  };
  const CorpusMetrics& c = report.corpus;
  ordered_json corpus;
  corpus["pairs"] = c.pairs;
  if (set.rouge1) corpus["rouge1_micro"] = c.rouge1_micro;
  if (set.rouge2) corpus["rouge2_micro"] = c.rouge2_micro;
  if (set.rougeL) corpus["rougeL_micro"] = c.rougeL_micro;
  PairMetrics macro{c.rouge1, c.rouge2, c.rougeL, c.bert, c.sufficiency_distance};
  corpus["macro"] = pair_json(macro);

  ordered_json out;
  out["embedder_id"] = report.embedder_id;
  out["metrics"] = set.Names();
  out["corpus"] = std::move(corpus);
  ordered_json per_pair = ordered_json::object();
  for (const auto& [bug_id, m] : report.per_pair) per_pair[bug_id] = pair_json(m);
  out["per_pair"] = std::move(per_pair);
  return out.dump(2) + "\n";
}

std::string MetricReportCsv(const MetricReport& report) {
  const MetricSet& set = report.metrics;
  std::vector<std::string> header{"bug_id"};
  auto prf_cols = [&header](std::string_view name, bool micro) {
    for (std::string_view suffix : {"_p", "_r", "_f1"}) header.push_back(std::string(name) + std::string(suffix));
    if (micro) header.push_back(std::string(name) + "_micro");
  };
  if (set.rouge1) prf_cols("rouge1", true);
  if (set.rouge2) prf_cols("rouge2", true);
  if (set.rougeL) prf_cols("rougeL", true);
  if (set.bert) prf_cols("bert", false);
  if (set.sufficiency) header.emplace_back("sufficiency_d");

  auto row = [&set](std::string_view id, const PairMetrics& m, const CorpusMetrics* micro) {
    std::string line(id);
    auto add = [&line](const std::string& cell) { line += ',' + cell; };
    auto add_prf = [&add](const PRF& prf) {
      add(Fixed(prf.precision));
      add(Fixed(prf.recall));
      add(Fixed(prf.f1));
    };
    if (set.rouge1) {
      add_prf(m.rouge1);
      add(micro ? Fixed(micro->rouge1_micro) : "");
    }
    if (set.rouge2) {
      add_prf(m.rouge2);
      add(micro ? Fixed(micro->rouge2_micro) : "");
    }
    if (set.rougeL) {
      add_prf(m.rougeL);
      add(micro ? Fixed(micro->rougeL_micro) : "");
    }
    if (set.bert) add_prf(m.bert);
    if (set.sufficiency) add(Fixed(m.sufficiency_distance));
    return line + '\n';
  };

  std::string out;
  for (size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& [bug_id, m] : report.per_pair) out += row(bug_id, m, nullptr);
  const CorpusMetrics& c = report.corpus;
  out += row("CORPUS", {c.rouge1, c.rouge2, c.rougeL, c.bert, c.sufficiency_distance}, &c);
  return out;
}

CsvTable ParseCsv(std::string_view text) {
  CsvTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    size_t start = 0;
    while (true) {
      const size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (table.header.empty()) {
      table.header = std::move(cells);
    } else {
      if (cells.size() != table.header.size()) {
        throw Error("malformed_csv", "row has " + std::to_string(cells.size()) + " cells, header " +
                                         std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(cells));
    }
  }
  if (table.header.empty()) throw Error("malformed_csv", "no header");
  return table;
}

}  // namespace bugbrief
