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

#include "bugbrief/harness.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "bugbrief/error.h"
#include "bugbrief/hash.h"
#include "bugbrief/io.h"
#include "json.hpp"

namespace bugbrief {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

fs::path Resolve(const fs::path& base, const std::string& value) {
  const fs::path path(value);
  return path.is_relative() && !base.empty() ? base / path : path;
}

std::string Fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

std::string UtcNow() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ProviderConfig CellProvider(const json& cell, const fs::path& base_dir) {
  const std::string spec = cell.value("provider", std::string("mock"));
  if (spec == "mock" || spec == "replay") return ResolveProviderConfig(spec);
  const fs::path path = Resolve(base_dir, spec);
  if (!fs::exists(path)) throw UsageError("unknown_provider", path.string());
  return ResolveProviderConfig(path.string());
}

PipelineConfig CellConfig(const json& cell, const json& matrix, const fs::path& base_dir,
                          const std::optional<PromptTemplates>& templates) {
  PipelineConfig config;
  config.strategy.mode = ParsePromptMode(cell.at("strategy").get<std::string>());
  const int default_k = config.strategy.mode == PromptMode::kZeroShot  ? 0
                        : config.strategy.mode == PromptMode::kOneShot ? 1
                                                                       : kDefaultFewShotK;
  config.strategy.k = cell.value("k", default_k);
  config.condition = ParseInputCondition(cell.at("condition").get<std::string>());
  config.ordering = ParseOrdering(cell.value("ordering", std::string("report_first")));
  config.chunk_limit = cell.value("chunk_limit", kDefaultChunkLimit);
  config.snap = ParseSnapPolicy(cell.value("snap", std::string("line")));
  config.report_cap = cell.value("report_cap", kDefaultReportCap);
  config.aggregate_token_cap = cell.value("aggregate_token_cap", config.aggregate_token_cap);
  if (cell.contains("decoding")) config.decoding = ParseDecodingParams(cell["decoding"].dump());
  config.provider = CellProvider(cell, base_dir);
  if (cell.contains("exemplar_pool")) {
    config.exemplar_pool = cell["exemplar_pool"].get<std::vector<std::string>>();
  } else if (matrix.contains("exemplar_pool")) {
    config.exemplar_pool = matrix["exemplar_pool"].get<std::vector<std::string>>();
  }
  if (templates) config.templates = *templates;
  config.Validate();
  return config;
}

const PRF* Headline(const MetricReport& report, const MetricSet& metrics) {
  const CorpusMetrics& c = report.corpus;
  if (metrics.bert) return &c.bert;
  if (metrics.rouge1) return &c.rouge1;
  if (metrics.rouge2) return &c.rouge2;
  if (metrics.rougeL) return &c.rougeL;
  return nullptr;
}

std::string HeadlineName(const MetricSet& metrics) {
  if (metrics.bert) return "BERTScore";
  if (metrics.rouge1) return "ROUGE-1";
  if (metrics.rouge2) return "ROUGE-2";
  if (metrics.rougeL) return "ROUGE-L";
  return "none";
}

std::string Row(const std::vector<std::string>& cells) {
  std::string line = "|";
  for (const std::string& cell : cells) line += " " + cell + " |";
  return line + "\n";
}

std::string Rule(size_t columns) {
  std::string line = "|";
  for (size_t i = 0; i < columns; ++i) line += "---|";
  return line + "\n";
}

// Rows keyed by (model, strategy), columns by one config attribute.
template <typename Key>
std::string PivotTable(const RunReport& report, const MetricSet& metrics, const std::string& title,
                       const std::vector<std::pair<Key, std::string>>& columns,
                       const std::function<bool(const PipelineConfig&)>& include,
                       const std::function<Key(const PipelineConfig&)>& column_of) {
  using RowKey = std::tuple<std::string, int, int>;  // model, mode, k
  std::map<RowKey, std::map<Key, const CellReport*>> table;
  for (const CellReport& cell : report.cells) {
    if (!include(cell.config)) continue;
    const RowKey key{cell.config.provider.model_id, static_cast<int>(cell.config.strategy.mode),
                     cell.config.strategy.k};
    table[key].emplace(column_of(cell.config), &cell);
  }

  std::string out = "# " + title + " (" + HeadlineName(metrics) + ")\n\n";
  std::vector<std::string> header{"model", "strategy"};
  for (const auto& [key, name] : columns) {
    for (std::string_view part : {" P", " R", " F1"}) header.push_back(name + std::string(part));
  }
  out += Row(header);
  out += Rule(header.size());
  for (const auto& [key, by_column] : table) {
    const auto& [model, mode, k] = key;
    std::vector<std::string> row{
        model, std::string(ToString(static_cast<PromptMode>(mode))) + " k=" + std::to_string(k)};
    for (const auto& [column, name] : columns) {
      auto it = by_column.find(column);
      if (it == by_column.end()) {
        row.insert(row.end(), {"-", "-", "-"});
        continue;
      }
      const CellReport& cell = *it->second;
      const PRF* prf = cell.metrics ? Headline(*cell.metrics, metrics) : nullptr;
      if (cell.failed || prf == nullptr) {
        row.insert(row.end(), {"FAILED", "FAILED", "FAILED"});
      } else {
        row.insert(row.end(), {Fixed(prf->precision), Fixed(prf->recall), Fixed(prf->f1)});
      }
    }
    out += Row(row);
  }
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

ordered_json StatsJson(const Provider::Stats& stats) {
  return {{"live", stats.live}, {"cache", stats.cache}, {"mock", stats.mock}};
}

}  // namespace

bool IsValidLabel(std::string_view label) {
  if (label.empty() || label == "." || label == "..") return false;
  return std::all_of(label.begin(), label.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

ExperimentMatrix ParseMatrix(std::string_view json_text, const fs::path& base_dir) {
  json in;
  try {
    in = json::parse(json_text);
  } catch (const json::exception& e) {
    throw UsageError("invalid_matrix", e.what());
  }
  ExperimentMatrix matrix;
  try {
    matrix.corpus = Resolve(base_dir, in.at("corpus").get<std::string>());
    matrix.output_dir = Resolve(base_dir, in.value("output_dir", std::string("bench-out")));
    if (in.contains("exemplar_corpus")) {
      matrix.exemplar_corpus = Resolve(base_dir, in["exemplar_corpus"].get<std::string>());
    }
    if (in.contains("metrics")) {
      matrix.metrics = MetricSet::Parse(in["metrics"].get<std::vector<std::string>>());
    }
    matrix.embedder = in.value("embedder", matrix.embedder);
    if (matrix.embedder != "onehot" && matrix.embedder != "hashed") {
      matrix.embedder = Resolve(base_dir, matrix.embedder).string();
    }
    matrix.epsilon = in.value("epsilon", matrix.epsilon);
    matrix.parallelism = in.value("parallelism", matrix.parallelism);
    if (matrix.parallelism == 0) throw UsageError("invalid_matrix", "parallelism must be >= 1");

    std::optional<PromptTemplates> templates;
    if (in.contains("templates")) {
      templates = PromptTemplates::FromDirectory(Resolve(base_dir, in["templates"].get<std::string>()));
    }
    const json& cells = in.at("cells");
    if (!cells.is_array() || cells.empty()) throw UsageError("invalid_matrix", "no cells");
    std::set<std::string> labels;
    for (const json& cell : cells) {
      MatrixCell parsed;
      parsed.label = cell.at("label").get<std::string>();
      if (!IsValidLabel(parsed.label)) throw UsageError("invalid_label", parsed.label);
      if (!labels.insert(parsed.label).second) throw UsageError("duplicate_label", parsed.label);
      try {
        parsed.config = CellConfig(cell, in, base_dir, templates);
      } catch (const UsageError&) {
        throw;
      } catch (const Error& e) {
        throw UsageError("invalid_matrix", parsed.label + ": " + e.what());
      }
      matrix.cells.push_back(std::move(parsed));
    }
  } catch (const json::exception& e) {
    throw UsageError("invalid_matrix", e.what());
  }
  return matrix;
}

ExperimentMatrix LoadMatrix(const fs::path& path) {
  return ParseMatrix(ReadFile(path), path.parent_path());
}

std::string MatrixConfigHash(const ExperimentMatrix& matrix) {
  json cells = json::array();
  for (const MatrixCell& cell : matrix.cells) {
    cells.push_back({{"label", cell.label}, {"config", json::parse(PipelineConfigJson(cell.config))}});
  }
  return Sha256Hex(cells.dump());
}

RunReport RunMatrix(const ExperimentMatrix& matrix) {
  const Corpus corpus = LoadCorpus(matrix.corpus);
  if (corpus.instances.empty()) throw Error("empty_corpus", matrix.corpus.string());
  std::optional<Corpus> exemplars;
  if (matrix.exemplar_corpus) exemplars = LoadCorpus(*matrix.exemplar_corpus);
  std::unique_ptr<Embedder> embedder;
  if (matrix.metrics.bert || matrix.metrics.sufficiency) embedder = MakeEmbedder(matrix.embedder);

  RunReport report;
  report.config_hash = MatrixConfigHash(matrix);
  report.started_at = UtcNow();
  fs::create_directories(matrix.output_dir);

  for (const MatrixCell& cell : matrix.cells) {
    CellReport out;
    out.label = cell.label;
    out.config = cell.config;
    PipelineConfig config = cell.config;
    if (config.exemplar_pool.empty() && exemplars) {
      for (const BugInstance& instance : exemplars->instances) {
        config.exemplar_pool.push_back(instance.bug_id);
      }
    }
    try {
      std::unique_ptr<Provider> provider = MakeProvider(config.provider);
      BatchResult batch = RunBatch(corpus, config, *provider, matrix.parallelism,
                                   exemplars ? &*exemplars : nullptr);
      out.sources = provider->stats();
      out.instance_failures = batch.failures;
      out.summarized = batch.results.size();
      WriteResultsJsonl(batch.results, matrix.output_dir / (cell.label + ".jsonl"));

      const bool replay_miss =
          std::any_of(batch.failures.begin(), batch.failures.end(),
                      [](const BatchFailure& f) { return f.code == "replay_miss"; });
      if (replay_miss) {
        out.failed = true;
        out.failure = "replay_miss";
      } else if (batch.results.empty()) {
        out.failed = true;
        out.failure = batch.failures.empty() ? "no_results" : batch.failures.front().code;
      } else {
        std::vector<std::pair<std::string, std::string>> summaries;
        for (const SummaryResult& result : batch.results) {
          summaries.emplace_back(result.bug_id, Detokenize(result.final_summary));
        }
        const std::vector<EvalPair> pairs = MakeEvalPairs(summaries, corpus);
        out.metrics = Evaluate(pairs, {matrix.metrics, embedder.get(), matrix.epsilon});
        WriteFileAtomic(matrix.output_dir / (cell.label + ".csv"), MetricReportCsv(*out.metrics));
        WriteFileAtomic(matrix.output_dir / (cell.label + ".json"),
                        MetricReportJson(*out.metrics));
      }
    } catch (const Error& e) {
      out.failed = true;
      out.failure = e.what();
    }
    report.sources.live += out.sources.live;
    report.sources.cache += out.sources.cache;
    report.sources.mock += out.sources.mock;
    report.cells.push_back(std::move(out));
  }

  report.finished_at = UtcNow();
  WriteFileAtomic(matrix.output_dir / "summary.md", SummaryTableMarkdown(report, matrix.metrics));
  WriteFileAtomic(matrix.output_dir / "table3.md", ConditionTableMarkdown(report, matrix.metrics));
  WriteFileAtomic(matrix.output_dir / "table6.md", OrderingTableMarkdown(report, matrix.metrics));
  WriteFileAtomic(matrix.output_dir / "run.json", RunReportJson(report));
  return report;
}

std::string SummaryTableMarkdown(const RunReport& report, const MetricSet& metrics) {
  std::vector<std::string> header{"cell", "strategy", "condition", "ordering", "status"};
  for (const std::string& name : metrics.Names()) {
    if (name == "sufficiency") {
      header.push_back("sufficiency d");
      continue;
    }
    for (std::string_view part : {" P", " R", " F1"}) header.push_back(name + std::string(part));
  }
  std::string out = Row(header) + Rule(header.size());
  for (const CellReport& cell : report.cells) {
    std::vector<std::string> row{cell.label,
                                 std::string(ToString(cell.config.strategy.mode)) +
                                     " k=" + std::to_string(cell.config.strategy.k),
                                 std::string(ToString(cell.config.condition)),
                                 std::string(ToString(cell.config.ordering)),
                                 cell.failed ? "FAILED" : "ok"};
    const CorpusMetrics* c = cell.metrics ? &cell.metrics->corpus : nullptr;
    auto add = [&](const PRF& prf) {
      if (c == nullptr) {
        row.insert(row.end(), {"FAILED", "FAILED", "FAILED"});
      } else {
        row.insert(row.end(), {Fixed(prf.precision), Fixed(prf.recall), Fixed(prf.f1)});
      }
    };
    const CorpusMetrics empty;
    const CorpusMetrics& m = c ? *c : empty;
    if (metrics.rouge1) add(m.rouge1);
    if (metrics.rouge2) add(m.rouge2);
    if (metrics.rougeL) add(m.rougeL);
    if (metrics.bert) add(m.bert);
    if (metrics.sufficiency) row.push_back(c ? Fixed(m.sufficiency_distance) : "FAILED");
    out += Row(row);
  }
  return out;
}

std::string ConditionTableMarkdown(const RunReport& report, const MetricSet& metrics) {
  const std::vector<std::pair<InputCondition, std::string>> columns{
      {InputCondition::kReportOnly, "report_only"},
      {InputCondition::kReportPlusCode, "report_plus_code"},
      {InputCondition::kCodeOnly, "code_only"},
      {InputCondition::kReportPlusPatch, "report_plus_patch"}};
  return PivotTable<InputCondition>(
      report, metrics, "Input condition, report first", columns,
      [](const PipelineConfig& c) {
        return c.ordering == Ordering::kReportFirst || !IncludesReport(c.condition) ||
               !IncludesCode(c.condition);
      },
      [](const PipelineConfig& c) { return c.condition; });
}

std::string OrderingTableMarkdown(const RunReport& report, const MetricSet& metrics) {
  const std::vector<std::pair<Ordering, std::string>> columns{
      {Ordering::kReportFirst, "report_first"}, {Ordering::kCodeFirst, "code_first"}};
  return PivotTable<Ordering>(
      report, metrics, "Ordering, report + buggy code", columns,
      [](const PipelineConfig& c) { return c.condition == InputCondition::kReportPlusCode; },
      [](const PipelineConfig& c) { return c.ordering; });
}

std::string RunReportJson(const RunReport& report) {
  ordered_json out;
  out["config_hash"] = report.config_hash;
  out["started_at"] = report.started_at;
  out["finished_at"] = report.finished_at;
  out["sources"] = StatsJson(report.sources);
  ordered_json cells = ordered_json::array();
  for (const CellReport& cell : report.cells) {
    ordered_json c;
    c["label"] = cell.label;
    c["status"] = cell.failed ? "FAILED" : "ok";
    if (cell.failed) c["failure"] = cell.failure;
    c["summarized"] = cell.summarized;
    c["sources"] = StatsJson(cell.sources);
    ordered_json failures = ordered_json::array();
    for (const BatchFailure& f : cell.instance_failures) {
      failures.push_back({{"bug_id", f.bug_id}, {"code", f.code}, {"message", f.message}});
    }
    c["instance_failures"] = std::move(failures);
    c["config"] = ordered_json::parse(PipelineConfigJson(cell.config));
    if (cell.metrics) c["metrics"] = ordered_json::parse(MetricReportJson(*cell.metrics));
    cells.push_back(std::move(c));
  }
  out["cells"] = std::move(cells);
  return out.dump(2) + "\n";
}

CsvTable ParseMarkdownTable(std::string_view text) {
  CsvTable table;
  bool in_table = false;
  bool saw_rule = false;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() != '|') {
      if (in_table) break;
      continue;
    }
    in_table = true;
    std::vector<std::string> cells;
    std::string_view rest = trimmed.substr(1);
    while (!rest.empty()) {
      const size_t bar = rest.find('|');
      if (bar == std::string_view::npos) throw Error("malformed_table", "unterminated row");
      cells.emplace_back(Trim(rest.substr(0, bar)));
      rest = rest.substr(bar + 1);
    }
    if (table.header.empty()) {
      table.header = std::move(cells);
    } else if (!saw_rule) {
      const bool rule = std::all_of(cells.begin(), cells.end(), [](const std::string& c) {
        return !c.empty() && c.find_first_not_of("-:") == std::string::npos;
      });
      if (!rule) throw Error("malformed_table", "missing separator row");
      saw_rule = true;
    } else {
      if (cells.size() != table.header.size()) throw Error("malformed_table", "ragged row");
      table.rows.push_back(std::move(cells));
    }
  }
  if (table.header.empty() || !saw_rule) throw Error("malformed_table", "no table found");
  return table;
}

}  // namespace bugbrief
