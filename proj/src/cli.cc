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

#include "bugbrief/cli.h"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bugbrief/corpus.h"
#include "bugbrief/error.h"
#include "bugbrief/harness.h"
#include "bugbrief/io.h"
#include "bugbrief/metrics.h"
#include "bugbrief/pipeline.h"
#include "json.hpp"

namespace bugbrief {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Flags shared by every subcommand that drives the pipeline.
struct PipelineFlags {
  std::string corpus;
  std::vector<std::string> bug_ids;
  std::string strategy = "zero";
  std::optional<int> k;
  std::string condition = "report_only";
  std::string ordering = "report_first";
  size_t chunk_limit = kDefaultChunkLimit;
  std::string snap = "line";
  size_t report_cap = kDefaultReportCap;
  std::string provider = "mock";
  std::string cache_dir;
  std::string params;
  std::string exemplars;
  std::vector<std::string> exemplar_pool;
  std::string template_dir;
  size_t parallelism = 4;

  void Register(CLI::App* app, bool with_condition = true) {
    app->add_option("--corpus", corpus, "corpus JSONL")->required();
    app->add_option("--bug-id", bug_ids, "restrict to these bug ids");
    app->add_option("--strategy", strategy, "zero | one | few");
    app->add_option("--k", k, "number of worked examples");
    if (with_condition) {
      app->add_option("--condition", condition,
                      "report_only | report_plus_code | code_only | report_plus_patch");
      app->add_option("--ordering", ordering, "report_first | code_first");
    }
    app->add_option("--chunk-limit", chunk_limit, "max code tokens per chunk");
    app->add_option("--snap", snap, "none | line");
    app->add_option("--report-cap", report_cap, "report tokens kept in chunk prompts");
    app->add_option("--provider", provider, "mock | replay | provider config JSON");
    app->add_option("--cache-dir", cache_dir, "completion cache directory");
    app->add_option("--params", params, "decoding params as JSON text or a JSON file");
    app->add_option("--exemplars", exemplars, "corpus JSONL holding worked examples");
    app->add_option("--exemplar-pool", exemplar_pool, "exemplar bug ids in order")->delimiter(',');
    app->add_option("--template-dir", template_dir, "prompt template directory");
    app->add_option("--parallelism", parallelism, "instances summarized concurrently");
  }

  PipelineConfig Build(const std::optional<Corpus>& exemplar_corpus) const {
    PipelineConfig config;
    config.strategy.mode = ParsePromptMode(strategy);
    config.strategy.k = k.value_or(config.strategy.mode == PromptMode::kZeroShot  ? 0
                                   : config.strategy.mode == PromptMode::kOneShot ? 1
                                                                                  : kDefaultFewShotK);
    config.condition = ParseInputCondition(condition);
    config.ordering = ParseOrdering(ordering);
    config.chunk_limit = chunk_limit;
    config.snap = ParseSnapPolicy(snap);
    config.report_cap = report_cap;
    if (!params.empty()) {
      config.decoding = ParseDecodingParams(params.front() == '{' ? params : ReadFile(params));
    }
    config.provider = ResolveProviderConfig(provider);
    if (!cache_dir.empty()) config.provider.cache_dir = cache_dir;
    config.exemplar_pool = exemplar_pool;
    if (config.exemplar_pool.empty() && exemplar_corpus) {
      for (const BugInstance& instance : exemplar_corpus->instances) {
        config.exemplar_pool.push_back(instance.bug_id);
      }
    }
    if (!template_dir.empty()) config.templates = PromptTemplates::FromDirectory(template_dir);
    try {
      config.Validate();
    } catch (const UsageError&) {
      throw;
    } catch (const Error& e) {
      throw UsageError(e.code(), e.detail());
    }
    return config;
  }

  Corpus LoadSelected() const {
    Corpus loaded = LoadCorpus(corpus);
    if (bug_ids.empty()) return loaded;
    Corpus selected{loaded.name, {}, loaded.provenance};
    for (const std::string& id : bug_ids) {
      const BugInstance* instance = loaded.Find(id);
      if (instance == nullptr) throw Error("unknown_bug_id", id);
      selected.instances.push_back(*instance);
    }
    CanonicalizeCorpus(selected);
    return selected;
  }

  std::optional<Corpus> LoadExemplars() const {
    if (exemplars.empty()) return std::nullopt;
    return LoadCorpus(exemplars);
  }
};

void ReportFailures(const BatchResult& batch, std::ostream& err) {
  for (const BatchFailure& f : batch.failures) err << "failed " << f.bug_id << ": " << f.message << "\n";
}

int Ingest(const std::string& manifest_path, const std::string& defects4j, const std::string& out_path,
           std::ostream& out) {
  Corpus corpus;
  if (!defects4j.empty()) {
    corpus = LoadCorpus(defects4j, CorpusFormat::kDefects4jLayout);
  } else {
    const fs::path manifest_file(manifest_path);
    const fs::path base = manifest_file.parent_path();
    json manifest;
    try {
      manifest = json::parse(ReadFile(manifest_file));
    } catch (const json::exception& e) {
      throw UsageError("invalid_manifest", e.what());
    }
    try {
      corpus.name = manifest.value("name", manifest_file.stem().string());
      corpus.provenance = "ingest:" + manifest_file.filename().string();
      for (const json& entry : manifest.at("instances")) {
        const std::string bug_id = entry.at("bug_id").get<std::string>();
        std::vector<RawSource> sources;
        for (const json& s : entry.at("sources")) {
          if (s.contains("url")) {
            sources.push_back(FetchSource(bug_id, s["url"].get<std::string>()));
            continue;
          }
          RawSource raw;
          raw.bug_id = bug_id;
          raw.kind = ParseSourceKind(s.at("kind").get<std::string>());
          const fs::path path = base / s.at("path").get<std::string>();
          raw.content = ReadFile(path);
          raw.origin = s.at("path").get<std::string>();
          const std::string role = s.value("role", std::string("buggy"));
          if (role != "buggy" && role != "patch") throw UsageError("invalid_manifest", "role " + role);
          raw.role_hint = role == "patch" ? CodeRole::kPatch : CodeRole::kBuggy;
          sources.push_back(std::move(raw));
        }
        std::optional<std::string> reference;
        if (entry.contains("reference")) reference = entry["reference"].get<std::string>();
        if (entry.contains("reference_file")) {
          reference = ReadFile(base / entry["reference_file"].get<std::string>());
        }
        InstanceMetadata metadata;
        metadata.project = entry.value("project", std::string());
        if (entry.contains("tracker_url")) metadata.tracker_url = entry["tracker_url"].get<std::string>();
        corpus.instances.push_back(BuildInstance(bug_id, sources, reference, metadata));
      }
    } catch (const json::exception& e) {
      throw UsageError("invalid_manifest", e.what());
    }
    CanonicalizeCorpus(corpus);
  }
  SaveCorpus(corpus, out_path);
  out << "wrote " << corpus.instances.size() << " instances to " << out_path << "\n";
  return kExitOk;
}

int Summarize(const PipelineFlags& flags, const std::string& out_path, bool warm_only,
              std::ostream& out, std::ostream& err) {
  const Corpus corpus = flags.LoadSelected();
  const std::optional<Corpus> exemplars = flags.LoadExemplars();
  const PipelineConfig config = flags.Build(exemplars);
  std::unique_ptr<Provider> provider = MakeProvider(config.provider);
  const BatchResult batch =
      RunBatch(corpus, config, *provider, flags.parallelism, exemplars ? &*exemplars : nullptr);
  if (!out_path.empty()) WriteResultsJsonl(batch.results, out_path);
  if (warm_only) {
    const Provider::Stats stats = provider->stats();
    out << "live=" << stats.live << " cache=" << stats.cache << " mock=" << stats.mock << "\n";
  } else {
    for (const SummaryResult& result : batch.results) {
      out << result.bug_id << "\t" << Detokenize(result.final_summary) << "\n";
    }
  }
  ReportFailures(batch, err);
  return batch.failures.empty() ? kExitOk : kExitFailure;
}

int EvaluateCommand(const std::string& results_path, const std::string& corpus_path,
                    const std::vector<std::string>& metric_names, const std::string& embedder_spec,
                    double epsilon, const std::string& csv_path, const std::string& json_path,
                    std::ostream& out) {
  const MetricSet metrics =
      metric_names.empty() ? MetricSet{} : MetricSet::Parse(metric_names);
  const Corpus corpus = LoadCorpus(corpus_path);
  std::vector<std::pair<std::string, std::string>> summaries;
  for (const StoredResult& result : ReadResultsJsonl(results_path)) {
    summaries.emplace_back(result.bug_id, result.summary);
  }
  std::unique_ptr<Embedder> embedder;
  if (metrics.bert || metrics.sufficiency) embedder = MakeEmbedder(embedder_spec);
  const MetricReport report =
      Evaluate(MakeEvalPairs(summaries, corpus), {metrics, embedder.get(), epsilon});
  WriteFileAtomic(csv_path, MetricReportCsv(report));
  if (!json_path.empty()) WriteFileAtomic(json_path, MetricReportJson(report));
  out << "wrote " << csv_path << " (" << report.corpus.pairs << " pairs)\n";
  return kExitOk;
}

int Bench(const std::string& matrix_path, const std::string& output_dir, bool strict,
          std::ostream& out) {
  ExperimentMatrix matrix = LoadMatrix(matrix_path);
  if (!output_dir.empty()) matrix.output_dir = output_dir;
  const RunReport report = RunMatrix(matrix);
  out << SummaryTableMarkdown(report, matrix.metrics);
  out << "config_hash=" << report.config_hash << " live=" << report.sources.live
      << " cache=" << report.sources.cache << " mock=" << report.sources.mock << "\n";
  const bool any_failed = std::any_of(report.cells.begin(), report.cells.end(),
                                      [](const CellReport& c) { return c.failed; });
  return strict && any_failed ? kExitFailure : kExitOk;
}

int ExportFinetune(const PipelineFlags& flags, const std::string& variant_name,
                   const std::string& summaries_path, bool use_provider, const std::string& out_path,
                   std::ostream& out) {
  FinetuneVariant variant;
  if (variant_name == "br") {
    variant = FinetuneVariant::kBrOnly;
  } else if (variant_name == "brcs") {
    variant = FinetuneVariant::kBrPlusCs;
  } else {
    throw UsageError("invalid_variant", variant_name);
  }
  const Corpus corpus = flags.LoadSelected();
  std::map<std::string, TokenSeq> code_summaries;
  if (variant == FinetuneVariant::kBrPlusCs) {
    if (!summaries_path.empty()) {
      for (const StoredResult& result : ReadResultsJsonl(summaries_path)) {
        if (result.code_summary) code_summaries[result.bug_id] = Tokenize(*result.code_summary);
      }
    } else if (use_provider) {
      PipelineFlags code_flags = flags;
      code_flags.condition = "report_plus_code";
      code_flags.strategy = "zero";
      code_flags.k.reset();
      const PipelineConfig config = code_flags.Build(std::nullopt);
      std::unique_ptr<Provider> provider = MakeProvider(config.provider);
      const Pipeline pipeline(config, *provider);
      for (const BugInstance& instance : corpus.instances) {
        if (SelectArtifacts(instance, config.condition).empty()) continue;
        code_summaries[instance.bug_id] = pipeline.SummarizeCode(instance).summary;
      }
    } else {
      throw UsageError("missing_code_summaries", "brcs needs --code-summaries or --provider");
    }
  }
  const std::vector<FinetuneRecord> records = ExportFinetuneDataset(corpus, variant, code_summaries);
  WriteFinetuneJsonl(records, out_path);
  size_t valid = 0;
  for (const FinetuneRecord& r : records) valid += r.split == Split::kValid;
  out << "train=" << records.size() - valid << " valid=" << valid << "\n";
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Code-aware bug report summarization", "bugbrief"};
  app.require_subcommand(1);

  std::string manifest, defects4j, ingest_out;
  CLI::App* ingest = app.add_subcommand("ingest", "build a corpus JSONL from raw sources");
  auto* manifest_opt = ingest->add_option("--manifest", manifest, "sources manifest JSON");
  auto* d4j_opt = ingest->add_option("--defects4j", defects4j, "Defects4J-style directory");
  manifest_opt->excludes(d4j_opt);
  ingest->add_option("--out", ingest_out, "output corpus JSONL")->required();

  PipelineFlags summarize_flags;
  std::string summarize_out;
  CLI::App* summarize = app.add_subcommand("summarize", "summarize one instance or a corpus");
  summarize_flags.Register(summarize);
  summarize->add_option("--out", summarize_out, "results JSONL");

  PipelineFlags warm_flags;
  std::string warm_out;
  CLI::App* warm = app.add_subcommand("warm-cache", "fill the completion cache for a corpus");
  warm_flags.Register(warm);
  warm->add_option("--out", warm_out, "results JSONL");

  std::string results, eval_corpus, csv_out = "metrics.csv", json_out, embedder = "hashed";
  std::vector<std::string> metric_names;
  double epsilon = kDefaultSufficiencyEpsilon;
  CLI::App* evaluate = app.add_subcommand("evaluate", "score results against references");
  evaluate->add_option("--results", results, "results JSONL")->required();
  evaluate->add_option("--corpus", eval_corpus, "corpus JSONL with references")->required();
  evaluate->add_option("--metrics", metric_names, "rouge1,rouge2,rougeL,bert,sufficiency")
      ->delimiter(',');
  evaluate->add_option("--embedder", embedder, "onehot | hashed | remote embedder JSON");
  evaluate->add_option("--epsilon", epsilon, "sufficiency threshold");
  evaluate->add_option("--out", csv_out, "metrics CSV");
  evaluate->add_option("--json", json_out, "metrics JSON");

  std::string matrix_path, bench_out;
  bool strict = false;
  CLI::App* bench = app.add_subcommand("bench", "run an experiment matrix");
  bench->add_option("matrix", matrix_path, "matrix JSON")->required();
  bench->add_option("--output-dir", bench_out, "overrides the matrix output_dir");
  bench->add_flag("--strict", strict, "exit 2 when any cell failed");

  PipelineFlags export_flags;
  std::string variant, code_summaries, export_out;
  CLI::App* export_cmd = app.add_subcommand("export-finetune", "write a fine-tuning dataset");
  export_flags.Register(export_cmd, /*with_condition=*/false);
  export_cmd->add_option("--variant", variant, "br | brcs")->required();
  export_cmd->add_option("--code-summaries", code_summaries, "results JSONL with code summaries");
  export_cmd->add_option("--out", export_out, "output JSONL")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  }

  try {
    if (*ingest) {
      if (manifest.empty() && defects4j.empty()) {
        throw UsageError("missing_input", "ingest needs --manifest or --defects4j");
      }
      return Ingest(manifest, defects4j, ingest_out, out);
    }
    if (*summarize) return Summarize(summarize_flags, summarize_out, false, out, err);
    if (*warm) return Summarize(warm_flags, warm_out, true, out, err);
    if (*evaluate) {
      return EvaluateCommand(results, eval_corpus, metric_names, embedder, epsilon, csv_out,
                             json_out, out);
    }
    if (*bench) return Bench(matrix_path, bench_out, strict, out);
    if (*export_cmd) {
      const bool use_provider = export_cmd->count("--provider") > 0;
      return ExportFinetune(export_flags, variant, code_summaries, use_provider, export_out, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace bugbrief
