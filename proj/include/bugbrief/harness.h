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

// Experiment matrices: one JSON file names a corpus and a list of labeled
// pipeline configurations. Every cell runs against the same corpus and is
// scored with the same metrics; the outputs per cell are
//
//   <label>.jsonl   summaries
//   <label>.csv     MetricReport table
//   <label>.json    MetricReport
//
// plus summary.md (one row per cell), table3.md (strategy x condition
// under report-first ordering), table6.md (strategy x ordering for
// report + buggy code) and run.json.

#ifndef BUGBRIEF_HARNESS_H_
#define BUGBRIEF_HARNESS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bugbrief/metrics.h"
#include "bugbrief/pipeline.h"

namespace bugbrief {

inline constexpr int kDefaultFewShotK = 3;

struct MatrixCell {
  std::string label;  // [A-Za-z0-9_.-]+, unique within the matrix
  PipelineConfig config;
};

struct ExperimentMatrix {
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> exemplar_corpus;
  std::filesystem::path output_dir;
  std::vector<MatrixCell> cells;
  MetricSet metrics;
  std::string embedder = "hashed";
  double epsilon = kDefaultSufficiencyEpsilon;
  size_t parallelism = 4;
};

// Relative paths resolve against `base_dir`. Throws UsageError with code
// "invalid_matrix", "duplicate_label", "invalid_label" or
// "unknown_provider".
ExperimentMatrix ParseMatrix(std::string_view json_text, const std::filesystem::path& base_dir);
ExperimentMatrix LoadMatrix(const std::filesystem::path& path);

// Hash of every cell's label and semantic configuration. Insensitive to
// whitespace and key order in the matrix file.
std::string MatrixConfigHash(const ExperimentMatrix& matrix);

struct CellReport {
  std::string label;
  PipelineConfig config;
  bool failed = false;
  std::string failure;  // reason when failed
  std::optional<MetricReport> metrics;
  std::vector<BatchFailure> instance_failures;
  size_t summarized = 0;
  Provider::Stats sources;
};

struct RunReport {
  std::string config_hash;
  std::string started_at;
  std::string finished_at;
  std::vector<CellReport> cells;  // matrix order
  Provider::Stats sources;        // totals
};

// Cells run one after another. A cell fails when any instance hits a
// replay miss, when every instance fails, or when the cell cannot start.
// Throws Error("empty_corpus") before running anything.
RunReport RunMatrix(const ExperimentMatrix& matrix);

// Markdown renderers, also used by RunMatrix.
std::string SummaryTableMarkdown(const RunReport& report, const MetricSet& metrics);
std::string ConditionTableMarkdown(const RunReport& report, const MetricSet& metrics);
std::string OrderingTableMarkdown(const RunReport& report, const MetricSet& metrics);
std::string RunReportJson(const RunReport& report);

// Reads the first pipe table of a markdown document. Throws
// Error("malformed_table").
CsvTable ParseMarkdownTable(std::string_view text);

// File-system safe label check.
bool IsValidLabel(std::string_view label);

}  // namespace bugbrief

#endif  // BUGBRIEF_HARNESS_H_
