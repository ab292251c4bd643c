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

#include <algorithm>
#include <fstream>
#include <sstream>

#include "bugbrief/corpus.h"
#include "bugbrief/error.h"
#include "bugbrief/io.h"
#include "json.hpp"

namespace bugbrief {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::optional<std::string> OptionalString(const json& object, const char* key) {
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw Error("malformed_record", std::string(key) + " must be a string");
  return it->get<std::string>();
}

std::string RequiredString(const json& object, const char* key) {
  std::optional<std::string> value = OptionalString(object, key);
  if (!value) throw Error("malformed_record", std::string("missing ") + key);
  return *value;
}

TokenSeq TextTokens(const std::string& text) {
  if (!IsValidUtf8(text)) throw Error("malformed_record", "text is not valid UTF-8");
  return Tokenize(NormalizeNfc(text));
}

TokenSeq CodeTextTokens(const std::string& text) {
  if (!IsValidUtf8(text)) throw Error("malformed_record", "text is not valid UTF-8");
  return Tokenize(NormalizeNfc(text), {.keep_newlines = true});
}

std::string ProjectFromBugId(std::string_view bug_id) {
  const size_t dash = bug_id.find_last_of("-_");
  return std::string(dash == std::string_view::npos ? bug_id : bug_id.substr(0, dash));
}

std::vector<fs::path> SortedFiles(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".src") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

Corpus LoadJsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("file_not_found", path.string());
  Corpus corpus;
  corpus.name = path.stem().string();
  corpus.provenance = "instance_jsonl:" + path.string();
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      corpus.instances.push_back(InstanceFromJsonLine(line));
    } catch (const Error& e) {
      throw Error("malformed_record",
                  path.string() + ":" + std::to_string(line_number) + ": " +
                      (e.code() == "malformed_record" ? e.detail() : std::string(e.what())));
    }
  }
  CanonicalizeCorpus(corpus);
  return corpus;
}

Corpus LoadDefects4jLayout(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error("file_not_found", root.string());
  std::vector<fs::path> bug_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) bug_dirs.push_back(entry.path());
  }
  std::sort(bug_dirs.begin(), bug_dirs.end());

  Corpus corpus;
  corpus.name = root.filename().string();
  corpus.provenance = "defects4j_layout:" + root.string();
  for (const fs::path& dir : bug_dirs) {
    const std::string bug_id = dir.filename().string();
    const fs::path report = dir / "report.html";
    if (!fs::exists(report)) throw Error("malformed_record", dir.string() + ": missing report.html");

    std::vector<RawSource> sources;
    sources.push_back({bug_id, SourceKind::kTrackerHtml, ReadFile(report), "report.html"});
    for (const auto& [sub, role] :
         {std::pair{"buggy", CodeRole::kBuggy}, std::pair{"patch", CodeRole::kPatch}}) {
      for (const fs::path& file : SortedFiles(dir / sub)) {
        sources.push_back({bug_id, SourceKind::kCodeFile, ReadFile(file),
                           std::string(sub) + "/" + file.filename().string(), role});
      }
    }
    std::optional<std::string> reference;
    if (fs::exists(dir / "summary.txt")) reference = ReadFile(dir / "summary.txt");

    InstanceMetadata metadata{ProjectFromBugId(bug_id), std::nullopt};
    try {
      corpus.instances.push_back(BuildInstance(bug_id, sources, reference, metadata));
    } catch (const Error& e) {
      throw Error("malformed_record", dir.string() + ": " + e.what());
    }
  }
  CanonicalizeCorpus(corpus);
  return corpus;
}

}  // namespace

BugInstance InstanceFromJsonLine(std::string_view line) {
  json record;
  try {
    record = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error("malformed_record", e.what());
  }
  if (!record.is_object()) throw Error("malformed_record", "record is not an object");

  BugInstance instance;
  instance.bug_id = RequiredString(record, "bug_id");
  if (instance.bug_id.empty()) throw Error("malformed_record", "empty bug_id");
  instance.project = OptionalString(record, "project").value_or("");
  instance.report_tokens = TextTokens(RequiredString(record, "report_text"));
  if (instance.report_tokens.empty()) throw Error("malformed_record", "empty report_text");
  if (auto it = record.find("artifacts"); it != record.end() && !it->is_null()) {
    if (!it->is_array()) throw Error("malformed_record", "artifacts must be an array");
    for (const json& item : *it) {
      if (!item.is_object()) throw Error("malformed_record", "artifact is not an object");
      CodeArtifact artifact;
      artifact.kind = ParseArtifactKind(RequiredString(item, "kind"));
      artifact.tokens = CodeTextTokens(RequiredString(item, "text"));
      if (artifact.tokens.empty()) throw Error("malformed_record", "empty artifact text");
      artifact.source_path = OptionalString(item, "source_path");
      instance.code_artifacts.push_back(std::move(artifact));
    }
  }
  if (auto reference = OptionalString(record, "reference_summary")) {
    instance.reference_summary = TextTokens(*reference);
  }
  instance.tracker_url = OptionalString(record, "tracker_url");
  return instance;
}

std::string InstanceToJsonLine(const BugInstance& instance) {
  ordered_json record;
  record["bug_id"] = instance.bug_id;
  record["project"] = instance.project;
  record["report_text"] = Detokenize(instance.report_tokens);
  ordered_json artifacts = ordered_json::array();
  for (const CodeArtifact& artifact : instance.code_artifacts) {
    ordered_json item;
    item["kind"] = ToString(artifact.kind);
    item["text"] = Detokenize(artifact.tokens);
    item["source_path"] =
        artifact.source_path ? ordered_json(*artifact.source_path) : ordered_json(nullptr);
    artifacts.push_back(std::move(item));
  }
  record["artifacts"] = std::move(artifacts);
  record["reference_summary"] = instance.reference_summary
                                    ? ordered_json(Detokenize(*instance.reference_summary))
                                    : ordered_json(nullptr);
  record["tracker_url"] =
      instance.tracker_url ? ordered_json(*instance.tracker_url) : ordered_json(nullptr);
  return record.dump();
}

Corpus LoadCorpus(const fs::path& path, CorpusFormat format) {
  return format == CorpusFormat::kInstanceJsonl ? LoadJsonl(path) : LoadDefects4jLayout(path);
}

void SaveCorpus(const Corpus& corpus, const fs::path& path) {
  std::ostringstream out;
  for (const BugInstance& instance : corpus.instances) out << InstanceToJsonLine(instance) << '\n';
  WriteFileAtomic(path, out.str());
}

}  // namespace bugbrief
