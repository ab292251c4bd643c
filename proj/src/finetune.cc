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

#include <sstream>

#include "bugbrief/corpus.h"
#include "bugbrief/error.h"
#include "bugbrief/hash.h"
#include "bugbrief/io.h"
#include "bugbrief/sections.h"
#include "json.hpp"

namespace bugbrief {

namespace {
// Validation share, in percent.
constexpr std::uint64_t kValidPercent = 10;
}  // namespace

std::string_view ToString(Split split) { return split == Split::kTrain ? "train" : "valid"; }

Split AssignSplit(std::string_view bug_id) {
  return StableHash64(bug_id) % 100 < kValidPercent ? Split::kValid : Split::kTrain;
}

std::vector<FinetuneRecord> ExportFinetuneDataset(
    const Corpus& corpus, FinetuneVariant variant,
    const std::map<std::string, TokenSeq>& code_summaries) {
  std::vector<FinetuneRecord> records;
  records.reserve(corpus.instances.size());
  for (const BugInstance& instance : corpus.instances) {
    if (!instance.reference_summary) throw Error("missing_reference", instance.bug_id);

    std::string input;
    AppendSection(input, kBugReportSection, Detokenize(instance.report_tokens));
    if (variant == FinetuneVariant::kBrPlusCs) {
      auto it = code_summaries.find(instance.bug_id);
      if (it == code_summaries.end()) {
        if (!instance.code_artifacts.empty()) throw Error("missing_code_summary", instance.bug_id);
      } else {
        AppendSection(input, kCodeSummarySection, Detokenize(it->second));
      }
    }
    records.push_back({instance.bug_id, AssignSplit(instance.bug_id), std::move(input),
                       Detokenize(*instance.reference_summary)});
  }
  return records;
}

void WriteFinetuneJsonl(std::span<const FinetuneRecord> records,
                        const std::filesystem::path& path) {
  std::ostringstream out;
  for (const FinetuneRecord& record : records) {
    nlohmann::ordered_json line;
    line["bug_id"] = record.bug_id;
    line["split"] = ToString(record.split);
    line["input"] = record.input;
    line["target"] = record.target;
    out << line.dump() << '\n';
  }
  WriteFileAtomic(path, out.str());
}

}  // namespace bugbrief
