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


#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "bugbrief/chunking.h"
#include "bugbrief/cli.h"
#include "bugbrief/corpus.h"
#include "bugbrief/error.h"
#include "bugbrief/metrics.h"
#include "bugbrief/pipeline.h"
#include "bugbrief/tokenizer.h"

namespace py = pybind11;

namespace {

using bugbrief::TokenSeq;

py::tuple ToTuple(const bugbrief::PRF& prf) {
  return py::make_tuple(prf.precision, prf.recall, prf.f1);
}

std::unique_ptr<bugbrief::Embedder> Embedder(const std::string& spec) {
  return bugbrief::MakeEmbedder(spec);
}

std::string MockSummarize(const std::string& corpus_path, const std::string& bug_id,
                          const std::string& condition, const std::string& ordering) {
  const bugbrief::Corpus corpus = bugbrief::LoadCorpus(corpus_path);
  const bugbrief::BugInstance* instance = corpus.Find(bug_id);
  if (instance == nullptr) throw bugbrief::Error("unknown_bug_id", bug_id);
  bugbrief::PipelineConfig config;
  config.condition = bugbrief::ParseInputCondition(condition);
  config.ordering = bugbrief::ParseOrdering(ordering);
  auto provider = bugbrief::MakeProvider(config.provider);
  const bugbrief::Pipeline pipeline(config, *provider);
  return bugbrief::Detokenize(pipeline.Summarize(*instance).final_summary);
}

std::tuple<int, std::string, std::string> RunCli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"bugbrief"};
  for (const std::string& arg : args) argv.push_back(arg.c_str());
  std::ostringstream out, err;
  const int code = bugbrief::RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

PYBIND11_MODULE(_bugbrief, m) {
  m.doc() = "Bug report summarization core";

  py::register_exception<bugbrief::Error>(m, "BugbriefError");

  m.def("tokenize",
        [](const std::string& text, bool keep_newlines) {
          return bugbrief::Tokenize(text, {keep_newlines});
        },
        py::arg("text"), py::arg("keep_newlines") = false);
  m.def("detokenize", [](const TokenSeq& tokens) { return bugbrief::Detokenize(tokens); });
  m.def("metric_tokens", &bugbrief::MetricTokens);

  m.def("plan_chunks",
        [](const TokenSeq& tokens, size_t limit, const std::string& snap) {
          const auto plan = bugbrief::PlanChunks(tokens, limit, bugbrief::ParseSnapPolicy(snap));
          std::vector<std::pair<size_t, size_t>> out;
          for (const auto& s : plan.segments) out.emplace_back(s.start, s.length);
          return out;
        },
        py::arg("tokens"), py::arg("limit"), py::arg("snap") = "none");

  m.def("rouge_n",
        [](const TokenSeq& cand, const TokenSeq& ref, size_t n) {
          return ToTuple(bugbrief::RougeN(cand, ref, n));
        },
        py::arg("candidate"), py::arg("reference"), py::arg("n"));
  m.def("rouge_l",
        [](const TokenSeq& cand, const TokenSeq& ref) {
          return ToTuple(bugbrief::RougeL(cand, ref));
        },
        py::arg("candidate"), py::arg("reference"));
  m.def("bert_score",
        [](const TokenSeq& cand, const TokenSeq& ref, const std::string& embedder) {
          return ToTuple(bugbrief::BertScore(cand, ref, *Embedder(embedder)));
        },
        py::arg("candidate"), py::arg("reference"), py::arg("embedder") = "hashed");
  m.def("semantic_sufficiency",
        [](const TokenSeq& input, const TokenSeq& summary, const std::string& embedder,
           double epsilon) {
          const auto s = bugbrief::SemanticSufficiency(input, summary, *Embedder(embedder), epsilon);
          return py::make_tuple(s.distance, s.sufficient);
        },
        py::arg("input"), py::arg("summary"), py::arg("embedder") = "hashed",
        py::arg("epsilon") = bugbrief::kDefaultSufficiencyEpsilon);

  m.def("mock_summarize", &MockSummarize, py::arg("corpus"), py::arg("bug_id"),
        py::arg("condition") = "report_only", py::arg("ordering") = "report_first");
  m.def("run_cli", &RunCli, py::arg("args"));
}
