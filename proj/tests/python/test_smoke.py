# Copyright 2026 The BugBrief Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Smoke tests for the Python bindings."""

import json
import math
import os
import pathlib
import tempfile
import unittest

import bugbrief

TESTDATA = pathlib.Path(os.environ.get(
    "BUGBRIEF_TESTDATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "testdata"))


class TokenizerTest(unittest.TestCase):
    def test_round_trip(self):
        text = "HelpFormatter.wrap(int) fails: NPE at line 42."
        tokens = bugbrief.tokenize(text)
        self.assertIn("HelpFormatter", tokens)
        self.assertEqual(bugbrief.tokenize(bugbrief.detokenize(tokens)), tokens)

    def test_newlines_kept_for_code(self):
        self.assertIn("\n", bugbrief.tokenize("a;\nb;", keep_newlines=True))
        self.assertNotIn("\n", bugbrief.tokenize("a;\nb;"))

    def test_metric_tokens_lowercase(self):
        self.assertEqual(bugbrief.metric_tokens("Parser Crashes"), ["parser", "crashes"])


class MetricsTest(unittest.TestCase):
    REF = ["parser", "crashes", "on", "empty", "input"]
    CAND = ["parser", "crashes", "when", "input", "empty"]

    def test_rouge_hand_values(self):
        p, r, f = bugbrief.rouge_n(self.CAND, self.REF, 1)
        self.assertAlmostEqual(r, 0.8, places=12)
        self.assertAlmostEqual(bugbrief.rouge_n(self.CAND, self.REF, 2)[1], 0.25, places=12)
        self.assertAlmostEqual(
            bugbrief.rouge_l(["a", "c", "b", "d"], ["a", "b", "c", "d"])[1], 0.75, places=12)

    def test_bert_and_sufficiency(self):
        self.assertAlmostEqual(bugbrief.bert_score(["a", "b"], ["a", "c"], "onehot")[2], 0.5)
        self.assertAlmostEqual(bugbrief.bert_score(self.REF, self.REF)[2], 1.0, places=6)
        d, ok = bugbrief.semantic_sufficiency(["a", "b"], ["a"], "onehot", 0.3)
        self.assertAlmostEqual(d, 1 - 1 / math.sqrt(2), places=9)
        self.assertTrue(ok)

    def test_errors_raise(self):
        with self.assertRaises(bugbrief.BugbriefError):
            bugbrief.bert_score([], ["a"])


class ChunkingTest(unittest.TestCase):
    def test_plan(self):
        tokens = ["t"] * 2500
        plan = bugbrief.plan_chunks(tokens, 1024)
        self.assertEqual([length for _, length in plan], [1024, 1024, 452])
        self.assertEqual(bugbrief.plan_chunks([], 8), [])


class PipelineTest(unittest.TestCase):
    def test_mock_summary(self):
        corpus = str(TESTDATA / "corpus5.jsonl")
        first = bugbrief.mock_summarize(corpus, "Cli-3")
        self.assertTrue(first)
        self.assertEqual(first, bugbrief.mock_summarize(corpus, "Cli-3"))
        code = bugbrief.mock_summarize(corpus, "Csv-7", condition="report_plus_code")
        self.assertTrue(code)

    def test_cli(self):
        with tempfile.TemporaryDirectory() as tmp:
            out = os.path.join(tmp, "r.jsonl")
            code, stdout, _ = bugbrief.run_cli(
                ["summarize", "--corpus", str(TESTDATA / "corpus5.jsonl"), "--out", out])
            self.assertEqual(code, 0)
            self.assertEqual(len(stdout.splitlines()), 5)
            with open(out, encoding="utf-8") as f:
                self.assertEqual(json.loads(f.readline())["bug_id"], "Cli-3")
            self.assertEqual(bugbrief.run_cli(["no-such-command"])[0], 1)


if __name__ == "__main__":
    unittest.main()
