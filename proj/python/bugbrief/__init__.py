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

"""Python bindings for the bugbrief summarization core."""

from ._bugbrief import (
    BugbriefError,
    bert_score,
    detokenize,
    metric_tokens,
    mock_summarize,
    plan_chunks,
    rouge_l,
    rouge_n,
    run_cli,
    semantic_sufficiency,
    tokenize,
)

__all__ = [
    "BugbriefError",
    "bert_score",
    "detokenize",
    "metric_tokens",
    "mock_summarize",
    "plan_chunks",
    "rouge_l",
    "rouge_n",
    "run_cli",
    "semantic_sufficiency",
    "tokenize",
]
