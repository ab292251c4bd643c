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

#include "bugbrief/corpus.h"
#include "bugbrief/error.h"
#include "bugbrief/http.h"

namespace bugbrief {

RawSource FetchSource(std::string bug_id, const std::string& url, const FetchOptions& options) {
  if (bug_id.empty()) throw Error("empty_bug_id");
  HttpRequest request;
  request.url = url;
  request.timeout = options.timeout;
  request.headers.emplace_back("Accept", "text/html,text/plain;q=0.9,*/*;q=0.5");
  HttpResponse response = SendHttp(request, {options.max_attempts, options.backoff});
  return {std::move(bug_id), SourceKind::kTrackerHtml, std::move(response.body), url};
}

}  // namespace bugbrief
