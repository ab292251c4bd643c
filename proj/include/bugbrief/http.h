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

// Minimal blocking HTTP(S) client shared by page fetching, chat completion
// and the remote embedder.

#ifndef BUGBRIEF_HTTP_H_
#define BUGBRIEF_HTTP_H_

#include <chrono>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bugbrief {

struct HttpUrl {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string path;    // includes query, never empty
};

// Throws Error("invalid_url").
HttpUrl ParseHttpUrl(std::string_view url);

struct HttpRequest {
  enum class Method { kGet, kPost };
  Method method = Method::kGet;
  std::string url;
  std::string body;
  std::string content_type = "application/json";
  std::vector<std::pair<std::string, std::string>> headers;
  std::chrono::milliseconds timeout{10000};
};

struct RetryPolicy {
  int max_attempts = 1;
  std::chrono::milliseconds backoff{250};  // multiplied by the attempt number
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Returns only 2xx responses. Failures: Error("network"), Error("timeout"),
// Error("http_status(<code>)"). Network errors, timeouts, 429 and 5xx are
// retried up to policy.max_attempts total attempts; other statuses are not.
HttpResponse SendHttp(const HttpRequest& request, const RetryPolicy& policy = {});

}  // namespace bugbrief

#endif  // BUGBRIEF_HTTP_H_
