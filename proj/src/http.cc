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

#include "bugbrief/http.h"

#include <charconv>
#include <thread>

#include "bugbrief/error.h"
#include "httplib.h"

namespace bugbrief {
namespace {

bool IsRetryable(const Error& error) {
  if (error.code() == "network" || error.code() == "timeout") return true;
  return error.code() == "http_status(429)" || error.code().starts_with("http_status(5");
}

HttpResponse SendOnce(const HttpRequest& request, const HttpUrl& url) {
  httplib::Client client(url.scheme + "://" + url.host + ":" + std::to_string(url.port));
  client.set_connection_timeout(request.timeout);
  client.set_read_timeout(request.timeout);
  client.set_write_timeout(request.timeout);
  client.set_follow_location(true);

  httplib::Headers headers;
  for (const auto& [name, value] : request.headers) headers.emplace(name, value);

  httplib::Result result =
      request.method == HttpRequest::Method::kGet
          ? client.Get(url.path, headers)
          : client.Post(url.path, headers, request.body, request.content_type);
  if (!result) {
    const httplib::Error error = result.error();
    const std::string detail = request.url + ": " + httplib::to_string(error);
    if (error == httplib::Error::ConnectionTimeout || error == httplib::Error::Read) {
      throw Error("timeout", detail);
    }
    throw Error("network", detail);
  }
  if (result->status < 200 || result->status >= 300) {
    throw Error("http_status(" + std::to_string(result->status) + ")", request.url);
  }
  return {result->status, result->body};
}

}  // namespace

HttpUrl ParseHttpUrl(std::string_view url) {
  HttpUrl out;
  const size_t scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw Error("invalid_url", std::string(url));
  out.scheme = std::string(url.substr(0, scheme_end));
  if (out.scheme != "http" && out.scheme != "https") throw Error("invalid_url", std::string(url));
  std::string_view rest = url.substr(scheme_end + 3);
  const size_t path_start = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, path_start);
  out.path = path_start == std::string_view::npos ? "/" : std::string(rest.substr(path_start));
  if (out.path.front() != '/') out.path.insert(out.path.begin(), '/');
  if (const size_t hash = out.path.find('#'); hash != std::string::npos) out.path.resize(hash);
  if (authority.find('@') != std::string_view::npos) throw Error("invalid_url", std::string(url));

  out.port = out.scheme == "https" ? 443 : 80;
  const size_t colon = authority.rfind(':');
  if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    const std::string_view digits = authority.substr(colon + 1);
    int port = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || port <= 0 || port > 65535) {
      throw Error("invalid_url", std::string(url));
    }
    out.port = port;
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) throw Error("invalid_url", std::string(url));
  for (char c : authority) {
    if (std::isspace(static_cast<unsigned char>(c))) throw Error("invalid_url", std::string(url));
  }
  out.host = std::string(authority);
  return out;
}

HttpResponse SendHttp(const HttpRequest& request, const RetryPolicy& policy) {
  const HttpUrl url = ParseHttpUrl(request.url);
  const int attempts = std::max(1, policy.max_attempts);
  for (int attempt = 1;; ++attempt) {
    try {
      return SendOnce(request, url);
    } catch (const Error& error) {
      if (attempt >= attempts || !IsRetryable(error)) throw;
    }
    std::this_thread::sleep_for(policy.backoff * attempt);
  }
}

}  // namespace bugbrief
