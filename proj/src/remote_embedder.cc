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


#include <cmath>
#include <cstdlib>

#include "bugbrief/error.h"
#include "bugbrief/http.h"
#include "bugbrief/metrics.h"
#include "json.hpp"

namespace bugbrief {

std::vector<Embedder::Vector> RemoteEmbedder::Embed(std::span<const std::string> tokens) const {
  if (tokens.empty()) return {};
  HttpRequest request;
  request.method = HttpRequest::Method::kPost;
  request.url = config_.endpoint;
  request.timeout = config_.timeout;
  request.body = nlohmann::json{{"model", config_.model_id},
                                {"input", std::vector<std::string>(tokens.begin(), tokens.end())}}
                     .dump();
  if (!config_.auth_env.empty()) {
    const char* secret = std::getenv(config_.auth_env.c_str());
    if (secret == nullptr || *secret == '\0') throw Error("missing_api_key", config_.auth_env);
    request.headers.emplace_back("Authorization", std::string("Bearer ") + secret);
  }
  const HttpResponse response =
      SendHttp(request, RetryPolicy{config_.max_attempts, std::chrono::milliseconds(250)});

  std::vector<Vector> out;
  try {
    const auto body = nlohmann::json::parse(response.body);
    for (const auto& item : body.at("data")) {
      Vector v = item.at("embedding").get<Vector>();
      double norm = 0.0;
      for (double x : v) norm += x * x;
      norm = std::sqrt(norm);
      if (norm > 0.0) {
        for (double& x : v) x /= norm;
      }
      out.push_back(std::move(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed_response", e.what());
  }
  if (out.size() != tokens.size()) {
    throw Error("malformed_response", "expected " + std::to_string(tokens.size()) +
                                          " embeddings, got " + std::to_string(out.size()));
  }
  return out;
}

}  // namespace bugbrief
