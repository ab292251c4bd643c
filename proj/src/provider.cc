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

#include "bugbrief/provider.h"

#include <cstdlib>
#include <ctime>
#include <exception>
#include <mutex>
#include <semaphore>
#include <thread>
#include <vector>

#include "bugbrief/error.h"
#include "bugbrief/hash.h"
#include "bugbrief/io.h"
#include "bugbrief/sections.h"
#include "json.hpp"

namespace bugbrief {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json ParamsToJson(const DecodingParams& params) {
  json out;  // std::map backed: keys come out sorted
  out["max_new_tokens"] = params.max_new_tokens;
  out["temperature"] = params.temperature;
  out["repetition_penalty"] = params.repetition_penalty;
  if (params.top_k) out["top_k"] = *params.top_k;
  if (params.beam_width) out["beam_width"] = *params.beam_width;
  if (params.seed) out["seed"] = *params.seed;
  return out;
}

DecodingParams ParamsFromJson(const json& in) {
  if (!in.is_object()) throw UsageError("invalid_params", "params must be a JSON object");
  DecodingParams params;
  try {
    for (const auto& [key, value] : in.items()) {
      if (key == "max_new_tokens") {
        params.max_new_tokens = value.get<int>();
      } else if (key == "temperature") {
        params.temperature = value.get<double>();
      } else if (key == "top_k") {
        if (!value.is_null()) params.top_k = value.get<int>();
      } else if (key == "beam_width") {
        if (!value.is_null()) params.beam_width = value.get<int>();
      } else if (key == "repetition_penalty") {
        params.repetition_penalty = value.get<double>();
      } else if (key == "seed") {
        if (!value.is_null()) params.seed = value.get<std::int64_t>();
      } else {
        throw UsageError("invalid_params", "unknown field " + key);
      }
    }
  } catch (const json::exception& e) {
    throw UsageError("invalid_params", e.what());
  }
  return params;
}

std::string UtcNow() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

int CountTokens(std::string_view text) { return static_cast<int>(Tokenize(text).size()); }

bool IsSentenceEnd(std::string_view token) { return token == "." || token == "!" || token == "?"; }

class MockExtractiveProvider final : public Provider {
 public:
  explicit MockExtractiveProvider(const ProviderConfig& config)
      : model_id_(config.model_id), cache_(config.cache_dir), record_(!config.cache_dir.empty()) {}

  std::string_view model_id() const override { return model_id_; }

 protected:
  Completion DoComplete(const Prompt& prompt, const DecodingParams& params) override {
    Completion completion;
    completion.text = MockExtractiveText(prompt.body, params.max_new_tokens);
    completion.prompt_fingerprint = prompt.fingerprint;
    completion.model_id = model_id_;
    completion.params = params;
    completion.usage = {CountTokens(prompt.system_text) + CountTokens(prompt.body),
                        CountTokens(completion.text)};
    completion.source = CompletionSource::kMock;
    completion.cache_key = CacheKey(model_id_, prompt.fingerprint, params);
    if (record_) cache_.Store(completion);
    return completion;
  }

 private:
  std::string model_id_;
  CompletionCache cache_;
  bool record_;
};

class ReplayProvider final : public Provider {
 public:
  explicit ReplayProvider(const ProviderConfig& config)
      : model_id_(config.model_id), cache_(config.cache_dir) {}

  std::string_view model_id() const override { return model_id_; }

 protected:
  Completion DoComplete(const Prompt& prompt, const DecodingParams& params) override {
    const std::string key = CacheKey(model_id_, prompt.fingerprint, params);
    std::optional<Completion> hit = cache_.Lookup(key);
    if (!hit) throw Error("replay_miss", key);
    if (hit->prompt_fingerprint != prompt.fingerprint) throw Error("cache_corrupt", key);
    hit->source = CompletionSource::kCache;
    return *hit;
  }

 private:
  std::string model_id_;
  CompletionCache cache_;
};

class HttpChatProvider final : public Provider {
 public:
  explicit HttpChatProvider(const ProviderConfig& config)
      : config_(config), cache_(config.cache_dir), in_flight_(config.max_concurrent_requests) {}

  std::string_view model_id() const override { return config_.model_id; }

 protected:
  Completion DoComplete(const Prompt& prompt, const DecodingParams& params) override {
    const std::string key = CacheKey(config_.model_id, prompt.fingerprint, params);
    if (std::optional<Completion> hit = cache_.Lookup(key)) {
      if (hit->prompt_fingerprint != prompt.fingerprint) throw Error("cache_corrupt", key);
      hit->source = CompletionSource::kCache;
      return *hit;
    }

    HttpRequest request;
    request.method = HttpRequest::Method::kPost;
    request.url = *config_.endpoint;
    request.timeout = config_.timeout;
    request.body = RequestBody(prompt, params);
    if (!config_.auth_env.empty()) {
      const char* secret = std::getenv(config_.auth_env.c_str());
      if (secret == nullptr || *secret == '\0') throw Error("missing_api_key", config_.auth_env);
      request.headers.emplace_back("Authorization", std::string("Bearer ") + secret);
    }

    HttpResponse response;
    in_flight_.acquire();
    try {
      response = SendHttp(request, config_.retry);
    } catch (...) {
      in_flight_.release();
      throw;
    }
    in_flight_.release();

    Completion completion = ParseResponse(response.body, prompt);
    completion.prompt_fingerprint = prompt.fingerprint;
    completion.model_id = config_.model_id;
    completion.params = params;
    completion.source = CompletionSource::kLive;
    completion.cache_key = key;
    cache_.Store(completion);
    return completion;
  }

 private:
  std::string RequestBody(const Prompt& prompt, const DecodingParams& params) const {
    json body;
    body["model"] = config_.model_id;
    body["messages"] = json::array({{{"role", "system"}, {"content", prompt.system_text}},
                                    {{"role", "user"}, {"content", prompt.body}}});
    body["temperature"] = params.temperature;
    body["max_tokens"] = params.max_new_tokens;
    if (params.top_k) body["top_k"] = *params.top_k;
    if (params.beam_width) body["beam_width"] = *params.beam_width;
    if (params.repetition_penalty != 1.0) body["repetition_penalty"] = params.repetition_penalty;
    if (params.seed) body["seed"] = *params.seed;
    return body.dump();
  }

  static Completion ParseResponse(const std::string& text, const Prompt& prompt) {
    Completion completion;
    try {
      const json response = json::parse(text);
      const json& choice = response.at("choices").at(0);
      if (choice.contains("message")) {
        completion.text = choice.at("message").at("content").get<std::string>();
      } else {
        completion.text = choice.at("text").get<std::string>();
      }
      if (auto usage = response.find("usage"); usage != response.end() && usage->is_object()) {
        completion.usage.prompt_tokens = usage->value("prompt_tokens", 0);
        completion.usage.completion_tokens = usage->value("completion_tokens", 0);
      } else {
        completion.usage = {CountTokens(prompt.system_text) + CountTokens(prompt.body),
                            CountTokens(completion.text)};
      }
    } catch (const json::exception& e) {
      throw Error("malformed_response", e.what());
    }
    if (completion.text.empty()) throw Error("malformed_response", "empty completion text");
    return completion;
  }

  ProviderConfig config_;
  CompletionCache cache_;
  std::counting_semaphore<> in_flight_;
};

}  // namespace

void DecodingParams::Validate() const {
  if (max_new_tokens < 1) throw Error("invalid_params", "max_new_tokens must be >= 1");
  if (temperature < 0) throw Error("invalid_params", "temperature must be >= 0");
  if (top_k && *top_k < 1) throw Error("invalid_params", "top_k must be >= 1");
  if (beam_width && *beam_width < 1) throw Error("invalid_params", "beam_width must be >= 1");
  if (top_k && beam_width) throw Error("invalid_params", "top_k sampling and beam search are exclusive");
  if (repetition_penalty < 1.0) throw Error("invalid_params", "repetition_penalty must be >= 1");
}

std::string CanonicalParams(const DecodingParams& params) { return ParamsToJson(params).dump(); }

DecodingParams ParseDecodingParams(std::string_view json_text) {
  json in;
  try {
    in = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw UsageError("invalid_params", e.what());
  }
  DecodingParams params = ParamsFromJson(in);
  try {
    params.Validate();
  } catch (const Error& e) {
    throw UsageError(e.code(), e.detail());
  }
  return params;
}

std::string_view ToString(CompletionSource source) {
  switch (source) {
    case CompletionSource::kLive: return "live";
    case CompletionSource::kCache: return "cache";
    case CompletionSource::kMock: return "mock";
  }
  return "unknown";
}

std::string_view ToString(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::kHttpChat: return "http_chat";
    case ProviderKind::kReplay: return "replay";
    case ProviderKind::kMockExtractive: return "mock_extractive";
  }
  return "unknown";
}

void ProviderConfig::Validate() const {
  if (kind == ProviderKind::kHttpChat && !endpoint) {
    throw Error("invalid_provider_config", "http_chat requires an endpoint");
  }
  if (kind != ProviderKind::kHttpChat && endpoint) {
    throw Error("invalid_provider_config", "endpoint is only valid for http_chat");
  }
  if (endpoint) ParseHttpUrl(*endpoint);
  if (model_id.empty()) throw Error("invalid_provider_config", "model_id is empty");
  if (max_concurrent_requests < 1) {
    throw Error("invalid_provider_config", "max_concurrent_requests must be >= 1");
  }
  if (kind != ProviderKind::kMockExtractive && cache_dir.empty()) {
    throw Error("invalid_provider_config", "cache_dir is required");
  }
}

fs::path DefaultCacheDir() {
  const char* env = std::getenv("BUGBRIEF_CACHE_DIR");
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path(".bugbrief-cache");
}

ProviderConfig ParseProviderConfig(std::string_view json_text, const fs::path& base_dir) {
  ProviderConfig config;
  try {
    const json in = json::parse(json_text);
    const std::string kind = in.at("kind").get<std::string>();
    if (kind == "http_chat") {
      config.kind = ProviderKind::kHttpChat;
    } else if (kind == "replay") {
      config.kind = ProviderKind::kReplay;
    } else if (kind == "mock_extractive" || kind == "mock") {
      config.kind = ProviderKind::kMockExtractive;
    } else {
      throw UsageError("invalid_provider_config", "unknown kind " + kind);
    }
    if (in.contains("endpoint") && !in["endpoint"].is_null()) {
      config.endpoint = in["endpoint"].get<std::string>();
    }
    config.model_id = in.value("model_id", std::string(kMockModelId));
    config.auth_env = in.value("auth_env", std::string());
    if (in.contains("cache_dir")) {
      fs::path dir = in["cache_dir"].get<std::string>();
      config.cache_dir = dir.is_relative() && !base_dir.empty() ? base_dir / dir : dir;
    } else if (config.kind != ProviderKind::kMockExtractive) {
      config.cache_dir = DefaultCacheDir();
    }
    config.max_concurrent_requests = in.value("max_concurrent_requests", 4);
    if (in.contains("retry")) {
      const json& retry = in["retry"];
      config.retry.max_attempts = retry.value("count", config.retry.max_attempts);
      config.retry.backoff = std::chrono::milliseconds(
          retry.value("backoff_ms", static_cast<int>(config.retry.backoff.count())));
    }
    config.timeout = std::chrono::milliseconds(
        in.value("timeout_ms", static_cast<int>(config.timeout.count())));
  } catch (const json::exception& e) {
    throw UsageError("invalid_provider_config", e.what());
  }
  try {
    config.Validate();
  } catch (const Error& e) {
    throw UsageError(e.code(), e.detail());
  }
  return config;
}

ProviderConfig ResolveProviderConfig(std::string_view spec) {
  if (spec == "mock") return ProviderConfig{};
  if (spec == "replay") {
    ProviderConfig config;
    config.kind = ProviderKind::kReplay;
    config.cache_dir = DefaultCacheDir();
    return config;
  }
  const fs::path path(spec);
  if (!fs::exists(path)) throw UsageError("provider_not_found", std::string(spec));
  return ParseProviderConfig(ReadFile(path), path.parent_path());
}

std::string CacheKey(std::string_view model_id, std::string_view fingerprint,
                     const DecodingParams& params) {
  return Sha256HexOfParts({model_id, fingerprint, CanonicalParams(params)});
}

fs::path CompletionCache::PathFor(std::string_view key) const {
  return dir_ / (std::string(key) + ".json");
}

std::optional<Completion> CompletionCache::Lookup(std::string_view key) const {
  const fs::path path = PathFor(key);
  if (dir_.empty() || !fs::exists(path)) return std::nullopt;
  try {
    const json record = json::parse(ReadFile(path));
    Completion completion;
    completion.cache_key = record.at("key").get<std::string>();
    if (completion.cache_key != key) throw Error("cache_corrupt", path.string());
    completion.model_id = record.at("model_id").get<std::string>();
    completion.params = ParamsFromJson(record.at("params"));
    completion.prompt_fingerprint = record.at("prompt_fingerprint").get<std::string>();
    completion.text = record.at("text").get<std::string>();
    completion.usage.prompt_tokens = record.at("usage").at("prompt_tokens").get<int>();
    completion.usage.completion_tokens = record.at("usage").at("completion_tokens").get<int>();
    completion.source = CompletionSource::kCache;
    return completion;
  } catch (const json::exception& e) {
    throw Error("cache_corrupt", path.string() + ": " + e.what());
  }
}

void CompletionCache::Store(const Completion& completion) const {
  if (dir_.empty()) return;
  nlohmann::ordered_json record;
  record["key"] = completion.cache_key;
  record["model_id"] = completion.model_id;
  record["params"] = ParamsToJson(completion.params);
  record["prompt_fingerprint"] = completion.prompt_fingerprint;
  record["text"] = completion.text;
  record["usage"] = {{"prompt_tokens", completion.usage.prompt_tokens},
                     {"completion_tokens", completion.usage.completion_tokens}};
  record["created_at"] = UtcNow();
  WriteFileAtomic(PathFor(completion.cache_key), record.dump(2) + "\n");
}

Completion Provider::Complete(const Prompt& prompt, const DecodingParams& params) {
  params.Validate();
  if (prompt.body.empty()) throw Error("empty_prompt");
  Completion completion = DoComplete(prompt, params);
  switch (completion.source) {
    case CompletionSource::kLive: ++live_; break;
    case CompletionSource::kCache: ++cache_; break;
    case CompletionSource::kMock: ++mock_; break;
  }
  return completion;
}

Provider::Stats Provider::stats() const { return {live_.load(), cache_.load(), mock_.load()}; }

std::unique_ptr<Provider> MakeProvider(const ProviderConfig& config) {
  config.Validate();
  switch (config.kind) {
    case ProviderKind::kHttpChat: return std::make_unique<HttpChatProvider>(config);
    case ProviderKind::kReplay: return std::make_unique<ReplayProvider>(config);
    case ProviderKind::kMockExtractive: return std::make_unique<MockExtractiveProvider>(config);
  }
  throw Error("invalid_provider_config", "unknown kind");
}

Completion Complete(const Prompt& prompt, const DecodingParams& params,
                    const ProviderConfig& config) {
  return MakeProvider(config)->Complete(prompt, params);
}

std::size_t WarmCache(std::span<const Prompt> prompts, const DecodingParams& params,
                      const ProviderConfig& config) {
  if (config.kind != ProviderKind::kHttpChat) {
    throw Error("warm_cache_requires_http", std::string(ToString(config.kind)));
  }
  params.Validate();
  std::unique_ptr<Provider> provider = MakeProvider(config);

  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed) {
      const size_t i = next++;
      if (i >= prompts.size()) return;
      try {
        provider->Complete(prompts[i], params);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed = true;
      }
    }
  };
  const size_t thread_count =
      std::min(prompts.size(), static_cast<size_t>(config.max_concurrent_requests));
  {
    std::vector<std::jthread> threads;
    for (size_t t = 0; t < thread_count; ++t) threads.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  return provider->stats().live;
}

std::string MockExtractiveText(std::string_view body, int max_new_tokens) {
  std::vector<std::string> contents;
  const std::vector<Section> sections = ParseSections(body);
  const bool is_aggregate = !sections.empty() && sections.back().name == kManifestSection;
  if (is_aggregate) {
    contents = ParseAggregateParts(body);
  } else {
    size_t first = 0;
    for (size_t i = 0; i < sections.size(); ++i) {
      if (sections[i].name == kTargetSection) first = i + 1;
    }
    for (size_t i = first; i < sections.size(); ++i) {
      const std::string& name = sections[i].name;
      if (name == kExampleSection || name == kExampleSummarySection) continue;
      contents.push_back(sections[i].content);
    }
  }

  const size_t cap = static_cast<size_t>(std::max(1, max_new_tokens));
  TokenSeq out;
  for (const std::string& content : contents) {
    for (std::string& token : Tokenize(content)) {
      if (out.size() >= cap) break;
      const bool end = IsSentenceEnd(token);
      out.push_back(std::move(token));
      if (end) break;
    }
  }
  if (out.empty()) {
    TokenSeq all = Tokenize(body);
    if (all.size() > cap) all.resize(cap);
    out = std::move(all);
  }
  if (out.empty()) return "(empty)";
  return Detokenize(out);
}

}  // namespace bugbrief
