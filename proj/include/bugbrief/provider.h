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

// Text-completion backends behind one interface, with a content-addressed
// record/replay cache.
//
//   kHttpChat        OpenAI-style chat endpoint; cache first, then live.
//   kReplay          cache only; a miss is an error ("replay_miss").
//   kMockExtractive  deterministic stand-in: the first sentence of every
//                    non-example section. Records to the cache when a
//                    cache_dir is configured.

#ifndef BUGBRIEF_PROVIDER_H_
#define BUGBRIEF_PROVIDER_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "bugbrief/http.h"
#include "bugbrief/prompting.h"

namespace bugbrief {

struct DecodingParams {
  int max_new_tokens = 256;
  double temperature = 0.0;  // 0 means greedy
  std::optional<int> top_k;
  std::optional<int> beam_width;
  double repetition_penalty = 1.0;
  std::optional<std::int64_t> seed;

  // Throws Error("invalid_params").
  void Validate() const;

  bool operator==(const DecodingParams&) const = default;
};

// JSON with sorted keys and unset optionals omitted. Independent of the
// field order the params were written in.
std::string CanonicalParams(const DecodingParams& params);

// Accepts a JSON object with any subset of the fields. Throws
// UsageError("invalid_params").
DecodingParams ParseDecodingParams(std::string_view json_text);

enum class CompletionSource { kLive, kCache, kMock };
std::string_view ToString(CompletionSource source);

struct Usage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct Completion {
  std::string text;
  std::string prompt_fingerprint;
  std::string model_id;
  DecodingParams params;
  Usage usage;
  CompletionSource source = CompletionSource::kMock;
  std::string cache_key;
};

enum class ProviderKind { kHttpChat, kReplay, kMockExtractive };
std::string_view ToString(ProviderKind kind);

inline constexpr std::string_view kMockModelId = "mock-extractive";

struct ProviderConfig {
  ProviderKind kind = ProviderKind::kMockExtractive;
  std::optional<std::string> endpoint;  // required iff kHttpChat
  std::string model_id = std::string(kMockModelId);
  std::string auth_env;                 // name of the API-key variable
  std::filesystem::path cache_dir;      // empty: mock does not record
  int max_concurrent_requests = 4;
  RetryPolicy retry{3, std::chrono::milliseconds(500)};
  std::chrono::milliseconds timeout{60000};

  // Throws Error("invalid_provider_config").
  void Validate() const;
};

// "mock" and "replay" are shorthands; anything else is a JSON file path.
// Relative cache_dir values resolve against the file's directory. Default
// cache root: $BUGBRIEF_CACHE_DIR, else ".bugbrief-cache".
ProviderConfig ResolveProviderConfig(std::string_view spec);
ProviderConfig ParseProviderConfig(std::string_view json_text,
                                   const std::filesystem::path& base_dir = {});
std::filesystem::path DefaultCacheDir();

// hash(model_id ‖ prompt fingerprint ‖ canonical params), hex.
std::string CacheKey(std::string_view model_id, std::string_view fingerprint,
                     const DecodingParams& params);

// One JSON file per key under `dir`. Safe for concurrent use.
class CompletionCache {
 public:
  explicit CompletionCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::optional<Completion> Lookup(std::string_view key) const;
  void Store(const Completion& completion) const;
  std::filesystem::path PathFor(std::string_view key) const;

 private:
  std::filesystem::path dir_;
};

class Provider {
 public:
  struct Stats {
    std::uint64_t live = 0;
    std::uint64_t cache = 0;
    std::uint64_t mock = 0;
  };

  virtual ~Provider() = default;

  // Thread-safe. Validates inputs, then dispatches to the backend.
  Completion Complete(const Prompt& prompt, const DecodingParams& params);

  virtual std::string_view model_id() const = 0;
  Stats stats() const;

 protected:
  virtual Completion DoComplete(const Prompt& prompt, const DecodingParams& params) = 0;

 private:
  std::atomic<std::uint64_t> live_{0};
  std::atomic<std::uint64_t> cache_{0};
  std::atomic<std::uint64_t> mock_{0};
};

std::unique_ptr<Provider> MakeProvider(const ProviderConfig& config);

// One-shot convenience over MakeProvider(config)->Complete(...).
Completion Complete(const Prompt& prompt, const DecodingParams& params,
                    const ProviderConfig& config);

// Ensures every prompt has a cache entry, issuing at most
// max_concurrent_requests live calls at a time. Returns the number of live
// calls. Throws Error("warm_cache_requires_http") for other kinds.
std::size_t WarmCache(std::span<const Prompt> prompts, const DecodingParams& params,
                      const ProviderConfig& config);

// The mock rule, exposed for tests.
std::string MockExtractiveText(std::string_view body, int max_new_tokens);

}  // namespace bugbrief

#endif  // BUGBRIEF_PROVIDER_H_
