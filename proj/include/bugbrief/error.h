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

#ifndef BUGBRIEF_ERROR_H_
#define BUGBRIEF_ERROR_H_

#include <stdexcept>
#include <string>
#include <utility>

namespace bugbrief {

// Every failure raised by the library carries a short machine-readable code
// ("replay_miss", "http_status(404)", ...) plus free-form detail.
class Error : public std::runtime_error {
 public:
  Error(std::string code, std::string detail = {})
      : std::runtime_error(detail.empty() ? code : code + ": " + detail),
        code_(std::move(code)),
        detail_(std::move(detail)) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string code_;
  std::string detail_;
};

// Bad user input to the CLI or a config file. The CLI maps this to exit 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace bugbrief

#endif  // BUGBRIEF_ERROR_H_
