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

#ifndef BUGBRIEF_HASH_H_
#define BUGBRIEF_HASH_H_

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

namespace bugbrief {

// Lowercase hex SHA-256 of `data`.
std::string Sha256Hex(std::string_view data);

// SHA-256 over the parts joined by a unit separator (0x1f), so that
// ("ab","c") and ("a","bc") hash differently.
std::string Sha256HexOfParts(std::initializer_list<std::string_view> parts);

// First 8 bytes of SHA-256, big endian. Identical on every platform.
std::uint64_t StableHash64(std::string_view data);

}  // namespace bugbrief

#endif  // BUGBRIEF_HASH_H_
