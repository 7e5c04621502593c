// Copyright 2026 The Binscape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "binscape/model/soundscape.hpp"

namespace binscape::model {

/// Fetches the bytes behind a uri. Throws (any std::exception) on failure.
using Resolver = std::function<std::vector<std::uint8_t>(const std::string& uri)>;

/// Replaces every uri reference (assets and floor plan) with embedded bytes.
/// Audio metadata is recomputed from the decoded WAV. Already embedded
/// references are left untouched, so the operation is idempotent.
///
/// Throws IoError naming the source id and uri when the resolver fails.
Soundscape embed_assets(const Soundscape& s, const Resolver& resolver);

/// Media type guessed from a uri extension ("audio/wav", "image/png", ...).
std::string media_type_for(const std::string& uri);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace binscape::model
