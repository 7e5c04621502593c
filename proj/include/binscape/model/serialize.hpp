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

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "binscape/model/soundscape.hpp"
#include "binscape/model/validate.hpp"

namespace binscape::model {

/// Canonical text form: keys sorted bytewise, no insignificant whitespace,
/// non-integral numbers printed with at most 9 significant digits.
std::string canonical_dump(const nlohmann::json& doc);

/// Parses JSON text; throws ParseError at path "" on a syntax error.
nlohmann::json parse_json(std::string_view text);

nlohmann::json to_json(const Soundscape& s);

struct Deserialized {
  Soundscape soundscape;
  std::vector<Issue> warnings;  ///< e.g. unknown fields, kept in `extra`
};

/// Throws ParseError with the JSON pointer of the offending field.
Deserialized from_json(const nlohmann::json& doc);

/// Throws ParameterError when `s` does not validate.
std::string serialize(const Soundscape& s);
Deserialized deserialize(std::string_view text);

/// Round a value to the 9-significant-digit grid used by canonical_dump.
double canonical_number(double v);

}  // namespace binscape::model
