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
#include <vector>

#include "binscape/model/soundscape.hpp"

namespace binscape::model {

enum class Severity { error, warning };

struct Issue {
  Severity severity = Severity::error;
  std::string path;  ///< JSON pointer into the serialized document
  std::string message;
  bool operator==(const Issue&) const = default;
};

struct ValidationReport {
  std::vector<Issue> issues;

  bool ok() const;  ///< no errors (warnings allowed)
  std::size_t error_count() const;
  std::size_t warning_count() const;
  bool operator==(const ValidationReport&) const = default;
};

/// Checks every type invariant and the acyclicity of after_completes edges.
/// Never throws; the report carries all findings in document order.
ValidationReport validate(const Soundscape& s);

nlohmann::json to_json(const ValidationReport& report);

}  // namespace binscape::model
