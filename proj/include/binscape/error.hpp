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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace binscape {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Document does not match the expected schema. `path()` is a JSON pointer.
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Out-of-range DSP or model parameter.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input would exceed a documented resource bound.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Filesystem, network or container-level failure.
class IoError : public Error {
 public:
  using Error::Error;
};

class UnsupportedCodecError : public Error {
 public:
  UnsupportedCodecError(unsigned format_tag, const std::string& message)
      : Error(message), format_tag_(format_tag) {}
  unsigned format_tag() const noexcept { return format_tag_; }

 private:
  unsigned format_tag_;
};

class TruncatedError : public Error {
 public:
  TruncatedError(std::size_t offset, const std::string& message)
      : Error(message), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace binscape
