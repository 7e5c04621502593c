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


// Writes the built-in synthetic HRIR set as a directory package.
//
//   gen_hrir <out-dir> [--rate 48000] [--length 128] [--circumference 0.55]

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "binscape/binaural/hrir_set.hpp"

int main(int argc, char** argv) {
  CLI::App app{"generate the synthetic spherical-head HRIR set"};
  std::string out;
  int rate = 48000;
  std::size_t length = 128;
  double circumference = 0.55;
  app.add_option("out", out, "output directory")->required();
  app.add_option("--rate", rate, "sample rate")->check(CLI::Range(8000, 192000));
  app.add_option("--length", length, "taps per response")->check(CLI::Range(1, 8192));
  app.add_option("--circumference", circumference, "head circumference in metres")
      ->check(CLI::Range(0.3, 0.8));
  CLI11_PARSE(app, argc, argv);

  try {
    const auto set = binscape::binaural::synthetic_hrir_set(rate, length, circumference);
    binscape::binaural::save_hrir_set(set, out);
    std::cout << "wrote " << set.size() << " directions to " << out << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
