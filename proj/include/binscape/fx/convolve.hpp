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

#include <span>
#include <vector>

namespace binscape::fx {

/// Full linear convolution (length n + m - 1) by FFT overlap-add. The signal
/// is cut into segments sized to the kernel so the transform length stays
/// near 4m regardless of n. Empty input yields an empty result.
std::vector<double> fft_convolve(std::span<const double> signal, std::span<const double> kernel);

}  // namespace binscape::fx
