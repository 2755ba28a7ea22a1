/*
 * Copyright 2026 The SCT Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sct/signal_model.hpp"

namespace sct {

inline constexpr std::size_t kPlotWindow = 10;
inline constexpr std::size_t kSaturationWindow = 100;

struct FilterConfig {
  std::size_t window = 1;  // >= 1; 1 leaves the data untouched
};

// Trailing mean over the last `window` values; the first window-1 outputs
// average the shorter prefix. Throws DomainError for window == 0.
std::vector<double> moving_average(std::span<const double> values, std::size_t window);

// (filtered - raw) / raw. Throws UndefinedGainError when raw accuracy is 0.
double performance_gain(double acc_filtered, double acc_raw);

// RSS after moving-average filtering, aligned with `samples`. The filter is
// restarted at every change of (tx, rx, true_distance) so it never mixes
// readings from different ground-truth segments.
std::vector<double> filter_by_segment(std::span<const RssSample> samples, std::size_t window);

}  // namespace sct
