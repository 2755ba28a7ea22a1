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

#include "sct/filtering.hpp"

#include <fmt/format.h>

#include "sct/errors.hpp"

namespace sct {

std::vector<double> moving_average(std::span<const double> values, std::size_t window) {
  if (window == 0) throw DomainError("moving average window must be at least 1");
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    // Re-seed the running sum once per window so rounding drift stays bounded.
    if (i % window == 0 && i >= window) {
      sum = 0.0;
      for (std::size_t j = i + 1 - window; j < i; ++j) sum += values[j];
      sum += values[i];
    } else {
      sum += values[i];
      if (i >= window) sum -= values[i - window];
    }
    const std::size_t n = i + 1 < window ? i + 1 : window;
    out[i] = sum / static_cast<double>(n);
  }
  return out;
}

double performance_gain(double acc_filtered, double acc_raw) {
  if (acc_raw == 0.0) throw UndefinedGainError("performance gain is undefined for zero raw accuracy");
  return (acc_filtered - acc_raw) / acc_raw;
}

std::vector<double> filter_by_segment(std::span<const RssSample> samples, std::size_t window) {
  if (window == 0) throw DomainError("moving average window must be at least 1");
  std::vector<double> out;
  out.reserve(samples.size());
  std::size_t begin = 0;
  std::vector<double> segment;
  while (begin < samples.size()) {
    std::size_t end = begin + 1;
    while (end < samples.size() && samples[end].tx_id == samples[begin].tx_id &&
           samples[end].rx_id == samples[begin].rx_id &&
           samples[end].true_distance == samples[begin].true_distance) {
      ++end;
    }
    segment.clear();
    for (std::size_t i = begin; i < end; ++i) segment.push_back(samples[i].rss);
    const auto filtered = moving_average(segment, window);
    out.insert(out.end(), filtered.begin(), filtered.end());
    begin = end;
  }
  return out;
}

}  // namespace sct
