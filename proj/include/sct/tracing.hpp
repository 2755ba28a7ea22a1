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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <vector>

#include "sct/classifiers.hpp"
#include "sct/risk_eval.hpp"
#include "sct/signal_model.hpp"
#include "sct/signature.hpp"
#include "sct/timing.hpp"

namespace sct {

// How one non-infected device relates to the infected one. An empty
// distance means the two are never active at the same time.
struct DemoContact {
  std::optional<double> distance_m;
};

struct DemoConfig {
  std::size_t n_devices = 5;
  std::size_t infected = 0;
  std::int64_t duration_ms = 120'000;
  std::uint64_t seed = 1;
  // One entry per non-infected device in id order. Empty: alternate 1 m and
  // 5 m contacts.
  std::vector<DemoContact> contacts;
  DeviceTimingConfig timing;  // T_a = 100 ms, continuous scanning
  PathLossModel model = reference_model();
  double noise_var = 4.0;               // dBm^2
  double bystander_distance_m = 3.0;    // between two non-infected devices
  std::size_t ambient_devices = 8;      // dimension of the observed vector
  QuantizationBounds bounds;
  double threshold_m = kDefaultThresholdM;
  std::size_t window = 100;
  std::int64_t expiration_ms = kDefaultExpirationMs;
  // When set, risk comes from this classifier instead of the path loss rule.
  std::optional<TrainedClassifier> classifier;
};

struct DeviceOutcome {
  std::size_t device = 0;
  std::optional<double> true_distance;
  Truth truth = Truth::Absent;
  std::size_t matched = 0;
  std::int64_t copresence_ms = 0;  // matched receptions x T_a
  std::optional<double> mean_rss;  // mean of the filtered matched RSS
  std::optional<DistanceEstimate> estimate;
  RiskLabel label = RiskLabel::Absent;
  Outcome outcome = Outcome::TrueNegative;
};

// Everything needed to replay the event schedule independently.
struct DeviceSchedule {
  DeviceTimingConfig timing;  // with this device's phase offset
  std::int64_t active_start_ms = 0;
  std::int64_t active_end_ms = 0;
  std::uint64_t dictionary_seed = 0;
};

struct DemoResult {
  std::vector<DeviceSchedule> schedules;
  // Seed of the encounter in which device i listens to the infected device.
  std::vector<std::uint64_t> encounter_seeds;
  std::vector<SignatureLog> logs;
  std::set<SignaturePayload> uploaded;
  std::vector<DeviceOutcome> outcomes;  // non-infected devices, id order
  OutcomeTally tally;
};

// Interaction phase for every device (signature generation, broadcasting,
// scanning, logging), then the tracing phase: the infected device uploads
// its broadcast signatures and every other device matches locally.
DemoResult run_trace_demo(const DemoConfig& config);

void write_demo_report(std::ostream& out, const DemoConfig& config, const DemoResult& result);

}  // namespace sct
