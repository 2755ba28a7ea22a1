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
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "sct/signal_model.hpp"
#include "sct/signature.hpp"

namespace sct {

// Advertising presets exposed by the Android BLE API.
enum class AdvertiseMode { LowLatency, Balanced, LowPower };

std::int64_t advertising_interval_ms(AdvertiseMode mode);

struct DeviceTimingConfig {
  std::int64_t adv_interval_ms = 100;    // T_a
  std::int64_t scan_interval_ms = 1000;  // T_s
  std::int64_t scan_window_ms = 1000;    // T_w
  std::int64_t signature_interval_ms = kDefaultSignatureIntervalMs;  // T_g
  std::int64_t phase_offset_ms = 0;
  std::int64_t jitter_max_ms = 10;  // uniform addend per advertising event

  // Throws ValidationError unless 0 < T_w <= T_s, T_a > 0, T_g > 0 and
  // 0 <= jitter < T_a (the last keeps advertising times strictly increasing).
  void validate() const;
};

struct DistanceBreakpoint {
  std::int64_t t_start_ms = 0;
  double distance_m = 0.0;
};

// Piecewise-constant distance between the two phones over time.
class DistanceProfile {
 public:
  DistanceProfile() : DistanceProfile(1.0) {}
  explicit DistanceProfile(double constant_distance);
  // The first breakpoint must start at 0, starts strictly increasing and all
  // distances positive; throws ValidationError otherwise.
  explicit DistanceProfile(std::vector<DistanceBreakpoint> breakpoints);

  double at(std::int64_t t_ms) const;
  const std::vector<DistanceBreakpoint>& breakpoints() const { return breakpoints_; }

 private:
  std::vector<DistanceBreakpoint> breakpoints_;
};

struct EncounterScenario {
  std::int64_t duration_ms = 60'000;
  DistanceProfile profile;
  BodyCase body_case = BodyCase::HH;
  DeviceTimingConfig tx;
  DeviceTimingConfig rx;
  std::uint64_t seed = 0;
  std::string tx_id = "tx";
  std::string rx_id = "rx";

  void validate() const;
};

struct Reception {
  std::int64_t time_ms = 0;
  double rss = 0.0;

  friend bool operator==(const Reception&, const Reception&) = default;
};

struct PacketTrace {
  std::vector<Reception> receptions;
  std::size_t broadcast_count = 0;
  std::size_t received_count = 0;

  friend bool operator==(const PacketTrace&, const PacketTrace&) = default;
};

struct ScanWindow {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;  // exclusive

  friend bool operator==(const ScanWindow&, const ScanWindow&) = default;
};

// Distance -> RSS variance (dBm^2).
using NoiseLookup = std::function<double(double)>;

NoiseLookup hand_to_hand_noise();

// phase_offset + k * T_a + u_k for every event before `duration`, with u_k
// uniform on the integers [0, jitter_max].
std::vector<std::int64_t> advertising_times(const DeviceTimingConfig& config,
                                            std::int64_t duration_ms, std::uint64_t seed);

// The periodic pattern [k*T_s + offset, k*T_s + offset + T_w) for every
// integer k, clipped to [0, duration).
std::vector<ScanWindow> scan_windows(const DeviceTimingConfig& config, std::int64_t duration_ms);

// A broadcast is heard iff it falls inside a receiver scan window. RSS of
// each reception comes from the path loss model plus Gaussian noise.
PacketTrace simulate_reception(const DeviceTimingConfig& tx, const DeviceTimingConfig& rx,
                               const EncounterScenario& scenario, const PathLossModel& model,
                               const NoiseLookup& noise);

// Monte-Carlo mean of received/broadcast over random phase offsets of both
// devices. Trials without any broadcast do not contribute.
double reception_rate(const DeviceTimingConfig& tx, const DeviceTimingConfig& rx,
                      std::int64_t duration_ms, std::size_t trials, std::uint64_t seed);

std::vector<RssSample> run_encounter(const EncounterScenario& scenario,
                                     const PathLossModel& model, const NoiseLookup& noise);

// Scenario file: "key=value" header lines (duration, T_a, T_s, T_w, T_g,
// jitter, seed, case, and optionally tx_offset, rx_offset, tx_id, rx_id)
// followed by "t_start_ms,distance_m" breakpoints.
EncounterScenario parse_scenario(std::istream& in);
void write_scenario(std::ostream& out, const EncounterScenario& scenario);

// "time_ms,rss_dbm,true_distance_m" header plus one row per sample.
void write_trace(std::ostream& out, const std::vector<RssSample>& samples);

}  // namespace sct
