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

#include "sct/timing.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "sct/errors.hpp"
#include "text_util.hpp"

namespace sct {

namespace {

// Separate stream for RSS noise so changing the scan schedule never shifts
// the advertising jitter draws.
constexpr std::uint64_t kNoiseStream = 0x9e3779b97f4a7c15ULL;

std::int64_t positive_mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

}  // namespace

std::int64_t advertising_interval_ms(AdvertiseMode mode) {
  switch (mode) {
    case AdvertiseMode::LowLatency:
      return 100;
    case AdvertiseMode::Balanced:
      return 250;
    case AdvertiseMode::LowPower:
      return 1000;
  }
  return 100;
}

void DeviceTimingConfig::validate() const {
  if (adv_interval_ms <= 0) throw ValidationError("advertising interval T_a must be positive");
  if (scan_window_ms <= 0) throw ValidationError("scan window T_w must be positive");
  if (scan_window_ms > scan_interval_ms) {
    throw ValidationError(fmt::format("scan window T_w={} exceeds scan interval T_s={}",
                                      scan_window_ms, scan_interval_ms));
  }
  if (signature_interval_ms <= 0) {
    throw ValidationError("signature interval T_g must be positive");
  }
  if (jitter_max_ms < 0 || jitter_max_ms >= adv_interval_ms) {
    throw ValidationError(fmt::format("jitter {} must lie in [0, T_a)", jitter_max_ms));
  }
}

DistanceProfile::DistanceProfile(double constant_distance)
    : DistanceProfile(std::vector<DistanceBreakpoint>{{0, constant_distance}}) {}

DistanceProfile::DistanceProfile(std::vector<DistanceBreakpoint> breakpoints)
    : breakpoints_(std::move(breakpoints)) {
  if (breakpoints_.empty() || breakpoints_.front().t_start_ms != 0) {
    throw ValidationError("distance profile must start with a breakpoint at t=0");
  }
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i].distance_m > 0.0)) {
      throw ValidationError("distance profile values must be positive");
    }
    if (i > 0 && breakpoints_[i].t_start_ms <= breakpoints_[i - 1].t_start_ms) {
      throw ValidationError("distance profile breakpoints must be strictly increasing");
    }
  }
}

double DistanceProfile::at(std::int64_t t_ms) const {
  const auto it = std::upper_bound(
      breakpoints_.begin(), breakpoints_.end(), t_ms,
      [](std::int64_t t, const DistanceBreakpoint& b) { return t < b.t_start_ms; });
  return it == breakpoints_.begin() ? breakpoints_.front().distance_m : std::prev(it)->distance_m;
}

void EncounterScenario::validate() const {
  if (duration_ms <= 0) throw ValidationError("scenario duration must be positive");
  tx.validate();
  rx.validate();
}

NoiseLookup hand_to_hand_noise() {
  return [profile = RssProfile::hand_to_hand()](double d) { return profile.variance_at(d); };
}

std::vector<std::int64_t> advertising_times(const DeviceTimingConfig& config,
                                            std::int64_t duration_ms, std::uint64_t seed) {
  if (duration_ms <= 0) throw ValidationError("duration must be positive");
  config.validate();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> jitter(0, config.jitter_max_ms);
  std::vector<std::int64_t> times;
  for (std::int64_t k = 0;; ++k) {
    const std::int64_t t = config.phase_offset_ms + k * config.adv_interval_ms +
                           (config.jitter_max_ms > 0 ? jitter(rng) : 0);
    if (t >= duration_ms) break;
    times.push_back(t);
  }
  return times;
}

std::vector<ScanWindow> scan_windows(const DeviceTimingConfig& config, std::int64_t duration_ms) {
  if (duration_ms <= 0) throw ValidationError("duration must be positive");
  config.validate();
  const auto period = config.scan_interval_ms;
  const auto width = config.scan_window_ms;
  std::int64_t start = positive_mod(config.phase_offset_ms, period);
  // The window of the previous period may still be open at t = 0.
  if (start - period + width > 0) start -= period;
  std::vector<ScanWindow> windows;
  for (; start < duration_ms; start += period) {
    const ScanWindow w{std::max<std::int64_t>(start, 0), std::min(start + width, duration_ms)};
    if (w.start_ms < w.end_ms) windows.push_back(w);
  }
  return windows;
}

namespace {

// Times that fall inside some window; both inputs are sorted.
std::vector<std::int64_t> heard_times(const std::vector<std::int64_t>& times,
                                      const std::vector<ScanWindow>& windows) {
  std::vector<std::int64_t> heard;
  auto w = windows.begin();
  for (const auto t : times) {
    while (w != windows.end() && w->end_ms <= t) ++w;
    if (w == windows.end()) break;
    if (w->start_ms <= t) heard.push_back(t);
  }
  return heard;
}

}  // namespace

PacketTrace simulate_reception(const DeviceTimingConfig& tx, const DeviceTimingConfig& rx,
                               const EncounterScenario& scenario, const PathLossModel& model,
                               const NoiseLookup& noise) {
  if (scenario.duration_ms <= 0) throw ValidationError("scenario duration must be positive");
  tx.validate();
  rx.validate();
  const auto adv = advertising_times(tx, scenario.duration_ms, scenario.seed);
  const auto heard = heard_times(adv, scan_windows(rx, scenario.duration_ms));

  std::mt19937_64 rng(scenario.seed ^ kNoiseStream);
  PacketTrace trace;
  trace.broadcast_count = adv.size();
  trace.receptions.reserve(heard.size());
  for (const auto t : heard) {
    const double d = scenario.profile.at(t);
    trace.receptions.push_back({t, synthesize_rss(model, d, noise(d), rng)});
  }
  trace.received_count = trace.receptions.size();
  return trace;
}

double reception_rate(const DeviceTimingConfig& tx, const DeviceTimingConfig& rx,
                      std::int64_t duration_ms, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw ValidationError("reception_rate needs at least one trial");
  if (duration_ms <= 0) throw ValidationError("duration must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> tx_phase(0, tx.adv_interval_ms - 1);
  std::uniform_int_distribution<std::int64_t> rx_phase(0, rx.scan_interval_ms - 1);
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    auto t = tx;
    auto r = rx;
    t.phase_offset_ms = tx_phase(rng);
    r.phase_offset_ms = rx_phase(rng);
    const auto adv = advertising_times(t, duration_ms, rng());
    if (adv.empty()) continue;
    const auto heard = heard_times(adv, scan_windows(r, duration_ms));
    sum += static_cast<double>(heard.size()) / static_cast<double>(adv.size());
    ++counted;
  }
  return counted == 0 ? 0.0 : sum / static_cast<double>(counted);
}

std::vector<RssSample> run_encounter(const EncounterScenario& scenario,
                                     const PathLossModel& model, const NoiseLookup& noise) {
  scenario.validate();
  const auto trace = simulate_reception(scenario.tx, scenario.rx, scenario, model, noise);
  std::vector<RssSample> samples;
  samples.reserve(trace.receptions.size());
  std::int64_t previous = -1;
  for (const auto& r : trace.receptions) {
    RssSample s;
    s.rss = r.rss;
    s.timestamp_ms = r.time_ms;
    s.true_distance = scenario.profile.at(r.time_ms);
    s.tx_id = scenario.tx_id;
    s.rx_id = scenario.rx_id;
    s.body_case = scenario.body_case;
    s.elapsed_ms = previous < 0 ? 0 : r.time_ms - previous;
    previous = r.time_ms;
    samples.push_back(std::move(s));
  }
  return samples;
}

EncounterScenario parse_scenario(std::istream& in) {
  EncounterScenario sc;
  std::vector<DistanceBreakpoint> breakpoints;
  std::string line;
  std::size_t line_no = 0;

  const auto int_value = [&](const detail::KeyValue& kv) {
    const auto v = detail::parse_int(kv.value);
    if (!v) throw ParseError(fmt::format("scenario line {}: bad integer for '{}'", line_no, kv.key));
    return *v;
  };
  const auto both = [&](std::int64_t DeviceTimingConfig::*field, std::int64_t v) {
    sc.tx.*field = v;
    sc.rx.*field = v;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank_or_comment(line)) continue;
    if (const auto kv = detail::parse_key_value(line)) {
      const auto& key = kv->key;
      if (key == "duration") {
        sc.duration_ms = int_value(*kv);
      } else if (key == "T_a") {
        both(&DeviceTimingConfig::adv_interval_ms, int_value(*kv));
      } else if (key == "T_s") {
        both(&DeviceTimingConfig::scan_interval_ms, int_value(*kv));
      } else if (key == "T_w") {
        both(&DeviceTimingConfig::scan_window_ms, int_value(*kv));
      } else if (key == "T_g") {
        both(&DeviceTimingConfig::signature_interval_ms, int_value(*kv));
      } else if (key == "jitter") {
        both(&DeviceTimingConfig::jitter_max_ms, int_value(*kv));
      } else if (key == "tx_offset") {
        sc.tx.phase_offset_ms = int_value(*kv);
      } else if (key == "rx_offset") {
        sc.rx.phase_offset_ms = int_value(*kv);
      } else if (key == "seed") {
        const auto v = detail::parse_int(kv->value);
        if (!v || *v < 0) throw ParseError(fmt::format("scenario line {}: bad seed", line_no));
        sc.seed = static_cast<std::uint64_t>(*v);
      } else if (key == "case") {
        sc.body_case = parse_body_case(kv->value);
      } else if (key == "tx_id") {
        sc.tx_id = kv->value;
      } else if (key == "rx_id") {
        sc.rx_id = kv->value;
      } else {
        throw ParseError(fmt::format("scenario line {}: unknown key '{}'", line_no, key));
      }
      continue;
    }
    const auto fields = detail::split_csv(line);
    const auto t = fields.size() == 2 ? detail::parse_int(fields[0]) : std::nullopt;
    const auto d = fields.size() == 2 ? detail::parse_double(fields[1]) : std::nullopt;
    if (!t || !d) {
      throw ParseError(fmt::format("scenario line {}: expected 't_start_ms,distance_m'", line_no));
    }
    breakpoints.push_back({*t, *d});
  }
  if (breakpoints.empty()) throw ParseError("scenario has no distance breakpoints");
  sc.profile = DistanceProfile(std::move(breakpoints));
  sc.validate();
  return sc;
}

void write_scenario(std::ostream& out, const EncounterScenario& sc) {
  out << "duration=" << sc.duration_ms << '\n'
      << "T_a=" << sc.tx.adv_interval_ms << '\n'
      << "T_s=" << sc.rx.scan_interval_ms << '\n'
      << "T_w=" << sc.rx.scan_window_ms << '\n'
      << "T_g=" << sc.tx.signature_interval_ms << '\n'
      << "jitter=" << sc.tx.jitter_max_ms << '\n'
      << "tx_offset=" << sc.tx.phase_offset_ms << '\n'
      << "rx_offset=" << sc.rx.phase_offset_ms << '\n'
      << "seed=" << sc.seed << '\n'
      << "case=" << to_string(sc.body_case) << '\n'
      << "tx_id=" << sc.tx_id << '\n'
      << "rx_id=" << sc.rx_id << '\n';
  for (const auto& b : sc.profile.breakpoints()) {
    out << b.t_start_ms << ',' << fmt::format("{}", b.distance_m) << '\n';
  }
}

void write_trace(std::ostream& out, const std::vector<RssSample>& samples) {
  out << "time_ms,rss_dbm,true_distance_m\n";
  for (const auto& s : samples) {
    out << fmt::format("{},{},{}\n", s.timestamp_ms, s.rss, s.true_distance.value_or(0.0));
  }
}

}  // namespace sct
