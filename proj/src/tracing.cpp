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

#include "sct/tracing.hpp"

#include <algorithm>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "sct/errors.hpp"
#include "sct/filtering.hpp"

namespace sct {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * (a + 1)) ^ (0xc2b2ae3d27d4eb4fULL * (b + 1));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Generation {
  std::int64_t t_ms;
  SignaturePayload payload;
};

const SignaturePayload& payload_at(const std::vector<Generation>& gens, std::int64_t t) {
  const auto it = std::upper_bound(gens.begin(), gens.end(), t,
                                   [](std::int64_t v, const Generation& g) { return v < g.t_ms; });
  return it == gens.begin() ? gens.front().payload : std::prev(it)->payload;
}

}  // namespace

DemoResult run_trace_demo(const DemoConfig& config) {
  const auto n = config.n_devices;
  if (n < 2) throw ValidationError("the demo needs at least two devices");
  if (config.infected >= n) throw ValidationError("infected device id out of range");
  if (config.duration_ms <= 0) throw ValidationError("demo duration must be positive");
  if (!config.contacts.empty() && config.contacts.size() != n - 1) {
    throw ValidationError(fmt::format("expected {} contacts, got {}", n - 1, config.contacts.size()));
  }
  if (config.window == 0) throw ValidationError("filter window must be at least 1");
  if (config.ambient_devices == 0) throw EmptyEnvironmentError("no ambient devices");
  config.timing.validate();

  // Per-device contact with the infected device.
  std::vector<DemoContact> contact(n);
  for (std::size_t i = 0, j = 0; i < n; ++i) {
    if (i == config.infected) continue;
    contact[i] = config.contacts.empty() ? DemoContact{j % 2 == 0 ? 1.0 : 5.0} : config.contacts[j];
    if (contact[i].distance_m && !(*contact[i].distance_m > 0.0)) {
      throw ValidationError("contact distances must be positive");
    }
    ++j;
  }
  contact[config.infected].distance_m = 0.0;
  const auto present = [&](std::size_t i) { return contact[i].distance_m.has_value(); };

  const auto D = config.duration_ms;
  DemoResult result;
  result.logs.resize(n);
  result.encounter_seeds.assign(n, 0);

  // Schedules. Absent devices are only active after the others stop.
  for (std::size_t i = 0; i < n; ++i) {
    std::mt19937_64 rng(mix(config.seed, i, 0));
    DeviceSchedule s;
    s.timing = config.timing;
    s.timing.phase_offset_ms =
        std::uniform_int_distribution<std::int64_t>(0, config.timing.scan_interval_ms - 1)(rng);
    s.active_start_ms = present(i) ? 0 : D;
    s.active_end_ms = present(i) ? D : 2 * D;
    s.dictionary_seed = mix(config.seed, i, 1);
    result.schedules.push_back(s);
  }

  // Signature generation and broadcast logging.
  std::vector<std::vector<Generation>> generations(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = result.schedules[i];
    const auto dict = Dictionary::generate(config.ambient_devices, s.dictionary_seed);
    std::mt19937_64 env(mix(config.seed, i, 2));
    std::uniform_real_distribution<double> base_rss(-95.0, -45.0);
    std::vector<double> base(config.ambient_devices);
    for (auto& b : base) b = base_rss(env);
    std::normal_distribution<double> drift(0.0, 1.0);
    for (auto t = s.active_start_ms; t < s.active_end_ms; t += s.timing.signature_interval_ms) {
      ObservedVector obs;
      obs.t_ms = t;
      for (std::size_t j = 0; j < base.size(); ++j) {
        obs.values.push_back(base[j] + drift(env));
        obs.device_ids.push_back(fmt::format("ambient-{}-{}", i, j));
      }
      const auto payload = quantize_signature(generate_signature(dict, obs), config.bounds);
      generations[i].push_back({t, payload});
      log_record(result.logs[i], SignatureRecord::broadcast(payload, t));
    }
  }

  // Scanning: every co-active ordered pair.
  const auto noise = [v = config.noise_var](double) { return v; };
  for (std::size_t tx = 0; tx < n; ++tx) {
    for (std::size_t rx = 0; rx < n; ++rx) {
      if (tx == rx || !present(tx) || !present(rx)) continue;
      double distance = config.bystander_distance_m;
      if (tx == config.infected) distance = *contact[rx].distance_m;
      if (rx == config.infected) distance = *contact[tx].distance_m;
      EncounterScenario sc;
      sc.duration_ms = D;
      sc.profile = DistanceProfile(distance);
      sc.tx = result.schedules[tx].timing;
      sc.rx = result.schedules[rx].timing;
      sc.seed = mix(config.seed, tx * n + rx, 3);
      if (tx == config.infected) result.encounter_seeds[rx] = sc.seed;
      const auto trace = simulate_reception(sc.tx, sc.rx, sc, config.model, noise);
      for (const auto& r : trace.receptions) {
        log_record(result.logs[rx],
                   SignatureRecord::observed(payload_at(generations[tx], r.time_ms), r.time_ms, r.rss));
      }
    }
  }

  // Tracing phase.
  const std::int64_t now = 2 * D;
  for (auto& log : result.logs) expire_signatures(log, now, config.expiration_ms);
  for (const auto& r : result.logs[config.infected].broadcast()) result.uploaded.insert(r.payload);

  for (std::size_t i = 0; i < n; ++i) {
    if (i == config.infected) continue;
    DeviceOutcome out;
    out.device = i;
    out.true_distance = contact[i].distance_m;
    out.truth = !out.true_distance ? Truth::Absent
                : threshold_classify(*out.true_distance, config.threshold_m) == RiskLabel::High
                    ? Truth::High
                    : Truth::Low;
    const auto observed = result.logs[i].observed();
    const auto matches = match_signatures(observed, result.uploaded);
    out.matched = matches.size();
    out.copresence_ms = static_cast<std::int64_t>(matches.size()) * config.timing.adv_interval_ms;
    if (!matches.empty()) {
      std::vector<double> rss;
      for (const auto& m : matches) rss.push_back(*m.record.rss);
      const auto filtered = moving_average(rss, config.window);
      double sum = 0.0;
      for (const auto v : filtered) sum += v;
      out.mean_rss = sum / static_cast<double>(filtered.size());
      out.estimate = estimate_distance(config.model, *out.mean_rss);
      out.label = config.classifier
                      ? config.classifier->predict(encode_rss_8bit(*out.mean_rss))
                      : pl_classify(config.model, *out.mean_rss, config.threshold_m).label;
    }
    out.outcome = classify_outcome(out.label, out.truth);
    result.tally.add(out.outcome);
    result.outcomes.push_back(out);
  }
  return result;
}

void write_demo_report(std::ostream& out, const DemoConfig& config, const DemoResult& result) {
  out << fmt::format("# devices={} infected={} duration_ms={} seed={} uploaded_signatures={}\n",
                     config.n_devices, config.infected, config.duration_ms, config.seed,
                     result.uploaded.size());
  out << "# risk rule: " << (config.classifier ? to_string(config.classifier->kind()) : "PL")
      << fmt::format(" threshold_m={} window={}\n", config.threshold_m, config.window);
  out << "# exposure time is reported only; no duration cutoff is applied\n";
  out << "device,truth,true_distance_m,matched,copresence_ms,mean_rss,est_distance_m,saturated,"
         "label,outcome\n";
  for (const auto& o : result.outcomes) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", o.device, to_string(o.truth),
                       o.true_distance ? fmt::format("{}", *o.true_distance) : "",
                       o.matched, o.copresence_ms,
                       o.mean_rss ? fmt::format("{:.4f}", *o.mean_rss) : "",
                       o.estimate ? fmt::format("{:.4f}", o.estimate->meters) : "",
                       o.estimate ? (o.estimate->saturated ? "yes" : "no") : "",
                       to_string(o.label), to_string(o.outcome));
  }
  const auto& t = result.tally;
  out << fmt::format("# tally tp={} tn={} fp={} fn={} miss={} correct_low={}\n", t.tp, t.tn, t.fp,
                     t.fn, t.miss, t.correct_low);
}

}  // namespace sct
