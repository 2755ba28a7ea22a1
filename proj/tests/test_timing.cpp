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

#include <doctest.h>

#include <sstream>

#include "sct/errors.hpp"
#include "sct/timing.hpp"
#include "support.hpp"

using namespace sct;
using sct::testing::Gen;

namespace {

DeviceTimingConfig periodic(std::int64_t ta, std::int64_t ts, std::int64_t tw, std::int64_t off = 0) {
  DeviceTimingConfig c;
  c.adv_interval_ms = ta;
  c.scan_interval_ms = ts;
  c.scan_window_ms = tw;
  c.phase_offset_ms = off;
  c.jitter_max_ms = 0;
  return c;
}

NoiseLookup silent() {
  return [](double) { return 0.0; };
}

}  // namespace

TEST_CASE("advertising presets") {
  CHECK(advertising_interval_ms(AdvertiseMode::LowLatency) == 100);
  CHECK(advertising_interval_ms(AdvertiseMode::Balanced) == 250);
  CHECK(advertising_interval_ms(AdvertiseMode::LowPower) == 1000);
}

TEST_CASE("advertising times") {
  const auto t = advertising_times(periodic(100, 1000, 1000), 1000, 1);
  REQUIRE(t.size() == 10);
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(t[k] == static_cast<std::int64_t>(100 * k));
  CHECK(advertising_times(periodic(100, 1000, 1000), 50, 1) == std::vector<std::int64_t>{0});

  auto j = periodic(100, 1000, 1000);
  j.jitter_max_ms = 10;
  const auto a = advertising_times(j, 60000, 5);
  CHECK(a == advertising_times(j, 60000, 5));
  CHECK(a != advertising_times(j, 60000, 6));
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto base = static_cast<std::int64_t>(100 * k);
    CHECK(a[k] >= base);
    CHECK(a[k] <= base + 10);
    if (k > 0) CHECK(a[k] > a[k - 1]);
  }
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(periodic(100, 1000, 1001).validate(), ValidationError);
  CHECK_THROWS_AS(periodic(100, 1000, 0).validate(), ValidationError);
  CHECK_THROWS_AS(periodic(0, 1000, 100).validate(), ValidationError);
  auto c = periodic(100, 1000, 100);
  c.jitter_max_ms = -1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.signature_interval_ms = 0;
  c.jitter_max_ms = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("scan windows") {
  const auto full = scan_windows(periodic(100, 1000, 1000), 5000);
  REQUIRE(full.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(full[k].start_ms == static_cast<std::int64_t>(1000 * k));
    CHECK(full[k].end_ms == static_cast<std::int64_t>(1000 * k + 1000));
  }
  const auto duty = scan_windows(periodic(100, 1000, 100), 2000);
  CHECK(duty == std::vector<ScanWindow>{{0, 100}, {1000, 1100}});

  Gen g(31);
  for (int i = 0; i < 100; ++i) {
    auto c = g.timing();
    const auto duration = g.integer(1, 20000);
    const auto w = scan_windows(c, duration);
    for (std::size_t k = 0; k < w.size(); ++k) {
      CHECK(w[k].start_ms >= 0);
      CHECK(w[k].end_ms <= duration);
      CHECK(w[k].start_ms < w[k].end_ms);
      if (k > 0) CHECK(w[k - 1].end_ms <= w[k].start_ms);
    }
    // Each millisecond is covered iff the modular rule says so.
    std::size_t covered = 0;
    for (const auto& s : w) covered += static_cast<std::size_t>(s.end_ms - s.start_ms);
    std::size_t expected = 0;
    for (std::int64_t t = 0; t < duration; ++t) expected += testing::in_scan_window(c, t);
    CHECK(covered == expected);

    c.scan_window_ms = c.scan_interval_ms;
    const auto cont = scan_windows(c, duration);
    std::int64_t total = 0;
    for (const auto& s : cont) total += s.end_ms - s.start_ms;
    CHECK(total == duration);
  }
}

TEST_CASE("reception set matches the interval-membership oracle") {
  Gen g(32);
  const auto model = reference_model();
  for (int i = 0; i < 100; ++i) {
    EncounterScenario sc;
    sc.duration_ms = g.integer(100, 30000);
    sc.tx = g.timing();
    sc.rx = g.timing();
    sc.seed = g.bits();
    const auto trace = simulate_reception(sc.tx, sc.rx, sc, model, hand_to_hand_noise());
    const auto adv = advertising_times(sc.tx, sc.duration_ms, sc.seed);
    std::vector<std::int64_t> expected;
    for (const auto t : adv) {
      if (testing::in_scan_window(sc.rx, t)) expected.push_back(t);
    }
    std::vector<std::int64_t> got;
    for (const auto& r : trace.receptions) got.push_back(r.time_ms);
    CHECK(got == expected);
    CHECK(trace.broadcast_count == adv.size());
    CHECK(trace.received_count == trace.receptions.size());
    CHECK(trace.received_count <= trace.broadcast_count);
  }
}

TEST_CASE("reception edge cases") {
  EncounterScenario sc;
  sc.duration_ms = 60000;
  sc.tx = periodic(100, 1000, 1000);
  sc.rx = periodic(100, 1000, 1000);
  const auto all = simulate_reception(sc.tx, sc.rx, sc, reference_model(), silent());
  CHECK(all.received_count == all.broadcast_count);

  sc.tx = periodic(1000, 1000, 1000, 500);
  sc.rx = periodic(100, 1000, 100, 0);
  CHECK(simulate_reception(sc.tx, sc.rx, sc, reference_model(), silent()).received_count == 0);
}

TEST_CASE("reception rate") {
  Gen g(33);
  for (int i = 0; i < 20; ++i) {
    auto tx = g.timing();
    auto rx = g.timing();
    rx.scan_window_ms = rx.scan_interval_ms;
    CHECK(reception_rate(tx, rx, g.integer(1, 20000), 10, g.bits()) == 1.0);
  }
  const double r = reception_rate(periodic(100, 1000, 1000), periodic(100, 1000, 500), 60000, 1000, 7);
  CHECK(std::abs(r - 0.5) <= 0.02);

  const double edge = reception_rate(periodic(5000, 1000, 1000), periodic(100, 1000, 300), 1000, 50, 3);
  CHECK(edge >= 0.0);
  CHECK(edge <= 1.0);
  CHECK_THROWS_AS(reception_rate(periodic(100, 1000, 1000), periodic(100, 1000, 500), 1000, 0, 1),
                  ValidationError);
}

TEST_CASE("wider window never loses receptions") {
  Gen g(34);
  for (int i = 0; i < 50; ++i) {
    EncounterScenario sc;
    sc.duration_ms = g.integer(1000, 20000);
    sc.tx = g.timing();
    sc.rx = g.timing();
    sc.seed = g.bits();
    std::size_t previous = 0;
    for (std::int64_t w = 1; w <= sc.rx.scan_interval_ms; w += std::max<std::int64_t>(1, sc.rx.scan_interval_ms / 7)) {
      sc.rx.scan_window_ms = w;
      const auto n = simulate_reception(sc.tx, sc.rx, sc, reference_model(), silent()).received_count;
      CHECK(n >= previous);
      previous = n;
    }
  }
}

TEST_CASE("every window longer than the advertising period hears something") {
  Gen g(35);
  for (int i = 0; i < 50; ++i) {
    EncounterScenario sc;
    sc.tx = periodic(g.integer(20, 200), 1000, 1000, g.integer(0, 50));
    sc.rx = periodic(100, g.integer(500, 3000), 1, 0);
    sc.rx.scan_window_ms = g.integer(sc.tx.adv_interval_ms + 1, sc.rx.scan_interval_ms);
    sc.duration_ms = 20 * sc.rx.scan_interval_ms;
    const auto trace = simulate_reception(sc.tx, sc.rx, sc, reference_model(), silent());
    for (const auto& w : scan_windows(sc.rx, sc.duration_ms)) {
      if (w.end_ms - w.start_ms <= sc.tx.adv_interval_ms || w.start_ms < sc.tx.phase_offset_ms) continue;
      const bool hit = std::any_of(trace.receptions.begin(), trace.receptions.end(), [&](const auto& r) {
        return r.time_ms >= w.start_ms && r.time_ms < w.end_ms;
      });
      CHECK(hit);
    }
  }
}

TEST_CASE("run_encounter") {
  EncounterScenario sc;
  sc.duration_ms = 60000;
  sc.profile = DistanceProfile(1.0);
  sc.tx = periodic(100, 1000, 1000);
  sc.rx = periodic(100, 1000, 1000);
  sc.seed = 4;
  const auto model = reference_model();
  const auto s = run_encounter(sc, model, silent());
  REQUIRE(s.size() == 600);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(*s[i].true_distance == 1.0);
    CHECK(s[i].rss == predict_rss(model, 1.0));
    CHECK(s[i].elapsed_ms == (i == 0 ? 0 : 100));
  }
  const auto noisy = run_encounter(sc, model, hand_to_hand_noise());
  CHECK(noisy.size() == 600);
  const auto again = run_encounter(sc, model, hand_to_hand_noise());
  for (std::size_t i = 0; i < noisy.size(); ++i) CHECK(noisy[i].rss == again[i].rss);

  sc.duration_ms = 0;
  CHECK_THROWS_AS(run_encounter(sc, model, silent()), ValidationError);
}

TEST_CASE("distance profile") {
  const DistanceProfile p({{0, 1.0}, {1000, 2.0}, {5000, 0.5}});
  CHECK(p.at(0) == 1.0);
  CHECK(p.at(999) == 1.0);
  CHECK(p.at(1000) == 2.0);
  CHECK(p.at(100000) == 0.5);
  CHECK_THROWS_AS(DistanceProfile({{10, 1.0}}), ValidationError);
  CHECK_THROWS_AS(DistanceProfile({{0, 1.0}, {0, 2.0}}), ValidationError);
  CHECK_THROWS_AS(DistanceProfile({{0, 0.0}}), ValidationError);
}

TEST_CASE("scenario file") {
  EncounterScenario sc;
  sc.duration_ms = 12345;
  sc.profile = DistanceProfile({{0, 1.5}, {6000, 4.0}});
  sc.tx = periodic(250, 1000, 1000, 17);
  sc.rx = periodic(100, 2000, 500, 3);
  sc.rx.jitter_max_ms = 7;
  sc.seed = 99;
  sc.body_case = BodyCase::PB;
  std::stringstream ss;
  write_scenario(ss, sc);
  const auto back = parse_scenario(ss);
  CHECK(back.duration_ms == sc.duration_ms);
  CHECK(back.profile.breakpoints().size() == 2);
  CHECK(back.tx.adv_interval_ms == 250);
  CHECK(back.tx.phase_offset_ms == 17);
  CHECK(back.rx.scan_window_ms == 500);
  CHECK(back.seed == 99);
  CHECK(back.body_case == BodyCase::PB);
  std::stringstream again;
  write_scenario(again, back);
  std::stringstream first;
  write_scenario(first, sc);
  CHECK(again.str() == first.str());

  std::istringstream bad("duration=1000\nT_s=100\nT_w=200\n0,1\n");
  CHECK_THROWS_AS(parse_scenario(bad), ValidationError);
  std::istringstream unknown("duration=1000\nbogus=1\n0,1\n");
  CHECK_THROWS_AS(parse_scenario(unknown), ParseError);
}
