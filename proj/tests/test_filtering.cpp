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

#include "sct/errors.hpp"
#include "sct/filtering.hpp"
#include "support.hpp"

using namespace sct;
using sct::testing::Gen;

TEST_CASE("moving average basics") {
  const std::vector<double> x = {-60, -62, -64};
  CHECK(moving_average(x, 1) == x);
  CHECK(moving_average(x, 3) == std::vector<double>{-60, -61, -62});
  CHECK(moving_average(std::vector<double>{}, 5).empty());
  CHECK_THROWS_AS(moving_average(x, 0), DomainError);
}

TEST_CASE("moving average agrees with direct summation") {
  Gen g(41);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto n = static_cast<std::size_t>(g.integer(0, 2000));
    const auto w = static_cast<std::size_t>(g.integer(1, 300));
    const auto x = g.reals(n, -100, -30);
    const auto got = moving_average(x, w);
    const auto want = testing::naive_moving_average(x, w);
    REQUIRE(got.size() == want.size());
    for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(got[k] - want[k]));
  }
  CHECK(worst <= 1e-12);
  const auto x = g.reals(1000, -100, -30);
  const auto a = moving_average(x, 100), b = testing::naive_moving_average(x, 100);
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-12);
}

TEST_CASE("constant shift passes through") {
  Gen g(42);
  for (int i = 0; i < 100; ++i) {
    // Multiples of 840 = lcm(1..8) keep every partial mean an exact integer,
    // so the identity holds bit for bit.
    std::vector<double> x(static_cast<std::size_t>(g.integer(1, 500)));
    for (auto& v : x) v = 840.0 * static_cast<double>(g.integer(-100, -30));
    const auto w = static_cast<std::size_t>(g.integer(1, 8));
    const double k = static_cast<double>(g.integer(-50, 50));
    auto shifted = x;
    for (auto& v : shifted) v += k;
    const auto fx = moving_average(x, w), fs = moving_average(shifted, w);
    for (std::size_t j = 0; j < x.size(); ++j) CHECK(fs[j] == fx[j] + k);
  }
  // General data: equal up to rounding.
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto x = g.reals(static_cast<std::size_t>(g.integer(1, 1000)), -100, -30);
    const auto w = static_cast<std::size_t>(g.integer(1, 200));
    const double k = g.real(-20, 20);
    auto shifted = x;
    for (auto& v : shifted) v += k;
    const auto fx = moving_average(x, w), fs = moving_average(shifted, w);
    for (std::size_t j = 0; j < x.size(); ++j) worst = std::max(worst, std::abs(fs[j] - (fx[j] + k)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("filtering reduces variance of stationary input") {
  Gen g(43);
  for (std::size_t w : {2u, 10u, 100u}) {
    const auto x = [&] {
      std::vector<double> v(20 * w);
      for (auto& e : v) e = g.normal(-75, 4);
      return v;
    }();
    auto var = [](const std::vector<double>& v) {
      double m = 0;
      for (auto e : v) m += e;
      m /= static_cast<double>(v.size());
      double s = 0;
      for (auto e : v) s += (e - m) * (e - m);
      return s / static_cast<double>(v.size() - 1);
    };
    CHECK(var(moving_average(x, w)) <= var(x));
  }
}

TEST_CASE("filtering twice differs from filtering once") {
  const std::vector<double> x = {0, 0, 3};
  const auto once = moving_average(x, 2);
  CHECK(once == std::vector<double>{0, 0, 1.5});
  CHECK(moving_average(once, 2) != once);
}

TEST_CASE("performance gain") {
  CHECK(performance_gain(0.5, 0.5) == 0.0);
  CHECK(performance_gain(0.55, 0.5) == doctest::Approx(0.10));
  // Reported in the source text as a 4.68% gain.
  CHECK(std::abs(performance_gain(0.8336, 0.796) - 0.0468) <= 0.005);
  CHECK_THROWS_AS(performance_gain(0.5, 0.0), UndefinedGainError);
}

TEST_CASE("segment filter restarts at ground-truth changes") {
  std::vector<RssSample> s(6);
  const double rss[] = {-60, -62, -64, -90, -92, -94};
  for (std::size_t i = 0; i < 6; ++i) {
    s[i].rss = rss[i];
    s[i].true_distance = i < 3 ? 1.0 : 5.0;
  }
  CHECK(filter_by_segment(s, 100) == std::vector<double>{-60, -61, -62, -90, -91, -92});
  s[4].rx_id = "other";
  CHECK(filter_by_segment(s, 100) == std::vector<double>{-60, -61, -62, -90, -92, -94});
  CHECK(filter_by_segment(s, 1) == std::vector<double>(std::begin(rss), std::end(rss)));
}
