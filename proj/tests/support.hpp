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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "sct/signal_model.hpp"
#include "sct/timing.hpp"

namespace sct::testing {

// Small seeded generator used by the property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  double normal(double mean, double sd) { return std::normal_distribution<double>(mean, sd)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::uint64_t bits() { return rng_(); }

  std::vector<double> reals(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = real(lo, hi);
    return v;
  }

  PathLossModel model() { return PathLossModel(real(0.5, 4.0), real(-100.0, -40.0)); }

  DeviceTimingConfig timing() {
    DeviceTimingConfig c;
    c.adv_interval_ms = integer(20, 1500);
    c.scan_interval_ms = integer(50, 3000);
    c.scan_window_ms = integer(1, c.scan_interval_ms);
    c.phase_offset_ms = integer(0, 2 * c.scan_interval_ms);
    c.jitter_max_ms = std::min<std::int64_t>(integer(0, 10), c.adv_interval_ms - 1);
    return c;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Least squares by exhaustive search over n with c solved in closed form
// (for fixed n the model is linear in c), then golden-section refinement.
struct GridFit {
  double n = 0.0;
  double c = 0.0;
  double rss = std::numeric_limits<double>::infinity();
};

inline double grid_objective(const std::vector<FitPoint>& pts, double n, double* c_out) {
  double c = 0.0;
  for (const auto& p : pts) c += p.mean_rss - std::pow(p.distance, -n);
  c /= static_cast<double>(pts.size());
  double s = 0.0;
  for (const auto& p : pts) {
    const double r = p.mean_rss - (c + std::pow(p.distance, -n));
    s += r * r;
  }
  if (c_out) *c_out = c;
  return s;
}

inline GridFit grid_fit(const std::vector<FitPoint>& pts, double n_lo = 0.1, double n_hi = 10.0,
                        double step = 1e-3) {
  GridFit best;
  for (double n = n_lo; n <= n_hi + 1e-12; n += step) {
    double c = 0.0;
    const double s = grid_objective(pts, n, &c);
    if (s < best.rss) best = {n, c, s};
  }
  double a = std::max(n_lo, best.n - step), b = std::min(n_hi, best.n + step);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 200; ++i) {
    const double x1 = b - g * (b - a), x2 = a + g * (b - a);
    if (grid_objective(pts, x1, nullptr) < grid_objective(pts, x2, nullptr)) {
      b = x2;
    } else {
      a = x1;
    }
  }
  GridFit refined;
  refined.n = 0.5 * (a + b);
  refined.rss = grid_objective(pts, refined.n, &refined.c);
  return refined.rss < best.rss ? refined : best;
}

// Trailing mean by direct summation.
inline std::vector<double> naive_moving_average(const std::vector<double>& x, std::size_t w) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t lo = i + 1 >= w ? i + 1 - w : 0;
    double s = 0.0;
    for (std::size_t j = lo; j <= i; ++j) s += x[j];
    out[i] = s / static_cast<double>(i - lo + 1);
  }
  return out;
}

// t lies in [k*T_s + off, k*T_s + off + T_w) for some integer k.
inline bool in_scan_window(const DeviceTimingConfig& rx, std::int64_t t) {
  std::int64_t r = (t - rx.phase_offset_ms) % rx.scan_interval_ms;
  if (r < 0) r += rx.scan_interval_ms;
  return r < rx.scan_window_ms;
}

// Labelled samples following the hand-to-hand per-distance statistics: one
// contiguous run of `per_distance` readings per listed distance, 100 ms apart.
inline std::vector<RssSample> synth_case(const std::vector<double>& distances,
                                         std::size_t per_distance, std::uint64_t seed,
                                         double noise_scale = 1.0, BodyCase body_case = BodyCase::HH) {
  const auto profile = RssProfile::hand_to_hand();
  std::mt19937_64 rng(seed);
  std::vector<RssSample> out;
  std::int64_t t = 0;
  for (const double d : distances) {
    std::normal_distribution<double> noise(profile.mean_at(d),
                                           noise_scale * std::sqrt(profile.variance_at(d)));
    for (std::size_t i = 0; i < per_distance; ++i) {
      RssSample s;
      s.rss = noise(rng);
      s.true_distance = d;
      s.timestamp_ms = t;
      s.elapsed_ms = i == 0 ? 0 : 100;
      s.tx_id = "A";
      s.rx_id = "B";
      s.body_case = body_case;
      out.push_back(s);
      t += 100;
    }
    t += 5000;
  }
  return out;
}

// Samples that follow `model` exactly in the mean with the hand-to-hand
// variance at each distance. Each distance gets `episodes` separate runs.
inline std::vector<RssSample> synth_model_case(const PathLossModel& model,
                                               const std::vector<double>& distances,
                                               std::size_t episodes, std::size_t per_episode,
                                               std::uint64_t seed) {
  const auto profile = RssProfile::hand_to_hand();
  std::mt19937_64 rng(seed);
  std::vector<RssSample> out;
  std::int64_t t = 0;
  for (std::size_t e = 0; e < episodes; ++e) {
    for (const double d : distances) {
      std::normal_distribution<double> noise(predict_rss(model, d), std::sqrt(profile.variance_at(d)));
      for (std::size_t i = 0; i < per_episode; ++i) {
        RssSample s;
        s.rss = noise(rng);
        s.true_distance = d;
        s.timestamp_ms = t;
        s.elapsed_ms = i == 0 ? 0 : 100;
        s.tx_id = "A";
        s.rx_id = "B";
        out.push_back(s);
        t += 100;
      }
      t += 5000;
    }
  }
  return out;
}

inline const std::vector<double>& table_distances() {
  static const std::vector<double> d = {0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4,
                                        1.6, 1.8, 2.0, 3.0, 4.0, 5.0};
  return d;
}

// Rows in the default column order: distance, phone, MAC, payload, RSS,
// elapsed, timestamp.
inline void write_case_csv(std::ostream& out, const std::vector<RssSample>& samples,
                           bool header = true) {
  if (header) out << "distance,name,mac,payload,rss,elapsed,timestamp\n";
  for (const auto& s : samples) {
    out.precision(17);
    out << *s.true_distance << ',' << s.tx_id << ",AA:BB:CC:DD:EE:FF,00ff," << s.rss << ','
        << s.elapsed_ms << ',' << s.timestamp_ms << '\n';
  }
}

}  // namespace sct::testing
