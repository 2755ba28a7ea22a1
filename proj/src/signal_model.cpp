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

#include "sct/signal_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "sct/errors.hpp"
#include "text_util.hpp"

namespace sct {

namespace {

constexpr std::array<std::string_view, 6> kCaseNames = {"HH", "HP", "HB", "PB", "PP", "BB"};

// Hand-to-hand reference measurements: distance, count, mean, variance.
constexpr std::array<DistanceStats, 13> kHandToHand = {{
    {0.2, 1548, -58.9994, 48.8203},
    {0.4, 1203, -62.9967, 9.8685},
    {0.6, 934, -70.3084, 10.7666},
    {0.8, 1080, -74.3167, 16.6930},
    {1.0, 1631, -79.3476, 14.3153},
    {1.2, 1573, -74.7788, 12.7322},
    {1.4, 3986, -80.6468, 41.5620},
    {1.6, 1282, -89.6599, 11.8577},
    {1.8, 1344, -79.4903, 4.8413},
    {2.0, 1101, -80.1835, 15.0263},
    {3.0, 886, -82.1704, 16.0150},
    {4.0, 1220, -88.5475, 10.7254},
    {5.0, 2115, -90.4591, 38.0261},
}};

constexpr int kMaxIterations = 200;
constexpr double kGradientTolerance = 1e-10;

}  // namespace

std::string_view to_string(BodyCase c) { return kCaseNames[static_cast<std::size_t>(c)]; }

BodyCase parse_body_case(std::string_view s) {
  s = detail::trim(s);
  for (std::size_t i = 0; i < kCaseNames.size(); ++i) {
    if (kCaseNames[i] == s) return static_cast<BodyCase>(i);
  }
  throw ParseError(fmt::format("unknown body-position case '{}'", s));
}

PathLossModel::PathLossModel(double exponent, double constant) : n_(exponent), c_(constant) {
  if (!(exponent > 0.0) || !std::isfinite(exponent) || !std::isfinite(constant)) {
    throw DomainError(fmt::format("invalid path loss model n={} c={}", exponent, constant));
  }
}

DistanceEstimate estimate_distance(const PathLossModel& model, double rss, double max_distance) {
  const double excess = rss - model.c();
  if (!(excess > 0.0)) return {max_distance, true};
  return {std::exp((1.0 / model.n()) * std::log(1.0 / excess)), false};
}

double predict_rss(const PathLossModel& model, double distance) {
  if (!(distance > 0.0)) {
    throw DomainError(fmt::format("distance must be positive, got {}", distance));
  }
  return model.c() + std::pow(distance, -model.n());
}

double residual_sum_of_squares(const PathLossModel& model, std::span<const FitPoint> points) {
  double sum = 0.0;
  for (const auto& p : points) {
    const double r = p.mean_rss - predict_rss(model, p.distance);
    sum += r * r;
  }
  return sum;
}

PathLossFit fit_path_loss(std::span<const FitPoint> points) {
  if (points.size() < 2) {
    throw FitDegenerateError("path loss fit needs at least two points");
  }
  std::set<double> distinct;
  double min_rss = points.front().mean_rss;
  for (const auto& p : points) {
    if (!(p.distance > 0.0) || !std::isfinite(p.mean_rss)) {
      throw FitDegenerateError(fmt::format("invalid fit point ({}, {})", p.distance, p.mean_rss));
    }
    distinct.insert(p.distance);
    min_rss = std::min(min_rss, p.mean_rss);
  }
  if (distinct.size() < 2) {
    throw FitDegenerateError("path loss fit needs at least two distinct distances");
  }

  const auto cost = [&](double n, double c) {
    double s = 0.0;
    for (const auto& p : points) {
      const double r = p.mean_rss - (c + std::pow(p.distance, -n));
      s += r * r;
    }
    return s;
  };

  double n = 2.0;
  double c = min_rss - 1.0;
  double current = cost(n, c);
  double mu = -1.0;
  double nu = 2.0;
  bool converged = false;
  int iter = 0;

  for (; iter < kMaxIterations; ++iter) {
    // Normal equations of the linearized residual.
    double a11 = 0.0, a12 = 0.0, a22 = 0.0, g1 = 0.0, g2 = 0.0;
    for (const auto& p : points) {
      const double dn = std::pow(p.distance, -n);
      const double jn = -std::log(p.distance) * dn;
      const double r = p.mean_rss - (c + dn);
      a11 += jn * jn;
      a12 += jn;
      a22 += 1.0;
      g1 += jn * r;
      g2 += r;
    }
    if (std::max(std::abs(g1), std::abs(g2)) < kGradientTolerance) {
      converged = true;
      break;
    }
    if (mu < 0.0) mu = 1e-3 * std::max(a11, a22);

    bool stepped = false;
    while (!stepped) {
      const double b11 = a11 + mu * std::max(a11, 1e-12);
      const double b22 = a22 + mu * a22;
      const double det = b11 * b22 - a12 * a12;
      const double step_n = (b22 * g1 - a12 * g2) / det;
      const double step_c = (b11 * g2 - a12 * g1) / det;
      if (std::abs(step_n) <= 1e-15 * (std::abs(n) + 1e-15) &&
          std::abs(step_c) <= 1e-15 * (std::abs(c) + 1e-15)) {
        converged = true;
        break;
      }
      const double trial_n = n + step_n;
      const double trial_c = c + step_c;
      const double trial = trial_n > 0.0 ? cost(trial_n, trial_c) : HUGE_VAL;
      // Gain ratio against the decrease predicted by the linear model.
      const double predicted = step_n * (mu * std::max(a11, 1e-12) * step_n + g1) +
                               step_c * (mu * a22 * step_c + g2);
      const double rho = predicted > 0.0 ? (current - trial) / predicted : -1.0;
      if (std::isfinite(trial) && trial <= current && rho > 0.0) {
        n = trial_n;
        c = trial_c;
        current = trial;
        mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
        nu = 2.0;
        stepped = true;
      } else {
        mu *= nu;
        nu *= 2.0;
        if (!std::isfinite(mu) || mu > 1e300) {
          converged = true;
          break;
        }
      }
    }
    if (converged) break;
  }

  if (!(n > 0.0) || !std::isfinite(c)) {
    throw FitDegenerateError("path loss fit left the valid parameter region");
  }
  return PathLossFit{PathLossModel(n, c), current, iter, converged};
}

double synthesize_rss(const PathLossModel& model, double distance, double noise_var,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return synthesize_rss(model, distance, noise_var, rng);
}

double synthesize_rss(const PathLossModel& model, double distance, double noise_var,
                      std::mt19937_64& rng) {
  if (!(noise_var >= 0.0)) {
    throw DomainError(fmt::format("noise variance must be nonnegative, got {}", noise_var));
  }
  const double mean = predict_rss(model, distance);
  std::normal_distribution<double> unit(0.0, 1.0);
  return mean + std::sqrt(noise_var) * unit(rng);
}

std::span<const DistanceStats> hand_to_hand_reference() { return kHandToHand; }

std::vector<FitPoint> fit_points(std::span<const DistanceStats> stats) {
  std::vector<FitPoint> out;
  out.reserve(stats.size());
  for (const auto& s : stats) out.push_back({s.distance, s.mean_rss});
  return out;
}

PathLossModel reference_model() {
  const auto points = fit_points(hand_to_hand_reference());
  return fit_path_loss(points).model;
}

RssProfile::RssProfile(std::vector<DistanceStats> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw DomainError("RSS profile needs at least one row");
  std::sort(rows_.begin(), rows_.end(),
            [](const DistanceStats& a, const DistanceStats& b) { return a.distance < b.distance; });
}

RssProfile RssProfile::hand_to_hand() {
  return RssProfile({kHandToHand.begin(), kHandToHand.end()});
}

double RssProfile::mean_at(double distance) const {
  return interpolate(distance, &DistanceStats::mean_rss);
}

double RssProfile::variance_at(double distance) const {
  return interpolate(distance, &DistanceStats::var_rss);
}

double RssProfile::interpolate(double distance, double DistanceStats::*field) const {
  if (distance <= rows_.front().distance) return rows_.front().*field;
  if (distance >= rows_.back().distance) return rows_.back().*field;
  const auto hi = std::upper_bound(
      rows_.begin(), rows_.end(), distance,
      [](double d, const DistanceStats& row) { return d < row.distance; });
  const auto lo = hi - 1;
  const double t = (distance - lo->distance) / (hi->distance - lo->distance);
  return (*lo).*field + t * ((*hi).*field - (*lo).*field);
}

std::string format_model(const PathLossModel& model) {
  return fmt::format("n={}\nc={}\n", model.n(), model.c());
}

PathLossModel parse_model(std::string_view text) {
  std::optional<double> n, c;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (detail::is_blank_or_comment(line)) continue;
    const auto kv = detail::parse_key_value(line);
    if (!kv) throw ParseError(fmt::format("model file: expected key=value, got '{}'", line));
    const auto value = detail::parse_double(kv->value);
    if (kv->key == "n") {
      n = value;
    } else if (kv->key == "c") {
      c = value;
    } else {
      continue;
    }
    if (!value) throw ParseError(fmt::format("model file: bad number for '{}'", kv->key));
  }
  if (!n || !c) throw ParseError("model file must define both n and c");
  return PathLossModel(*n, *c);
}

void save_model(const std::filesystem::path& path, const PathLossModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write model file {}", path.string()));
  out << format_model(model);
}

PathLossModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read model file {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace sct
