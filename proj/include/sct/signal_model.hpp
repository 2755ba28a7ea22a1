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
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sct {

// Where the two phones were carried during a measurement: hand, pocket or
// backpack on each side.
enum class BodyCase { HH, HP, HB, PB, PP, BB };

inline constexpr BodyCase kAllCases[] = {BodyCase::HH, BodyCase::HP, BodyCase::HB,
                                         BodyCase::PB, BodyCase::PP, BodyCase::BB};

std::string_view to_string(BodyCase c);
// Throws ParseError for anything other than the six two-letter labels.
BodyCase parse_body_case(std::string_view s);

struct RssSample {
  double rss = 0.0;                     // dBm
  std::int64_t timestamp_ms = 0;
  std::optional<double> true_distance;  // meters, absent for field data
  std::string tx_id;
  std::string rx_id;
  BodyCase body_case = BodyCase::HH;
  std::int64_t elapsed_ms = 0;  // since the previous packet from the same tx
};

// Distance model P_r - c = d^(-n), with P_r in dBm.
class PathLossModel {
 public:
  PathLossModel(double exponent, double constant);

  double n() const { return n_; }
  double c() const { return c_; }

  friend bool operator==(const PathLossModel&, const PathLossModel&) = default;

 private:
  double n_;
  double c_;
};

inline constexpr double kDefaultMaxDistance = 20.0;

struct DistanceEstimate {
  double meters = 0.0;
  // Set when rss <= c and the logarithm is undefined; meters then holds the
  // configured maximum distance.
  bool saturated = false;
};

// d = exp((1/n) * ln(1 / (rss - c))).
DistanceEstimate estimate_distance(const PathLossModel& model, double rss,
                                   double max_distance = kDefaultMaxDistance);

// c + d^(-n). Throws DomainError for distance <= 0.
double predict_rss(const PathLossModel& model, double distance);

struct FitPoint {
  double distance = 0.0;
  double mean_rss = 0.0;
};

struct PathLossFit {
  PathLossModel model;
  double residual_ss = 0.0;  // sum of squared RSS residuals, dBm^2
  int iterations = 0;
  bool converged = false;
};

double residual_sum_of_squares(const PathLossModel& model, std::span<const FitPoint> points);

// Levenberg-Marquardt least squares on rss = c + d^(-n), started from
// n = 2, c = min(mean_rss) - 1. Throws FitDegenerateError when fewer than two
// points are given or all distances coincide.
PathLossFit fit_path_loss(std::span<const FitPoint> points);

// predict_rss plus zero-mean Gaussian noise of the given variance.
double synthesize_rss(const PathLossModel& model, double distance, double noise_var,
                      std::uint64_t seed);
double synthesize_rss(const PathLossModel& model, double distance, double noise_var,
                      std::mt19937_64& rng);

struct DistanceStats {
  double distance = 0.0;
  std::size_t count = 0;
  double mean_rss = 0.0;
  double var_rss = 0.0;
};

// The 13 per-distance statistics of the hand-to-hand measurement campaign.
std::span<const DistanceStats> hand_to_hand_reference();

std::vector<FitPoint> fit_points(std::span<const DistanceStats> stats);

// The model fitted to hand_to_hand_reference().
PathLossModel reference_model();

// Piecewise-linear interpolation of mean and variance over a per-distance
// table, clamped to the end rows. Used as the noise lookup for simulation
// and to synthesize labelled data with realistic separation.
class RssProfile {
 public:
  explicit RssProfile(std::vector<DistanceStats> rows);
  static RssProfile hand_to_hand();

  double mean_at(double distance) const;
  double variance_at(double distance) const;
  const std::vector<DistanceStats>& rows() const { return rows_; }

 private:
  double interpolate(double distance, double DistanceStats::*field) const;
  std::vector<DistanceStats> rows_;
};

// Plain-text key/value model file: "n=<value>" and "c=<value>" lines.
std::string format_model(const PathLossModel& model);
PathLossModel parse_model(std::string_view text);
void save_model(const std::filesystem::path& path, const PathLossModel& model);
PathLossModel load_model(const std::filesystem::path& path);

}  // namespace sct
