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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "sct/classifiers.hpp"
#include "sct/signal_model.hpp"

namespace sct {

// Ground truth of a contact: high risk, low risk, or absent (no contact).
enum class Truth { High, Low, Absent };

enum class Outcome { TruePositive, TrueNegative, FalsePositive, FalseNegative, Miss, CorrectLow };

std::string_view to_string(Truth t);     // "h", "l", "a"
std::string_view to_string(Outcome o);

// (+1,h) tp; (0,a) tn; (+1,a),(+1,l) fp; (-1,a),(-1,h) fn; (0,h),(0,l) miss;
// (-1,l) is a correct low-risk call.
Outcome classify_outcome(RiskLabel predicted, Truth truth);

struct OutcomeTally {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t miss = 0;
  std::size_t correct_low = 0;

  void add(Outcome o);
  std::size_t total() const { return tp + tn + fp + fn + miss + correct_low; }
};

// Counts indexed [predicted][truth] with index 0 = +1 and 1 = -1.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, 2>, 2> counts{};

  void add(RiskLabel predicted, RiskLabel truth);
  void merge(const ConfusionMatrix& other);
  std::size_t total() const;
  std::size_t correct() const { return counts[0][0] + counts[1][1]; }
  double accuracy() const;
};

// Throws DomainError on empty or mismatched inputs or labels other than +1/-1.
std::pair<ConfusionMatrix, double> confusion_and_accuracy(std::span<const RiskLabel> predictions,
                                                          std::span<const RiskLabel> truths);

struct AccuracyReport {
  double mean = 0.0;
  double ci_lo = 0.0;  // 95% normal-approximation interval over repeats
  double ci_hi = 0.0;
  std::size_t repeats = 0;
  std::vector<double> accuracies;
  ConfusionMatrix confusion;  // summed over repeats
};

AccuracyReport summarize_accuracies(std::vector<double> accuracies, ConfusionMatrix confusion = {});

inline constexpr std::size_t kDefaultRepeats = 30;

struct EvalConfig {
  Method method = Method::DT;
  std::size_t window = 1;
  double threshold_m = kDefaultThresholdM;
  std::uint64_t seed = 0;
  std::size_t repeats = kDefaultRepeats;
  double train_fraction = 0.8;
  Hyperparams hyper;
  double max_distance = kDefaultMaxDistance;
};

// Per repeat: segment-wise moving average, labels from true distance,
// seeded 80/20 split, train (or fit the path loss model on the training
// split's per-distance means), score the test split.
// Throws DegenerateEvaluationError for single-class data or an empty split.
AccuracyReport evaluate_case(std::span<const RssSample> samples, const EvalConfig& config);

struct WindowPoint {
  std::size_t window = 1;
  AccuracyReport report;
};

std::vector<WindowPoint> sweep_window(std::span<const RssSample> samples, const EvalConfig& config,
                                      std::span<const std::size_t> windows);

struct ThresholdPoint {
  Method method = Method::PL;
  double threshold_m = kDefaultThresholdM;
  AccuracyReport report;
};

std::vector<ThresholdPoint> sweep_threshold(std::span<const RssSample> samples,
                                            const EvalConfig& config,
                                            std::span<const Method> methods,
                                            std::span<const double> thresholds);

// Contact episodes: contiguous runs of equal true distance per (tx, rx).
struct Episode {
  std::size_t begin = 0;  // index range into the sample list
  std::size_t end = 0;
  double true_distance = 0.0;
};

std::vector<Episode> find_episodes(std::span<const RssSample> samples);

enum class EpisodeMode {
  Prefix,   // one contact per episode: its first T seconds
  Chunked,  // consecutive T-second contacts covering each episode
};

struct TimePoint {
  double duration_s = 0.0;
  double accuracy = 0.0;
  std::size_t contacts = 0;
};

// Mean RSS over each contact is classified with the path loss rule and
// scored against the episode's true-distance label.
std::vector<TimePoint> accuracy_over_time(std::span<const RssSample> samples,
                                          const PathLossModel& model, double threshold_m,
                                          std::span<const double> durations_s,
                                          EpisodeMode mode = EpisodeMode::Prefix,
                                          double max_distance = kDefaultMaxDistance);

struct ErrorCdf {
  std::vector<std::pair<double, double>> points;  // (|error| m, cumulative fraction)
  double mae = 0.0;

  // Smallest error whose cumulative fraction reaches q.
  double quantile(double q) const;
};

ErrorCdf distance_error_cdf(std::span<const RssSample> samples, const PathLossModel& model,
                            std::size_t window, double max_distance = kDefaultMaxDistance);

// Fits the path loss model to the per-distance mean RSS of the samples.
PathLossModel fit_case_model(std::span<const RssSample> samples);

}  // namespace sct
