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

#include "sct/risk_eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "sct/dataset.hpp"
#include "sct/errors.hpp"
#include "sct/filtering.hpp"

namespace sct {

namespace {

std::size_t label_index(RiskLabel l) {
  if (l == RiskLabel::High) return 0;
  if (l == RiskLabel::Low) return 1;
  throw DomainError("confusion matrices take +1/-1 labels only");
}

std::uint64_t repeat_seed(std::uint64_t seed, std::size_t repeat) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(repeat) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double true_distance_of(const RssSample& s) {
  if (!s.true_distance) throw DomainError("evaluation needs samples with a true distance");
  return *s.true_distance;
}

std::vector<double> rss_values(std::span<const RssSample> samples, std::size_t window) {
  if (window > 1) return filter_by_segment(samples, window);
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.rss);
  return out;
}

PathLossModel fit_on(std::span<const RssSample> samples, std::span<const std::size_t> idx) {
  std::map<double, std::pair<double, std::size_t>> sums;
  for (const auto i : idx) {
    auto& [sum, count] = sums[true_distance_of(samples[i])];
    sum += samples[i].rss;
    ++count;
  }
  std::vector<FitPoint> points;
  for (const auto& [d, acc] : sums) {
    points.push_back({d, acc.first / static_cast<double>(acc.second)});
  }
  return fit_path_loss(points).model;
}

}  // namespace

std::string_view to_string(Truth t) {
  switch (t) {
    case Truth::High:
      return "h";
    case Truth::Low:
      return "l";
    case Truth::Absent:
      return "a";
  }
  return "a";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::TruePositive:
      return "true_positive";
    case Outcome::TrueNegative:
      return "true_negative";
    case Outcome::FalsePositive:
      return "false_positive";
    case Outcome::FalseNegative:
      return "false_negative";
    case Outcome::Miss:
      return "miss";
    case Outcome::CorrectLow:
      return "correct_low";
  }
  return "miss";
}

Outcome classify_outcome(RiskLabel predicted, Truth truth) {
  switch (predicted) {
    case RiskLabel::High:
      return truth == Truth::High ? Outcome::TruePositive : Outcome::FalsePositive;
    case RiskLabel::Low:
      return truth == Truth::Low ? Outcome::CorrectLow : Outcome::FalseNegative;
    case RiskLabel::Absent:
      return truth == Truth::Absent ? Outcome::TrueNegative : Outcome::Miss;
  }
  return Outcome::Miss;
}

void OutcomeTally::add(Outcome o) {
  switch (o) {
    case Outcome::TruePositive:
      ++tp;
      break;
    case Outcome::TrueNegative:
      ++tn;
      break;
    case Outcome::FalsePositive:
      ++fp;
      break;
    case Outcome::FalseNegative:
      ++fn;
      break;
    case Outcome::Miss:
      ++miss;
      break;
    case Outcome::CorrectLow:
      ++correct_low;
      break;
  }
}

void ConfusionMatrix::add(RiskLabel predicted, RiskLabel truth) {
  ++counts[label_index(predicted)][label_index(truth)];
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) counts[i][j] += other.counts[i][j];
  }
}

std::size_t ConfusionMatrix::total() const {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

double ConfusionMatrix::accuracy() const {
  const auto n = total();
  if (n == 0) throw DomainError("accuracy of an empty confusion matrix");
  return static_cast<double>(correct()) / static_cast<double>(n);
}

std::pair<ConfusionMatrix, double> confusion_and_accuracy(std::span<const RiskLabel> predictions,
                                                          std::span<const RiskLabel> truths) {
  if (predictions.size() != truths.size() || predictions.empty()) {
    throw DomainError("predictions and truths must be nonempty and of equal length");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predictions.size(); ++i) cm.add(predictions[i], truths[i]);
  return {cm, cm.accuracy()};
}

AccuracyReport summarize_accuracies(std::vector<double> accuracies, ConfusionMatrix confusion) {
  if (accuracies.empty()) throw DomainError("no accuracies to summarize");
  AccuracyReport r;
  const double n = static_cast<double>(accuracies.size());
  r.mean = std::accumulate(accuracies.begin(), accuracies.end(), 0.0) / n;
  double half = 0.0;
  if (accuracies.size() > 1) {
    double ss = 0.0;
    for (const auto a : accuracies) ss += (a - r.mean) * (a - r.mean);
    half = 1.959963984540054 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  r.ci_lo = std::max(0.0, r.mean - half);
  r.ci_hi = std::min(1.0, r.mean + half);
  r.repeats = accuracies.size();
  r.accuracies = std::move(accuracies);
  r.confusion = confusion;
  return r;
}

AccuracyReport evaluate_case(std::span<const RssSample> samples, const EvalConfig& config) {
  if (config.repeats == 0) throw DomainError("evaluation needs at least one repeat");
  if (config.window == 0) throw DomainError("moving average window must be at least 1");
  std::vector<RiskLabel> labels;
  labels.reserve(samples.size());
  std::size_t high = 0;
  for (const auto& s : samples) {
    labels.push_back(threshold_classify(true_distance_of(s), config.threshold_m));
    high += labels.back() == RiskLabel::High ? 1 : 0;
  }
  if (high == 0 || high == samples.size()) {
    throw DegenerateEvaluationError(fmt::format(
        "all samples fall in one class at threshold {} m", config.threshold_m));
  }

  const auto rss = rss_values(samples, config.window);
  std::vector<FeatureVector> features;
  if (config.method != Method::PL) {
    features.reserve(rss.size());
    for (const auto v : rss) features.push_back(encode_rss_8bit(v));
  }

  std::vector<double> accuracies;
  ConfusionMatrix total;
  for (std::size_t r = 0; r < config.repeats; ++r) {
    const auto seed = repeat_seed(config.seed, r);
    const auto split = split_indices(samples.size(), config.train_fraction, seed);
    if (split.degenerate()) throw DegenerateEvaluationError("train/test split left a side empty");

    ConfusionMatrix cm;
    if (config.method == Method::PL) {
      const auto model = fit_on(samples, split.train);
      for (const auto i : split.test) {
        cm.add(pl_classify(model, rss[i], config.threshold_m, config.max_distance).label, labels[i]);
      }
    } else {
      std::vector<LabeledFeature> train_set;
      train_set.reserve(split.train.size());
      for (const auto i : split.train) train_set.push_back({features[i], labels[i]});
      auto model = train(config.method, train_set, config.hyper, seed);
      for (const auto i : split.test) cm.add(model.predict(features[i]), labels[i]);
    }
    accuracies.push_back(cm.accuracy());
    total.merge(cm);
  }
  return summarize_accuracies(std::move(accuracies), total);
}

std::vector<WindowPoint> sweep_window(std::span<const RssSample> samples, const EvalConfig& config,
                                      std::span<const std::size_t> windows) {
  std::vector<WindowPoint> out;
  for (const auto w : windows) {
    auto cfg = config;
    cfg.window = w;
    out.push_back({w, evaluate_case(samples, cfg)});
  }
  return out;
}

std::vector<ThresholdPoint> sweep_threshold(std::span<const RssSample> samples,
                                            const EvalConfig& config,
                                            std::span<const Method> methods,
                                            std::span<const double> thresholds) {
  std::vector<ThresholdPoint> out;
  for (const auto m : methods) {
    for (const auto t : thresholds) {
      auto cfg = config;
      cfg.method = m;
      cfg.threshold_m = t;
      out.push_back({m, t, evaluate_case(samples, cfg)});
    }
  }
  return out;
}

std::vector<Episode> find_episodes(std::span<const RssSample> samples) {
  std::vector<Episode> out;
  std::size_t begin = 0;
  while (begin < samples.size()) {
    const double d = true_distance_of(samples[begin]);
    std::size_t end = begin + 1;
    while (end < samples.size() && samples[end].tx_id == samples[begin].tx_id &&
           samples[end].rx_id == samples[begin].rx_id && true_distance_of(samples[end]) == d) {
      ++end;
    }
    out.push_back({begin, end, d});
    begin = end;
  }
  return out;
}

std::vector<TimePoint> accuracy_over_time(std::span<const RssSample> samples,
                                          const PathLossModel& model, double threshold_m,
                                          std::span<const double> durations_s, EpisodeMode mode,
                                          double max_distance) {
  const auto episodes = find_episodes(samples);
  std::vector<TimePoint> out;
  for (const auto duration : durations_s) {
    if (!(duration > 0.0)) throw DomainError("contact durations must be positive");
    const double span_ms = duration * 1000.0;
    std::size_t correct = 0, contacts = 0;
    const auto score = [&](std::size_t b, std::size_t e, double truth_distance) {
      double sum = 0.0;
      for (std::size_t i = b; i < e; ++i) sum += samples[i].rss;
      const double mean = sum / static_cast<double>(e - b);
      const auto predicted = pl_classify(model, mean, threshold_m, max_distance).label;
      correct += predicted == threshold_classify(truth_distance, threshold_m) ? 1 : 0;
      ++contacts;
    };
    for (const auto& ep : episodes) {
      std::size_t b = ep.begin;
      while (b < ep.end) {
        const auto t0 = samples[b].timestamp_ms;
        std::size_t e = b + 1;
        while (e < ep.end && static_cast<double>(samples[e].timestamp_ms - t0) < span_ms) ++e;
        score(b, e, ep.true_distance);
        if (mode == EpisodeMode::Prefix) break;
        b = e;
      }
    }
    out.push_back({duration, static_cast<double>(correct) / static_cast<double>(contacts), contacts});
  }
  return out;
}

double ErrorCdf::quantile(double q) const {
  if (points.empty()) throw DomainError("quantile of an empty CDF");
  for (const auto& [err, frac] : points) {
    if (frac >= q - 1e-12) return err;
  }
  return points.back().first;
}

ErrorCdf distance_error_cdf(std::span<const RssSample> samples, const PathLossModel& model,
                            std::size_t window, double max_distance) {
  if (samples.empty()) throw DomainError("no samples for the error CDF");
  const auto rss = rss_values(samples, window);
  std::vector<double> errors;
  errors.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto est = estimate_distance(model, rss[i], max_distance);
    errors.push_back(std::abs(est.meters - true_distance_of(samples[i])));
  }
  std::sort(errors.begin(), errors.end());
  ErrorCdf cdf;
  const double n = static_cast<double>(errors.size());
  cdf.points.reserve(errors.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    cdf.points.emplace_back(errors[i], static_cast<double>(i + 1) / n);
    sum += errors[i];
  }
  cdf.mae = sum / n;
  return cdf;
}

PathLossModel fit_case_model(std::span<const RssSample> samples) {
  const auto stats = summarize(samples);
  const auto points = fit_points(stats);
  return fit_path_loss(points).model;
}

}  // namespace sct
