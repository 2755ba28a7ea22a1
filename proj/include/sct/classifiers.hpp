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
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sct/signal_model.hpp"

namespace sct {

inline constexpr std::size_t kFeatureBits = 8;
inline constexpr double kDefaultThresholdM = 2.0;

// Eight binary features, most significant bit first.
struct FeatureVector {
  std::array<std::uint8_t, kFeatureBits> bits{};

  std::uint8_t code() const;
  static FeatureVector from_code(std::uint8_t code);

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

enum class RiskLabel : int { Low = -1, Absent = 0, High = 1 };

std::string_view to_string(RiskLabel label);  // "+1", "-1", "0"

// The five learned classifiers plus the path loss threshold baseline.
enum class Method { DT, LDA, NB, KNN, SVM, PL };

inline constexpr Method kAllMethods[] = {Method::DT,  Method::LDA, Method::NB,
                                         Method::KNN, Method::SVM, Method::PL};

std::string_view to_string(Method m);
Method parse_method(std::string_view s);  // case-insensitive; throws ParseError

// b = clamp(round(-rss), 0, 255), big-endian bits.
FeatureVector encode_rss_8bit(double rss);

// +1 when distance <= threshold, else -1. Throws DomainError on a negative
// distance or nonpositive threshold.
RiskLabel threshold_classify(double distance, double threshold);

struct PlDecision {
  RiskLabel label = RiskLabel::Low;
  DistanceEstimate estimate;
};

// Threshold rule on the path loss distance estimate; saturated estimates are
// low risk.
PlDecision pl_classify(const PathLossModel& model, double rss, double threshold,
                       double max_distance = kDefaultMaxDistance);

struct Hyperparams {
  int dt_max_depth = -1;  // negative: uncapped
  std::size_t knn_k = 5;
  double lda_ridge = 1e-6;
  int svm_epochs = 200;
  double svm_learning_rate = 0.01;
  double svm_l2 = 1e-3;
};

struct LabeledFeature {
  FeatureVector feature;
  RiskLabel label = RiskLabel::High;
};

// CART tree over the bits. Node 0 is the root; the left child takes bit 0.
struct DecisionTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    int left = -1;
    int right = -1;
    RiskLabel label = RiskLabel::High;
  };
  std::vector<Node> nodes;
};

// Decision w.x + b >= 0 -> +1. Shared by LDA and SVM.
struct LinearModel {
  std::array<double, kFeatureBits> weights{};
  double bias = 0.0;
};

// Bernoulli likelihood per bit.
struct NaiveBayes {
  double log_prior_high = 0.0;
  double log_prior_low = 0.0;
  std::array<double, kFeatureBits> p_high{};  // P(bit = 1 | high)
  std::array<double, kFeatureBits> p_low{};
};

// Label counts per 8-bit code; prediction votes over the k nearest codes by
// Hamming distance, keeping every training point tied with the k-th.
struct NearestNeighbors {
  std::size_t k = 5;
  std::array<std::array<std::uint32_t, 2>, 256> counts{};  // [code][high, low]
};

struct TrainMeta {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t window = 1;
};

using ClassifierParams = std::variant<DecisionTree, LinearModel, NaiveBayes, NearestNeighbors>;

class TrainedClassifier {
 public:
  TrainedClassifier(Method kind, ClassifierParams params, TrainMeta meta = {});

  Method kind() const { return kind_; }
  const ClassifierParams& params() const { return params_; }
  const TrainMeta& meta() const { return meta_; }

  RiskLabel predict(const FeatureVector& feature) const;

 private:
  Method kind_;
  ClassifierParams params_;
  TrainMeta meta_;
};

// Throws DegenerateTrainingError on empty input, or on single-class input
// for LDA, NB and SVM. Throws DomainError for Method::PL.
TrainedClassifier train(Method kind, std::span<const LabeledFeature> samples,
                        const Hyperparams& hyper = {}, std::uint64_t seed = 0);

RiskLabel predict(const TrainedClassifier& model, const FeatureVector& feature);

// Text dump: the tree as indented node lines, linear models as weight
// lists. parse_classifier reads it back.
std::string dump_classifier(const TrainedClassifier& model);
TrainedClassifier parse_classifier(std::string_view text);

}  // namespace sct
