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

#include "sct/classifiers.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "sct/errors.hpp"
#include "text_util.hpp"

namespace sct {

namespace {

bool is_high(RiskLabel l) { return l == RiskLabel::High; }

struct ClassCounts {
  std::size_t high = 0;
  std::size_t low = 0;
};

ClassCounts count_classes(std::span<const LabeledFeature> samples) {
  ClassCounts c;
  for (const auto& s : samples) {
    if (s.label == RiskLabel::High) {
      ++c.high;
    } else if (s.label == RiskLabel::Low) {
      ++c.low;
    } else {
      throw DegenerateTrainingError("training labels must be +1 or -1");
    }
  }
  return c;
}

// Ties go to high risk: a false alarm is the safer error.
RiskLabel majority(std::size_t high, std::size_t low) {
  return high >= low ? RiskLabel::High : RiskLabel::Low;
}

double gini(std::size_t high, std::size_t low) {
  const double n = static_cast<double>(high + low);
  if (n == 0.0) return 0.0;
  const double p = static_cast<double>(high) / n;
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

class TreeBuilder {
 public:
  TreeBuilder(std::span<const LabeledFeature> samples, int max_depth)
      : samples_(samples), max_depth_(max_depth) {}

  DecisionTree build() {
    std::vector<std::size_t> all(samples_.size());
    std::iota(all.begin(), all.end(), 0);
    grow(all, 0);
    return std::move(tree_);
  }

 private:
  int grow(const std::vector<std::size_t>& idx, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    std::size_t high = 0;
    for (const auto i : idx) high += is_high(samples_[i].label) ? 1 : 0;
    const std::size_t low = idx.size() - high;
    tree_.nodes[id].label = majority(high, low);
    if (high == 0 || low == 0) return id;
    if (max_depth_ >= 0 && depth >= max_depth_) return id;

    // Best Gini decrease among bits that still vary. A zero-gain split is
    // still taken so consistent data always ends in pure leaves.
    const double parent = gini(high, low);
    int best = -1;
    double best_gain = 0.0;
    for (std::size_t f = 0; f < kFeatureBits; ++f) {
      std::size_t ones_high = 0, ones_low = 0;
      for (const auto i : idx) {
        if (samples_[i].feature.bits[f]) {
          (is_high(samples_[i].label) ? ones_high : ones_low) += 1;
        }
      }
      const std::size_t ones = ones_high + ones_low;
      if (ones == 0 || ones == idx.size()) continue;
      const double n = static_cast<double>(idx.size());
      const double child = (static_cast<double>(ones) / n) * gini(ones_high, ones_low) +
                           (static_cast<double>(idx.size() - ones) / n) *
                               gini(high - ones_high, low - ones_low);
      const double gain = parent - child;
      if (best < 0 || gain > best_gain + 1e-12) {
        best = static_cast<int>(f);
        best_gain = gain;
      }
    }
    if (best < 0) return id;

    std::vector<std::size_t> zeros, ones;
    for (const auto i : idx) {
      (samples_[i].feature.bits[static_cast<std::size_t>(best)] ? ones : zeros).push_back(i);
    }
    const int left = grow(zeros, depth + 1);
    const int right = grow(ones, depth + 1);
    tree_.nodes[id].feature = best;
    tree_.nodes[id].left = left;
    tree_.nodes[id].right = right;
    return id;
  }

  std::span<const LabeledFeature> samples_;
  int max_depth_;
  DecisionTree tree_;
};

Eigen::Matrix<double, kFeatureBits, 1> as_vector(const FeatureVector& f) {
  Eigen::Matrix<double, kFeatureBits, 1> v;
  for (std::size_t i = 0; i < kFeatureBits; ++i) v(static_cast<Eigen::Index>(i)) = f.bits[i];
  return v;
}

LinearModel train_lda(std::span<const LabeledFeature> samples, const ClassCounts& counts,
                      double ridge) {
  using Vec = Eigen::Matrix<double, kFeatureBits, 1>;
  using Mat = Eigen::Matrix<double, kFeatureBits, kFeatureBits>;
  Vec mean_high = Vec::Zero(), mean_low = Vec::Zero();
  for (const auto& s : samples) (is_high(s.label) ? mean_high : mean_low) += as_vector(s.feature);
  mean_high /= static_cast<double>(counts.high);
  mean_low /= static_cast<double>(counts.low);

  Mat scatter = Mat::Zero();
  for (const auto& s : samples) {
    const Vec d = as_vector(s.feature) - (is_high(s.label) ? mean_high : mean_low);
    scatter += d * d.transpose();
  }
  const double dof = samples.size() > 2 ? static_cast<double>(samples.size() - 2) : 1.0;
  const Mat cov = scatter / dof + ridge * Mat::Identity();
  const Vec w = cov.ldlt().solve(mean_high - mean_low);

  LinearModel m;
  for (std::size_t i = 0; i < kFeatureBits; ++i) m.weights[i] = w(static_cast<Eigen::Index>(i));
  m.bias = -0.5 * w.dot(mean_high + mean_low) +
           std::log(static_cast<double>(counts.high) / static_cast<double>(counts.low));
  return m;
}

LinearModel train_svm(std::span<const LabeledFeature> samples, const Hyperparams& hp,
                      std::uint64_t seed) {
  LinearModel m;
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  const double lr = hp.svm_learning_rate;
  for (int epoch = 0; epoch < hp.svm_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (const auto i : order) {
      const auto& s = samples[i];
      const double y = is_high(s.label) ? 1.0 : -1.0;
      double score = m.bias;
      for (std::size_t f = 0; f < kFeatureBits; ++f) score += m.weights[f] * s.feature.bits[f];
      const bool violates = y * score < 1.0;
      for (std::size_t f = 0; f < kFeatureBits; ++f) {
        double grad = hp.svm_l2 * m.weights[f];
        if (violates) grad -= y * s.feature.bits[f];
        m.weights[f] -= lr * grad;
      }
      if (violates) m.bias += lr * y;
    }
  }
  return m;
}

NaiveBayes train_nb(std::span<const LabeledFeature> samples, const ClassCounts& counts) {
  std::array<std::size_t, kFeatureBits> ones_high{}, ones_low{};
  for (const auto& s : samples) {
    auto& ones = is_high(s.label) ? ones_high : ones_low;
    for (std::size_t f = 0; f < kFeatureBits; ++f) ones[f] += s.feature.bits[f];
  }
  NaiveBayes nb;
  const double total = static_cast<double>(samples.size());
  nb.log_prior_high = std::log(static_cast<double>(counts.high) / total);
  nb.log_prior_low = std::log(static_cast<double>(counts.low) / total);
  for (std::size_t f = 0; f < kFeatureBits; ++f) {
    // Laplace add-one smoothing.
    nb.p_high[f] = (static_cast<double>(ones_high[f]) + 1.0) / (static_cast<double>(counts.high) + 2.0);
    nb.p_low[f] = (static_cast<double>(ones_low[f]) + 1.0) / (static_cast<double>(counts.low) + 2.0);
  }
  return nb;
}

RiskLabel predict_tree(const DecisionTree& tree, const FeatureVector& f) {
  int id = 0;
  while (tree.nodes[static_cast<std::size_t>(id)].feature >= 0) {
    const auto& node = tree.nodes[static_cast<std::size_t>(id)];
    id = f.bits[static_cast<std::size_t>(node.feature)] ? node.right : node.left;
  }
  return tree.nodes[static_cast<std::size_t>(id)].label;
}

RiskLabel predict_linear(const LinearModel& m, const FeatureVector& f) {
  double score = m.bias;
  for (std::size_t i = 0; i < kFeatureBits; ++i) score += m.weights[i] * f.bits[i];
  return score >= 0.0 ? RiskLabel::High : RiskLabel::Low;
}

RiskLabel predict_nb(const NaiveBayes& nb, const FeatureVector& f) {
  double high = nb.log_prior_high, low = nb.log_prior_low;
  for (std::size_t i = 0; i < kFeatureBits; ++i) {
    high += std::log(f.bits[i] ? nb.p_high[i] : 1.0 - nb.p_high[i]);
    low += std::log(f.bits[i] ? nb.p_low[i] : 1.0 - nb.p_low[i]);
  }
  return high >= low ? RiskLabel::High : RiskLabel::Low;
}

RiskLabel predict_knn(const NearestNeighbors& knn, const FeatureVector& f) {
  std::array<std::array<std::uint64_t, 2>, kFeatureBits + 1> by_distance{};
  const unsigned query = f.code();
  for (unsigned code = 0; code < 256; ++code) {
    const auto d = static_cast<std::size_t>(std::popcount(code ^ query));
    by_distance[d][0] += knn.counts[code][0];
    by_distance[d][1] += knn.counts[code][1];
  }
  std::uint64_t high = 0, low = 0;
  for (const auto& level : by_distance) {
    high += level[0];
    low += level[1];
    if (high + low >= knn.k) break;
  }
  return majority(high, low);
}

}  // namespace

std::uint8_t FeatureVector::code() const {
  unsigned v = 0;
  for (const auto b : bits) v = (v << 1) | (b ? 1u : 0u);
  return static_cast<std::uint8_t>(v);
}

FeatureVector FeatureVector::from_code(std::uint8_t code) {
  FeatureVector f;
  for (std::size_t i = 0; i < kFeatureBits; ++i) {
    f.bits[i] = static_cast<std::uint8_t>((code >> (kFeatureBits - 1 - i)) & 1u);
  }
  return f;
}

std::string_view to_string(RiskLabel label) {
  switch (label) {
    case RiskLabel::High:
      return "+1";
    case RiskLabel::Low:
      return "-1";
    case RiskLabel::Absent:
      return "0";
  }
  return "0";
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::DT:
      return "DT";
    case Method::LDA:
      return "LDA";
    case Method::NB:
      return "NB";
    case Method::KNN:
      return "kNN";
    case Method::SVM:
      return "SVM";
    case Method::PL:
      return "PL";
  }
  return "PL";
}

Method parse_method(std::string_view s) {
  std::string lower;
  for (const char ch : detail::trim(s)) {
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  for (const auto m : kAllMethods) {
    std::string name;
    for (const char ch : to_string(m)) {
      name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    if (name == lower) return m;
  }
  throw ParseError(fmt::format("unknown method '{}'", s));
}

FeatureVector encode_rss_8bit(double rss) {
  const double level = std::clamp(std::round(-rss), 0.0, 255.0);
  return FeatureVector::from_code(static_cast<std::uint8_t>(level));
}

RiskLabel threshold_classify(double distance, double threshold) {
  if (!(threshold > 0.0)) throw DomainError("distance threshold must be positive");
  if (!(distance >= 0.0)) throw DomainError("distance must be nonnegative");
  return distance <= threshold ? RiskLabel::High : RiskLabel::Low;
}

PlDecision pl_classify(const PathLossModel& model, double rss, double threshold,
                       double max_distance) {
  const auto est = estimate_distance(model, rss, max_distance);
  if (est.saturated) return {RiskLabel::Low, est};
  return {threshold_classify(est.meters, threshold), est};
}

TrainedClassifier::TrainedClassifier(Method kind, ClassifierParams params, TrainMeta meta)
    : kind_(kind), params_(std::move(params)), meta_(meta) {
  const bool ok = (kind == Method::DT && std::holds_alternative<DecisionTree>(params_)) ||
                  ((kind == Method::LDA || kind == Method::SVM) &&
                   std::holds_alternative<LinearModel>(params_)) ||
                  (kind == Method::NB && std::holds_alternative<NaiveBayes>(params_)) ||
                  (kind == Method::KNN && std::holds_alternative<NearestNeighbors>(params_));
  if (!ok) throw DomainError(fmt::format("parameters do not match classifier {}", to_string(kind)));
  if (const auto* tree = std::get_if<DecisionTree>(&params_); tree && tree->nodes.empty()) {
    throw DomainError("decision tree has no nodes");
  }
}

RiskLabel TrainedClassifier::predict(const FeatureVector& feature) const {
  return std::visit(
      [&](const auto& p) -> RiskLabel {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DecisionTree>) {
          return predict_tree(p, feature);
        } else if constexpr (std::is_same_v<T, LinearModel>) {
          return predict_linear(p, feature);
        } else if constexpr (std::is_same_v<T, NaiveBayes>) {
          return predict_nb(p, feature);
        } else {
          return predict_knn(p, feature);
        }
      },
      params_);
}

TrainedClassifier train(Method kind, std::span<const LabeledFeature> samples,
                        const Hyperparams& hyper, std::uint64_t seed) {
  if (kind == Method::PL) throw DomainError("the path loss baseline is fitted, not trained");
  if (samples.empty()) throw DegenerateTrainingError("no training samples");
  const auto counts = count_classes(samples);
  const bool discriminant = kind == Method::LDA || kind == Method::NB || kind == Method::SVM;
  if (discriminant && (counts.high == 0 || counts.low == 0)) {
    throw DegenerateTrainingError(
        fmt::format("{} needs samples of both classes", to_string(kind)));
  }
  const TrainMeta meta{samples.size(), seed, 1};
  switch (kind) {
    case Method::DT:
      return {kind, TreeBuilder(samples, hyper.dt_max_depth).build(), meta};
    case Method::LDA:
      return {kind, train_lda(samples, counts, hyper.lda_ridge), meta};
    case Method::NB:
      return {kind, train_nb(samples, counts), meta};
    case Method::KNN: {
      if (hyper.knn_k == 0) throw DomainError("kNN needs k >= 1");
      NearestNeighbors knn;
      knn.k = hyper.knn_k;
      for (const auto& s : samples) knn.counts[s.feature.code()][is_high(s.label) ? 0 : 1] += 1;
      return {kind, knn, meta};
    }
    case Method::SVM:
      return {kind, train_svm(samples, hyper, seed), meta};
    case Method::PL:
      break;
  }
  throw DomainError("unreachable classifier kind");
}

RiskLabel predict(const TrainedClassifier& model, const FeatureVector& feature) {
  return model.predict(feature);
}

namespace {

void dump_tree(std::ostringstream& out, const DecisionTree& tree, int id, int depth) {
  const auto& node = tree.nodes[static_cast<std::size_t>(id)];
  out << std::string(static_cast<std::size_t>(2 * depth), ' ') << "node " << id;
  if (node.feature < 0) {
    out << " leaf label=" << to_string(node.label) << '\n';
    return;
  }
  out << " split bit=" << node.feature << " left=" << node.left << " right=" << node.right
      << " label=" << to_string(node.label) << '\n';
  dump_tree(out, tree, node.left, depth + 1);
  dump_tree(out, tree, node.right, depth + 1);
}

template <typename Array>
std::string join(const Array& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += fmt::format("{}", values[i]);
  }
  return s;
}

std::array<double, kFeatureBits> parse_list(std::string_view text) {
  const auto fields = detail::split_csv(text);
  if (fields.size() != kFeatureBits) throw ParseError("expected 8 comma-separated values");
  std::array<double, kFeatureBits> out{};
  for (std::size_t i = 0; i < kFeatureBits; ++i) {
    const auto v = detail::parse_double(fields[i]);
    if (!v) throw ParseError(fmt::format("bad number '{}'", fields[i]));
    out[i] = *v;
  }
  return out;
}

RiskLabel parse_label(std::string_view s) {
  if (s == "+1") return RiskLabel::High;
  if (s == "-1") return RiskLabel::Low;
  throw ParseError(fmt::format("bad label '{}'", s));
}

// "word key=value key=value ..." -> values by key.
std::vector<detail::KeyValue> parse_attributes(std::string_view line) {
  std::vector<detail::KeyValue> out;
  std::istringstream in{std::string(line)};
  std::string token;
  while (in >> token) {
    if (const auto kv = detail::parse_key_value(token)) out.push_back(*kv);
  }
  return out;
}

std::string attribute(const std::vector<detail::KeyValue>& attrs, std::string_view key) {
  for (const auto& kv : attrs) {
    if (kv.key == key) return kv.value;
  }
  throw ParseError(fmt::format("missing attribute '{}'", key));
}

std::int64_t int_attribute(const std::vector<detail::KeyValue>& attrs, std::string_view key) {
  const auto v = detail::parse_int(attribute(attrs, key));
  if (!v) throw ParseError(fmt::format("bad integer for '{}'", key));
  return *v;
}

}  // namespace

std::string dump_classifier(const TrainedClassifier& model) {
  std::ostringstream out;
  out << "method=" << to_string(model.kind()) << '\n'
      << "samples=" << model.meta().samples << '\n'
      << "seed=" << model.meta().seed << '\n'
      << "window=" << model.meta().window << '\n';
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DecisionTree>) {
          dump_tree(out, p, 0, 0);
        } else if constexpr (std::is_same_v<T, LinearModel>) {
          out << "weights=" << join(p.weights) << '\n' << "bias=" << fmt::format("{}", p.bias) << '\n';
        } else if constexpr (std::is_same_v<T, NaiveBayes>) {
          out << "log_prior_high=" << fmt::format("{}", p.log_prior_high) << '\n'
              << "log_prior_low=" << fmt::format("{}", p.log_prior_low) << '\n'
              << "p_high=" << join(p.p_high) << '\n'
              << "p_low=" << join(p.p_low) << '\n';
        } else {
          out << "k=" << p.k << '\n';
          for (unsigned code = 0; code < 256; ++code) {
            if (p.counts[code][0] || p.counts[code][1]) {
              out << "count code=" << code << " high=" << p.counts[code][0]
                  << " low=" << p.counts[code][1] << '\n';
            }
          }
        }
      },
      model.params());
  return out.str();
}

TrainedClassifier parse_classifier(std::string_view text) {
  std::optional<Method> kind;
  TrainMeta meta;
  DecisionTree tree;
  LinearModel linear;
  NaiveBayes nb;
  NearestNeighbors knn;

  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    if (detail::is_blank_or_comment(raw)) continue;
    const auto line = detail::trim(raw);
    if (line.starts_with("node ")) {
      const auto attrs = parse_attributes(line);
      std::istringstream words{std::string(line)};
      std::string word, kind_word;
      std::int64_t id = -1;
      words >> word >> id >> kind_word;
      if (id < 0 || id > 100000) throw ParseError("bad node id");
      if (tree.nodes.size() <= static_cast<std::size_t>(id)) tree.nodes.resize(static_cast<std::size_t>(id) + 1);
      auto& node = tree.nodes[static_cast<std::size_t>(id)];
      node.label = parse_label(attribute(attrs, "label"));
      if (kind_word == "split") {
        node.feature = static_cast<int>(int_attribute(attrs, "bit"));
        node.left = static_cast<int>(int_attribute(attrs, "left"));
        node.right = static_cast<int>(int_attribute(attrs, "right"));
        if (node.feature < 0 || node.feature >= static_cast<int>(kFeatureBits)) {
          throw ParseError("split bit out of range");
        }
      } else if (kind_word != "leaf") {
        throw ParseError(fmt::format("bad node line '{}'", line));
      }
      continue;
    }
    if (line.starts_with("count ")) {
      const auto attrs = parse_attributes(line);
      const auto code = int_attribute(attrs, "code");
      if (code < 0 || code > 255) throw ParseError("count code out of range");
      knn.counts[static_cast<std::size_t>(code)][0] = static_cast<std::uint32_t>(int_attribute(attrs, "high"));
      knn.counts[static_cast<std::size_t>(code)][1] = static_cast<std::uint32_t>(int_attribute(attrs, "low"));
      continue;
    }
    const auto kv = detail::parse_key_value(line);
    if (!kv) throw ParseError(fmt::format("bad classifier line '{}'", line));
    const auto number = [&] {
      const auto v = detail::parse_double(kv->value);
      if (!v) throw ParseError(fmt::format("bad number for '{}'", kv->key));
      return *v;
    };
    if (kv->key == "method") {
      kind = parse_method(kv->value);
    } else if (kv->key == "samples") {
      meta.samples = static_cast<std::size_t>(number());
    } else if (kv->key == "seed") {
      const auto v = detail::parse_int(kv->value);
      if (!v) throw ParseError("bad seed");
      meta.seed = static_cast<std::uint64_t>(*v);
    } else if (kv->key == "window") {
      meta.window = static_cast<std::size_t>(number());
    } else if (kv->key == "weights") {
      linear.weights = parse_list(kv->value);
    } else if (kv->key == "bias") {
      linear.bias = number();
    } else if (kv->key == "log_prior_high") {
      nb.log_prior_high = number();
    } else if (kv->key == "log_prior_low") {
      nb.log_prior_low = number();
    } else if (kv->key == "p_high") {
      nb.p_high = parse_list(kv->value);
    } else if (kv->key == "p_low") {
      nb.p_low = parse_list(kv->value);
    } else if (kv->key == "k") {
      knn.k = static_cast<std::size_t>(number());
    } else {
      throw ParseError(fmt::format("unknown classifier key '{}'", kv->key));
    }
  }
  if (!kind) throw ParseError("classifier dump has no method line");
  switch (*kind) {
    case Method::DT:
      // Children always follow their parent, which also rules out cycles.
      for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
        const auto& node = tree.nodes[id];
        const auto n = static_cast<int>(tree.nodes.size());
        const auto self = static_cast<int>(id);
        if (node.feature >= 0 && (node.left <= self || node.left >= n || node.right <= self ||
                                  node.right >= n)) {
          throw ParseError("tree child index out of range");
        }
      }
      return {*kind, tree, meta};
    case Method::LDA:
    case Method::SVM:
      return {*kind, linear, meta};
    case Method::NB:
      return {*kind, nb, meta};
    case Method::KNN:
      return {*kind, knn, meta};
    case Method::PL:
      break;
  }
  throw ParseError("PL is not a trained classifier");
}

}  // namespace sct
