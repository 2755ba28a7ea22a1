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
#include "sct/risk_eval.hpp"
#include "support.hpp"

using namespace sct;
using sct::testing::Gen;

namespace {

std::vector<RssSample> two_point(double near_rss, double far_rss, std::size_t per) {
  std::vector<RssSample> out;
  for (std::size_t i = 0; i < 2 * per; ++i) {
    RssSample s;
    const bool near = i < per;
    s.rss = near ? near_rss : far_rss;
    s.true_distance = near ? 0.5 : 5.0;
    s.timestamp_ms = static_cast<std::int64_t>(i) * 100;
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("outcome taxonomy covers every combination once") {
  using L = RiskLabel;
  using T = Truth;
  CHECK(classify_outcome(L::High, T::High) == Outcome::TruePositive);
  CHECK(classify_outcome(L::Absent, T::Absent) == Outcome::TrueNegative);
  CHECK(classify_outcome(L::High, T::Absent) == Outcome::FalsePositive);
  CHECK(classify_outcome(L::High, T::Low) == Outcome::FalsePositive);
  CHECK(classify_outcome(L::Low, T::Absent) == Outcome::FalseNegative);
  CHECK(classify_outcome(L::Low, T::High) == Outcome::FalseNegative);
  CHECK(classify_outcome(L::Absent, T::High) == Outcome::Miss);
  CHECK(classify_outcome(L::Absent, T::Low) == Outcome::Miss);
  CHECK(classify_outcome(L::Low, T::Low) == Outcome::CorrectLow);

  OutcomeTally tally;
  for (auto p : {L::High, L::Low, L::Absent}) {
    for (auto t : {T::High, T::Low, T::Absent}) tally.add(classify_outcome(p, t));
  }
  CHECK(tally.total() == 9);
  CHECK(tally.tp == 1);
  CHECK(tally.tn == 1);
  CHECK(tally.fp == 2);
  CHECK(tally.fn == 2);
  CHECK(tally.miss == 2);
  CHECK(tally.correct_low == 1);
}

TEST_CASE("confusion matrix against a counting oracle") {
  using L = RiskLabel;
  Gen g(71);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<L> p(100), t(100);
    for (std::size_t i = 0; i < 100; ++i) {
      p[i] = g.coin() ? L::High : L::Low;
      t[i] = g.coin(0.3) ? L::High : L::Low;
    }
    const auto [cm, acc] = confusion_and_accuracy(p, t);
    std::size_t same = 0, truth_high = 0, pred_high = 0;
    for (std::size_t i = 0; i < 100; ++i) {
      same += p[i] == t[i];
      truth_high += t[i] == L::High;
      pred_high += p[i] == L::High;
    }
    CHECK(acc == static_cast<double>(same) / 100.0);
    CHECK(cm.total() == 100);
    CHECK(cm.counts[0][0] + cm.counts[1][0] == truth_high);
    CHECK(cm.counts[0][0] + cm.counts[0][1] == pred_high);

    auto fp = p, ft = t;
    for (auto& x : fp) x = x == L::High ? L::Low : L::High;
    for (auto& x : ft) x = x == L::High ? L::Low : L::High;
    CHECK(confusion_and_accuracy(fp, ft).second == acc);
  }
  const std::vector<L> a = {L::High, L::Low, L::Low};
  const std::vector<L> b = {L::Low, L::High, L::High};
  CHECK(confusion_and_accuracy(a, a).second == 1.0);
  CHECK(confusion_and_accuracy(a, b).second == 0.0);
  CHECK_THROWS_AS(confusion_and_accuracy(a, std::vector<L>{L::High}), DomainError);
  CHECK_THROWS_AS(confusion_and_accuracy(std::vector<L>{}, std::vector<L>{}), DomainError);
}

TEST_CASE("accuracy summary interval") {
  const auto r = summarize_accuracies({0.6, 0.7, 0.8});
  CHECK(r.mean == doctest::Approx(0.7));
  CHECK(r.ci_lo <= r.mean);
  CHECK(r.ci_hi >= r.mean);
  CHECK(r.ci_hi - r.mean == doctest::Approx(1.96 * 0.1 / std::sqrt(3.0)));
  CHECK(summarize_accuracies({0.9, 1.0, 1.0}).ci_hi == 1.0);
  const auto one = summarize_accuracies({0.7});
  CHECK(one.ci_lo == 0.7);
  CHECK(one.ci_hi == 0.7);
}

TEST_CASE("separable data is classified perfectly by every method") {
  const auto samples = two_point(-50, -95, 200);
  for (auto m : kAllMethods) {
    CAPTURE(to_string(m));
    EvalConfig cfg;
    cfg.method = m;
    cfg.repeats = 5;
    cfg.seed = 3;
    const auto r = evaluate_case(samples, cfg);
    CHECK(r.mean == 1.0);
    CHECK(r.ci_hi - r.ci_lo == 0.0);
    CHECK(r.repeats == 5);
    CHECK(r.confusion.total() == 5 * 80);
  }
}

TEST_CASE("evaluation is reproducible and rejects one-class data") {
  const auto samples = testing::synth_case(testing::table_distances(), 60, 5);
  EvalConfig cfg;
  cfg.method = Method::NB;
  cfg.repeats = 1;
  cfg.seed = 17;
  const auto a = evaluate_case(samples, cfg), b = evaluate_case(samples, cfg);
  CHECK(a.mean == b.mean);
  CHECK(a.confusion.counts == b.confusion.counts);

  cfg.threshold_m = 10.0;
  CHECK_THROWS_AS(evaluate_case(samples, cfg), DegenerateEvaluationError);
  cfg.threshold_m = 2.0;
  cfg.train_fraction = 1.0;
  CHECK_THROWS_AS(evaluate_case(samples, cfg), DegenerateEvaluationError);
}

TEST_CASE("window sweep") {
  const auto samples = testing::synth_model_case(reference_model(), testing::table_distances(), 2, 300, 9);
  EvalConfig cfg;
  cfg.method = Method::PL;
  cfg.repeats = 5;
  cfg.seed = 2;
  const std::vector<std::size_t> one = {1};
  CHECK(sweep_window(samples, cfg, one)[0].report.mean == evaluate_case(samples, cfg).mean);
  CHECK(sweep_window(samples, cfg, {}).empty());

  const std::vector<std::size_t> ws = {1, 100};
  const auto pts = sweep_window(samples, cfg, ws);
  MESSAGE("PL window 1: " << pts[0].report.mean << " window 100: " << pts[1].report.mean);
  CHECK(pts[1].report.mean >= pts[0].report.mean);
}

TEST_CASE("threshold sweep") {
  const auto samples = testing::synth_model_case(reference_model(), testing::table_distances(), 2, 200, 13);
  EvalConfig cfg;
  cfg.repeats = 3;
  cfg.seed = 4;
  const std::vector<Method> methods = {Method::PL, Method::DT, Method::LDA};
  const std::vector<double> two = {2.0};
  const auto single = sweep_threshold(samples, cfg, methods, two);
  REQUIRE(single.size() == 3);
  for (const auto& p : single) {
    auto c = cfg;
    c.method = p.method;
    CHECK(p.report.mean == evaluate_case(samples, c).mean);
  }
  const std::vector<double> ts = {1.0, 2.0};
  const auto grid = sweep_threshold(samples, cfg, methods, ts);
  for (std::size_t m = 0; m < methods.size(); ++m) {
    MESSAGE(to_string(methods[m]) << " t=1: " << grid[2 * m].report.mean << " t=2: " << grid[2 * m + 1].report.mean);
  }
  CHECK(grid[0].report.mean >= grid[1].report.mean);

  const std::vector<double> beyond = {50.0};
  CHECK_THROWS_AS(sweep_threshold(samples, cfg, methods, beyond), DegenerateEvaluationError);
}

TEST_CASE("episodes") {
  auto s = testing::synth_case({1.0, 2.0, 1.0}, 5, 1);
  auto eps = find_episodes(s);
  REQUIRE(eps.size() == 3);
  CHECK(eps[0].begin == 0);
  CHECK(eps[0].end == 5);
  CHECK(eps[2].true_distance == 1.0);
  s[7].tx_id = "C";
  CHECK(find_episodes(s).size() == 5);
  CHECK(find_episodes(std::vector<RssSample>{}).empty());
}

TEST_CASE("accuracy over time") {
  const auto model = reference_model();
  const auto samples = testing::synth_model_case(model, testing::table_distances(), 8, 600, 21);
  const std::vector<double> ds = {1, 10, 30, 60, 1000};
  const auto pts = accuracy_over_time(samples, model, 2.0, ds);
  REQUIRE(pts.size() == ds.size());
  for (const auto& p : pts) MESSAGE("T=" << p.duration_s << "s accuracy " << p.accuracy);
  CHECK(pts[1].accuracy >= pts[0].accuracy);
  CHECK(pts[0].contacts == 8 * 13);

  // Longer than any episode: whole-episode means.
  std::size_t correct = 0;
  for (const auto& ep : find_episodes(samples)) {
    double sum = 0;
    for (auto i = ep.begin; i < ep.end; ++i) sum += samples[i].rss;
    const auto label = pl_classify(model, sum / static_cast<double>(ep.end - ep.begin), 2.0).label;
    correct += label == threshold_classify(ep.true_distance, 2.0);
  }
  CHECK(pts[4].accuracy == static_cast<double>(correct) / static_cast<double>(8 * 13));

  // A span shorter than one gap keeps only the first reading.
  const std::vector<double> tiny = {0.05};
  std::size_t first_ok = 0;
  for (const auto& ep : find_episodes(samples)) {
    first_ok += pl_classify(model, samples[ep.begin].rss, 2.0).label == threshold_classify(ep.true_distance, 2.0);
  }
  CHECK(accuracy_over_time(samples, model, 2.0, tiny)[0].accuracy ==
        static_cast<double>(first_ok) / static_cast<double>(8 * 13));

  const auto chunked = accuracy_over_time(samples, model, 2.0, std::vector<double>{10}, EpisodeMode::Chunked);
  CHECK(chunked[0].contacts == 8 * 13 * 6);
}

TEST_CASE("distance error CDF") {
  const auto model = reference_model();
  std::vector<RssSample> clean;
  for (double d : {0.3, 0.7, 1.0, 1.5}) {
    for (int i = 0; i < 10; ++i) {
      RssSample s;
      s.rss = predict_rss(model, d);
      s.true_distance = d;
      clean.push_back(s);
    }
  }
  const auto c0 = distance_error_cdf(clean, model, 1);
  CHECK(c0.mae < 1e-9);
  CHECK(c0.points.back().second == 1.0);
  CHECK(c0.quantile(0.8) < 1e-9);

  const auto noisy = testing::synth_case(testing::table_distances(), 100, 2);
  const auto c = distance_error_cdf(noisy, model, 10);
  CHECK(c.points.size() == noisy.size());
  CHECK(c.points.back().second == 1.0);
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    CHECK(c.points[i].first >= c.points[i - 1].first);
    CHECK(c.points[i].second > c.points[i - 1].second);
  }
  CHECK(c.quantile(0.0) == c.points.front().first);
  CHECK(c.quantile(1.0) == c.points.back().first);
}
